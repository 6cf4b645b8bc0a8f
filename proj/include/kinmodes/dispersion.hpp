#pragma once

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "kinmodes/grid.hpp"
#include "kinmodes/rootfind.hpp"

namespace kinmodes {

using Matrix3c = Eigen::Matrix3cd;

// Reduced dispersion system of the weighted BGK eigenvalue problem. For this
// operator the mode-reconstruction map G is pointwise multiplication by
// 1/((1-mu) - i eta <v>^beta v1), so every matrix entry is a plain quadrature
//   calA_jk(eta, mu) = < (G - Id) E_k, Etilde_j >_{-beta},
// with E = (1, v1, (|v|^2-3)/(m4-3)) and Etilde = (1, v1, (|v|^2-3)/3). The
// basis pair is biorthogonal under <.,.>_{-beta} (this is where the computed
// m4 enters), so calA(0, 0) = 0 and the fluid eigenvalues are the roots of
// det calA = 0 together with the scalar transversal relation T = 0.
class DispersionSystem {
  public:
    DispersionSystem(GridPtr grid_m0, GridPtr grid_m1)
        : g0_(std::move(grid_m0)), g1_(std::move(grid_m1)) {
        const EquilibriumSpec& s = g0_->spec;
        b0_ = g0_->vpow(s.beta) * g0_->v1();
        b1_ = g1_->vpow(s.beta) * g1_->v1();
        const Eigen::ArrayXd wb = g0_->w * g0_->vpow(-s.beta);
        const Eigen::ArrayXd one = Eigen::ArrayXd::Ones(g0_->size());
        const Eigen::ArrayXd v1 = g0_->v1();
        const double q = s.energy_coeff();
        const Eigen::ArrayXd rr3 = g0_->r * g0_->r - 3.0;
        std::array<Eigen::ArrayXd, 3> E = {one, v1, rr3 * q};
        std::array<Eigen::ArrayXd, 3> Et = {one, v1, rr3 / 3.0};
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) P_[j][k] = E[k] * Et[j] * wb;
        const Eigen::ArrayXd vp = g1_->vperp();
        Pt_ = vp * vp * (g1_->w * g1_->vpow(-s.beta));
    }

    const GridPtr& grid(int sector) const { return sector == 0 ? g0_ : g1_; }
    const EquilibriumSpec& spec() const { return g0_->spec; }

    // Acoustic speed from the eta -> 0 determinant expansion
    //   det(mu~ I + i Gamma) = mu~^3 + mu~ D^2,
    // with Gamma built from the unweighted moments of the equilibrium.
    double acoustic_speed() const {
        const EquilibriumSpec& s = spec();
        const double g01 = s.u2;
        const double g12 = s.u2r2m3 / (s.m4 - 3.0);
        const double g21 = s.u2r2m3 / 3.0;
        return std::sqrt(g01 * g01 + g12 * g21);
    }

    // Limit matrix of calA(eta, eta*mu~)/eta as eta -> 0.
    Matrix3c limit_matrix(Complex mu_tilde) const {
        const EquilibriumSpec& s = spec();
        const double g01 = s.u2;
        const double g12 = s.u2r2m3 / (s.m4 - 3.0);
        const double g21 = s.u2r2m3 / 3.0;
        Matrix3c A = Matrix3c::Zero();
        A(0, 0) = A(1, 1) = A(2, 2) = mu_tilde;
        A(0, 1) = A(1, 0) = Complex(0.0, g01);
        A(1, 2) = Complex(0.0, g12);
        A(2, 1) = Complex(0.0, g21);
        return A;
    }

    // (G - Id) multiplier and its mu-derivative on a sector.
    static Eigen::ArrayXcd multiplier(const Eigen::ArrayXd& b, double eta, Complex mu) {
        const Complex one_mu = 1.0 - mu;
        return (mu + Complex(0.0, eta) * b) / (one_mu - Complex(0.0, eta) * b);
    }
    static Eigen::ArrayXcd multiplier_dmu(const Eigen::ArrayXd& b, double eta, Complex mu) {
        const Eigen::ArrayXcd den = (1.0 - mu) - Complex(0.0, eta) * b;
        return (den * den).inverse();
    }

    Matrix3c matrix(double eta, Complex mu) const {
        const Eigen::ArrayXcd m = multiplier(b0_, eta, mu);
        Matrix3c A;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) A(j, k) = (m * P_[j][k]).sum();
        return A;
    }

    Complex det(double eta, Complex mu) const { return matrix(eta, mu).determinant(); }

    // det and d(det)/dmu via the adjugate (Jacobi's formula); stays finite at
    // the root where the matrix is singular.
    std::pair<Complex, Complex> det_and_derivative(double eta, Complex mu) const {
        const Eigen::ArrayXcd m = multiplier(b0_, eta, mu);
        const Eigen::ArrayXcd dm = multiplier_dmu(b0_, eta, mu);
        Matrix3c A, dA;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                A(j, k) = (m * P_[j][k]).sum();
                dA(j, k) = (dm * P_[j][k]).sum();
            }
        Matrix3c adj;
        adj << A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1), A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2),
            A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1), A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2),
            A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0), A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2),
            A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0), A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1),
            A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
        const Complex det = A(0, 0) * adj(0, 0) + A(0, 1) * adj(1, 0) + A(0, 2) * adj(2, 0);
        const Complex ddet = (adj * dA).trace();
        return {det, ddet};
    }

    // Transversal relation T(eta, mu) = <(G - Id) v2, v2>_{-beta} and dT/dmu.
    Complex transversal(double eta, Complex mu) const {
        return (multiplier(b1_, eta, mu) * Pt_).sum();
    }
    std::pair<Complex, Complex> transversal_and_derivative(double eta, Complex mu) const {
        return {(multiplier(b1_, eta, mu) * Pt_).sum(),
                (multiplier_dmu(b1_, eta, mu) * Pt_).sum()};
    }

    // Newton on det calA = 0 from the given seed.
    RootResult solve_det(double eta, Complex seed) const {
        return find_root(
            [&](Complex mu) { return det_and_derivative(eta, mu); }, seed);
    }

    // Same, with the already-found roots deflated out. Keeps a collapsing
    // acoustic seed from falling back onto the real branch.
    RootResult solve_det_deflated(double eta, Complex seed, const std::vector<Complex>& known) const {
        return find_root(
            [&](Complex mu) {
                auto [f, df] = det_and_derivative(eta, mu);
                for (Complex m : known) {
                    const Complex d = mu - m;
                    // (f/d)' = f'/d - f/d^2
                    df = df / d - f / (d * d);
                    f = f / d;
                }
                return std::make_pair(f, df);
            },
            seed);
    }

    RootResult solve_transversal_eq(double eta, Complex seed) const {
        return find_root(
            [&](Complex mu) { return transversal_and_derivative(eta, mu); }, seed);
    }

    const Eigen::ArrayXd& b(int sector) const { return sector == 0 ? b0_ : b1_; }

  private:
    GridPtr g0_, g1_;
    Eigen::ArrayXd b0_, b1_;
    std::array<std::array<Eigen::ArrayXd, 3>, 3> P_;
    Eigen::ArrayXd Pt_;
};

} // namespace kinmodes
