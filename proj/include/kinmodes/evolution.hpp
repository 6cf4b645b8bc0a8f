#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "kinmodes/lapack_eig.hpp"
#include "kinmodes/scaling.hpp"
#include "kinmodes/spectral.hpp"

namespace kinmodes {

// Significant time-scale exponent: gamma(eps) = eps^p with p = 2 in the
// classical regime and (alpha + beta - 4)/(1 + beta) in the fractional one.
inline double scaling_choice(double alpha, double beta) {
    return theoretical_exponents(alpha, beta).zeta_long;
}

// Fourier-space state for one spatial mode: m = 0 sector plus the two
// transverse directions carried by the m = 1 sector.
struct SectorState {
    GridFunction f0;  // sector 0
    GridFunction f1c; // sector 1, cos(phi) channel (v2 direction)
    GridFunction f1s; // sector 1, sin(phi) channel (v3 direction)
};

struct MomentTrajectory {
    double xi = 0.0;      // |xi|; the direction is rotated onto e1
    double epsilon = 0.0;
    double gamma = 0.0;   // gamma(eps)
    double eta = 0.0;     // eps * |xi|
    unsigned long seed = 0;
    std::vector<double> times;
    std::vector<Complex> rho_hat;
    std::vector<Complex> m_hat[3];
    std::vector<Complex> theta_hat;
    std::vector<double> energy;       // ||h(t)||^2 in the evolved norm
    double dissipation_integral = 0.0; // int_0^T ||h - P h||^2_{-beta} dt
    double dissipation_budget = 0.0;   // gamma/(2 lambda) ||h(0)||^2
    // sup-in-time diagnostics sampled densely enough to resolve the acoustic
    // oscillation (the coarse output grid aliases it)
    double sup_boussinesq_residual = 0.0; // sup_t |rho + theta|
    double sup_m_parallel = 0.0;          // sup_t |sigma . m|
};

// Well-prepared data: fluid form with divergence-free momentum and the
// Boussinesq-compatible mass/energy pair, rho_I = -theta_I. The m = 0 part is
// theta_I (E2 - c) with the constant chosen so that rho + theta = 0 holds for
// the grid quadrature exactly, not just up to discretization error (c -> 1 as
// the grid refines); the parallel momentum vanishes by parity. The transverse
// momentum rides on the m = 1 sector.
inline SectorState well_prepared_init(const GridPtr& g0, const GridPtr& g1, double xi,
                                      unsigned long seed) {
    if (!(xi > 0.0)) throw ParameterDomain("well_prepared_init: require |xi| > 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const Complex theta_I(1.0, 0.5 * unif(rng));
    const Complex m2(0.5 * unif(rng) + 0.8, 0.5 * unif(rng));
    const Complex m3(0.5 * unif(rng) - 0.6, 0.5 * unif(rng));

    SectorState st{GridFunction(g0, WeightGauge::phi), GridFunction(g1, WeightGauge::phi),
                   GridFunction(g1, WeightGauge::phi)};
    GridFunction e2 = profile_energy(g0);
    GridFunction one = profile_one(g0);
    const double beta = g0->spec.beta;
    const double a = inner_product(e2, one, -beta).real();
    const double b = inner_product(e2, profile_energy_tilde(g0), -beta).real();
    const double m0q = inner_product(one, one, -beta).real();
    const double t0 = inner_product(one, profile_energy_tilde(g0), -beta).real();
    const double c = (a + b) / (m0q + t0);
    st.f0.values = theta_I * (e2.values - c * one.values);
    GridFunction vp = profile_vperp(g1);
    st.f1c.values = m2 * vp.values;
    st.f1s.values = m3 * vp.values;
    return st;
}

namespace detail {

// Exact-in-time propagator for one sector: y(t) = V exp(-lambda t / gamma) c.
struct SectorPropagator {
    EigenDecomposition eig;
    Eigen::VectorXcd c;         // V^{-1} y0
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    bool healthy = false;

    void prepare(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& y0) {
        eig = full_eigendecomposition(M);
        lu.compute(eig.vectors);
        c = lu.solve(y0);
        // decomposition health: reconstruction residual on the initial data
        const double r = (eig.vectors * (eig.values.asDiagonal() * c) - M * y0).norm();
        healthy = r <= 1e-8 * (1.0 + (M * y0).norm());
    }
    Eigen::VectorXcd at(double t_over_gamma) const {
        Eigen::VectorXcd scaled = c;
        for (Eigen::Index i = 0; i < c.size(); ++i)
            scaled[i] *= std::exp(-eig.values[i] * t_over_gamma);
        return eig.vectors * scaled;
    }
};

// Crank-Nicolson fallback with step halving, for the rare case where the
// eigendecomposition is too ill-conditioned to trust.
inline std::vector<Eigen::VectorXcd> implicit_evolve(const Eigen::MatrixXcd& M,
                                                     const Eigen::VectorXcd& y0,
                                                     const std::vector<double>& t_over_gamma) {
    std::vector<Eigen::VectorXcd> out;
    const Eigen::Index n = M.rows();
    Eigen::VectorXcd y = y0;
    double t = 0.0;
    double dt = (t_over_gamma.back() > 0 ? t_over_gamma.back() : 1.0) / 512.0;
    auto step = [&](const Eigen::VectorXcd& v, double h) -> Eigen::VectorXcd {
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n) + (0.5 * h) * M;
        Eigen::VectorXcd rhs = v - (0.5 * h) * (M * v);
        return Eigen::PartialPivLU<Eigen::MatrixXcd>(A).solve(rhs).eval();
    };
    for (double target : t_over_gamma) {
        while (t < target - 1e-15 * (1.0 + target)) {
            double h = std::min(dt, target - t);
            // step-halving control on the local difference
            Eigen::VectorXcd big = step(y, h);
            Eigen::VectorXcd half = step(step(y, 0.5 * h), 0.5 * h);
            if ((big - half).norm() > 1e-9 * (1.0 + half.norm()) && dt > 1e-6 * target) {
                dt *= 0.5;
                continue;
            }
            y = half;
            t += h;
        }
        out.push_back(y);
    }
    return out;
}

} // namespace detail

struct EvolveOptions {
    int n_times = 65;
    double eta_bar = 0.1;
    unsigned long seed = 0;
};

// Exact-in-time evolution of one Fourier mode under the weighted generator:
// in the psi representation, gamma dpsi/dt = -M psi with M assembled by
// assemble_perturbed_operator, whose eigenvalues are the mu branches. Moments
// and energy are sampled on a uniform grid of n_times points in [0, T].
inline MomentTrajectory evolve_mode(const SpectralWorkspace& ws, double xi, double epsilon,
                                    double T, const SectorState& init,
                                    const EvolveOptions& opt = {}) {
    if (!(xi > 0.0)) throw ParameterDomain("evolve_mode: require |xi| > 0");
    if (!(epsilon > 0.0)) throw ParameterDomain("evolve_mode: require epsilon > 0");
    const EquilibriumSpec& s = ws.spec();
    const double eta = epsilon * xi;
    if (eta > opt.eta_bar)
        throw ParameterDomain("evolve_mode: eta = eps*|xi| exceeds eta_bar");
    const double gamma = std::pow(epsilon, scaling_choice(s.alpha, s.beta));

    const GridPtr& g0 = ws.op.grid(0);
    const GridPtr& g1 = ws.op.grid(1);
    const Eigen::ArrayXd sq0 = g0->w.sqrt(), sq1 = g1->w.sqrt();
    const Eigen::ArrayXd conv0 = g0->vpow(-0.5 * s.beta), conv1 = g1->vpow(-0.5 * s.beta);

    auto to_y = [&](const GridFunction& f, const Eigen::ArrayXd& sq,
                    const Eigen::ArrayXd& conv) -> Eigen::VectorXcd {
        // phi -> psi -> quadrature-weighted coordinates
        return (f.values.array() * conv * sq).matrix();
    };
    Eigen::VectorXcd y0 = to_y(init.f0, sq0, conv0);
    Eigen::VectorXcd y1c = to_y(init.f1c, sq1, conv1);
    Eigen::VectorXcd y1s = to_y(init.f1s, sq1, conv1);

    const Eigen::MatrixXcd M0 = assemble_perturbed_operator(ws.op.basis(0), eta);
    const Eigen::MatrixXcd M1 = assemble_perturbed_operator(ws.op.basis(1), eta);

    MomentTrajectory tr;
    tr.xi = xi;
    tr.epsilon = epsilon;
    tr.gamma = gamma;
    tr.eta = eta;
    tr.seed = opt.seed;
    tr.times.resize(opt.n_times);
    for (int k = 0; k < opt.n_times; ++k) tr.times[k] = T * k / (opt.n_times - 1.0);

    // moment extraction rows acting on y (phi-moments of the psi state);
    // w/sqrt(w) is written as sqrt(w) so that underflowed far-tail weights
    // (gaussian density below double range) contribute clean zeros
    const double beta = s.beta;
    auto row = [&](const GridPtr& g, const Eigen::ArrayXd& sq, const Eigen::ArrayXd& conv,
                   const Eigen::ArrayXcd& test) -> Eigen::ArrayXcd {
        return sq * g->vpow(-beta) / conv * test.conjugate();
    };
    const Eigen::ArrayXcd row_rho = row(g0, sq0, conv0, profile_one(g0).values.array());
    const Eigen::ArrayXcd row_m1 = row(g0, sq0, conv0, profile_v1(g0).values.array());
    const Eigen::ArrayXcd row_th = row(g0, sq0, conv0, profile_energy_tilde(g0).values.array());
    const Eigen::ArrayXcd row_mt = row(g1, sq1, conv1, profile_vperp(g1).values.array());

    // non-hydrodynamic content in y coordinates (orthonormal basis rows)
    auto offproj_sq = [&](const Eigen::VectorXcd& y, const ProjectionBasis& basis,
                          const GridPtr& g, const Eigen::ArrayXd& sq,
                          const Eigen::ArrayXd& conv) -> double {
        // ||phi - P phi||^2_{-beta} for phi = <v>^{beta/2} psi; guard the
        // inverse of underflowed quadrature weights
        Eigen::ArrayXd inv_sq(sq.size());
        for (Eigen::Index i = 0; i < sq.size(); ++i) inv_sq[i] = sq[i] > 0.0 ? 1.0 / sq[i] : 0.0;
        Eigen::ArrayXcd phi = y.array() * inv_sq / conv;
        Eigen::ArrayXcd res = phi;
        const Eigen::ArrayXd wb = g->w * g->vpow(-beta);
        for (const auto& ek : basis.e) {
            const Complex coef = (phi * ek.values.array().conjugate() * wb).sum();
            res -= coef * ek.values.array();
        }
        return (res.abs2() * wb).sum();
    };

    detail::SectorPropagator p0, p1c, p1s;
    p0.prepare(M0, y0);
    p1c.prepare(M1, y1c);
    p1s.prepare(M1, y1s);

    std::vector<Eigen::VectorXcd> Y0, Y1c, Y1s;
    if (p0.healthy && p1c.healthy && p1s.healthy) {
        for (double t : tr.times) {
            Y0.push_back(p0.at(t / gamma));
            Y1c.push_back(p1c.at(t / gamma));
            Y1s.push_back(p1s.at(t / gamma));
        }
    } else {
        std::vector<double> tg;
        for (double t : tr.times) tg.push_back(t / gamma);
        Y0 = detail::implicit_evolve(M0, y0, tg);
        Y1c = detail::implicit_evolve(M1, y1c, tg);
        Y1s = detail::implicit_evolve(M1, y1s, tg);
    }

    std::vector<double> diss(opt.n_times);
    for (int k = 0; k < opt.n_times; ++k) {
        tr.rho_hat.push_back((row_rho * Y0[k].array()).sum());
        tr.m_hat[0].push_back((row_m1 * Y0[k].array()).sum());
        tr.m_hat[1].push_back((row_mt * Y1c[k].array()).sum());
        tr.m_hat[2].push_back((row_mt * Y1s[k].array()).sum());
        tr.theta_hat.push_back((row_th * Y0[k].array()).sum());
        tr.energy.push_back(Y0[k].squaredNorm() + Y1c[k].squaredNorm() + Y1s[k].squaredNorm());
        diss[k] = offproj_sq(Y0[k], ws.op.basis(0), g0, sq0, conv0) +
                  offproj_sq(Y1c[k], ws.op.basis(1), g1, sq1, conv1) +
                  offproj_sq(Y1s[k], ws.op.basis(1), g1, sq1, conv1);
    }
    // trapezoid quadrature in time for the dissipation integral
    for (int k = 0; k + 1 < opt.n_times; ++k)
        tr.dissipation_integral += 0.5 * (diss[k] + diss[k + 1]) * (tr.times[k + 1] - tr.times[k]);
    tr.dissipation_budget = 0.5 * gamma * tr.energy.front(); // lambda = 1

    // sup diagnostics; per-time cost is O(n) once the moment rows are folded
    // through the eigenbasis, so the dense grid is cheap
    for (int k = 0; k < opt.n_times; ++k) {
        tr.sup_boussinesq_residual =
            std::max(tr.sup_boussinesq_residual, std::abs(tr.rho_hat[k] + tr.theta_hat[k]));
        tr.sup_m_parallel = std::max(tr.sup_m_parallel, std::abs(tr.m_hat[0][k]));
    }
    if (p0.healthy) {
        const Eigen::ArrayXcd arho = (row_rho.matrix().transpose() * p0.eig.vectors).transpose();
        const Eigen::ArrayXcd ath = (row_th.matrix().transpose() * p0.eig.vectors).transpose();
        const Eigen::ArrayXcd am1 = (row_m1.matrix().transpose() * p0.eig.vectors).transpose();
        const int dense = 16384;
        const Eigen::ArrayXcd step = (-p0.eig.values.array() * (T / dense / gamma)).exp();
        Eigen::ArrayXcd w = p0.c.array();
        for (int k = 0; k <= dense; ++k) {
            const Complex rho = (arho * w).sum();
            const Complex th = (ath * w).sum();
            const Complex m1 = (am1 * w).sum();
            tr.sup_boussinesq_residual = std::max(tr.sup_boussinesq_residual, std::abs(rho + th));
            tr.sup_m_parallel = std::max(tr.sup_m_parallel, std::abs(m1));
            w *= step;
        }
    }
    return tr;
}

// bilinear pairing B(f, g) = int f g <v>^{-beta} M dv (no conjugation); the
// mu-branch projections of a trajectory decay as pure exponentials in it
inline Complex bilinear_pair(const GridFunction& f, const GridFunction& g) {
    require_compatible(f, g);
    const VelocityGrid& G = *f.grid;
    return (f.values.array() * g.values.array() * (G.w * G.vpow(-G.spec.beta))).sum();
}

} // namespace kinmodes
