#include <catch2/catch_amalgamated.hpp>

#include "kinmodes/lapack_eig.hpp"
#include "kinmodes/spectral.hpp"
#include "oracle.hpp"

using namespace kinmodes;
using Catch::Approx;

TEST_CASE("dispersion matrix vanishes at the origin and is conjugate-symmetric") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::polynomial, 5.5, 2.0);
    SpectralWorkspace ws(s, 64, 32);
    const Matrix3c A0 = ws.ds.matrix(0.0, Complex(0, 0));
    CHECK(A0.cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(ws.ds.transversal(0.0, Complex(0, 0))) <= 1e-10);

    // det(eta, conj(mu)) = conj(det(eta, mu))
    for (Complex mu : {Complex(1e-3, 5e-4), Complex(-2e-4, 1e-3), Complex(0.05, -0.2)}) {
        const Complex d1 = ws.ds.det(1e-3, std::conj(mu));
        const Complex d2 = std::conj(ws.ds.det(1e-3, mu));
        CHECK(std::abs(d1 - d2) <= 1e-10 * (1.0 + std::abs(d2)));
    }
}

TEST_CASE("dispersion entries match the independent angular-analytic oracle") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::polynomial, 5.5, 0.0);
    SpectralWorkspace ws(s, 320, 64, RadialMap::algebraic, 2.0);
    const double eta = 1e-3;
    const Complex mu(3e-4, 1e-4);
    const Matrix3c A = ws.ds.matrix(eta, mu);
    // entry (0,0): E_0 = Et_0 = 1
    const Complex a00 = oracle::disp_integral(s, eta, mu, [](double) { return 1.0; }, 0);
    CHECK(std::abs(A(0, 0) - a00) <= 2e-6 * std::abs(a00));
    // entry (1,1): v1 * v1 = r^2 u^2
    const Complex a11 = oracle::disp_integral(s, eta, mu, [](double r) { return r * r; }, 2);
    CHECK(std::abs(A(1, 1) - a11) <= 2e-6 * std::abs(a11));
    // entry (2,2): (r^2-3)^2 /(3 (m4-3))
    const double q = 1.0 / (s.m4 - 3.0);
    const Complex a22 = oracle::disp_integral(
        s, eta, mu, [&](double r) { return (r * r - 3.0) * (r * r - 3.0) * q / 3.0; }, 0);
    CHECK(std::abs(A(2, 2) - a22) <= 1e-3 * std::abs(a22)); // tail-layer entry: discretization-level agreement
}

TEST_CASE("determinant reduces to mu~^3 + mu~ D^2 at eta = 0") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::polynomial, 8.0, 0.0);
    SpectralWorkspace ws(s, 64, 32);
    const double D = ws.ds.acoustic_speed();
    // frozen oracle: alpha = 8, beta = 0 has D^2 = 1 + (m4-3)/3 = 5/2
    CHECK(D == Approx(std::sqrt(2.5)).epsilon(1e-9));
    for (Complex mt : {Complex(0.3, 0.1), Complex(-0.2, 0.4)}) {
        const Complex det = ws.ds.limit_matrix(mt).determinant();
        const Complex poly = mt * mt * mt + mt * D * D;
        CHECK(std::abs(det - poly) <= 1e-12 * std::abs(poly));
    }
    // and the scaled determinant of the full system approaches it
    const double eta = 1e-6;
    const Complex mt(0.17, 0.23);
    const Complex det_full = ws.ds.det(eta, eta * mt) / (eta * eta * eta);
    const Complex poly = mt * mt * mt + mt * D * D;
    CHECK(std::abs(det_full - poly) <= 1e-4 * std::abs(poly));
}

TEST_CASE("gaussian acoustic speed and small-eta branch slopes") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::gaussian, 0.0, 0.0);
    SpectralWorkspace ws(s, 96, 32);
    CHECK(ws.ds.acoustic_speed() == Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-10));
    const double eta = 1e-5;
    LongitudinalRoots lr = solve_longitudinal(ws.ds, eta);
    CHECK(std::abs(lr.mu_plus.imag() / eta - std::sqrt(5.0 / 3.0)) <= 1e-6);
    CHECK(std::abs(lr.mu0.imag()) <= 1e-9 * (1.0 + std::abs(lr.mu0)));
    CHECK(std::abs(lr.mu_plus - std::conj(lr.mu_minus)) <= 1e-12);
    const Complex mt = solve_transversal(ws.ds, eta);
    CHECK(std::abs(mt.imag()) <= 1e-9 * (1.0 + std::abs(mt)));
    CHECK(mt.real() == Approx(eta * eta).epsilon(1e-4)); // classical transversal rate
}

TEST_CASE("matrix route agrees with the dispersion route on the same grid") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::polynomial, 5.5, 0.0);
    // small grid: full dense eigensolve as the matrix-side reference
    SpectralWorkspace ws(s, 24, 12);
    const double eta = 1e-2;
    LongitudinalRoots lr = solve_longitudinal(ws.ds, eta);
    const Complex mt = solve_transversal(ws.ds, eta);
    EigenDecomposition e0 = full_eigendecomposition(assemble_perturbed_operator(ws.op.basis(0), eta));
    EigenDecomposition e1 = full_eigendecomposition(assemble_perturbed_operator(ws.op.basis(1), eta));
    auto nearest = [](const Eigen::VectorXcd& vals, Complex z) {
        double best = 1e300;
        for (Eigen::Index i = 0; i < vals.size(); ++i) best = std::min(best, std::abs(vals[i] - z));
        return best;
    };
    CHECK(nearest(e0.values, lr.mu0) <= 1e-10);
    CHECK(nearest(e0.values, lr.mu_plus) <= 1e-10);
    CHECK(nearest(e1.values, mt) <= 1e-10);
    // in-ball census from the dense spectrum matches the winding count
    int in0 = 0, in1 = 0;
    for (Eigen::Index i = 0; i < e0.values.size(); ++i) in0 += std::abs(e0.values[i]) < 0.5;
    for (Eigen::Index i = 0; i < e1.values.size(); ++i) in1 += std::abs(e1.values[i]) < 0.5;
    const CensusResult c = eigenvalue_census(ws.ds, eta, 0.5);
    CHECK(in0 == c.longitudinal);
    CHECK(in1 == c.transversal);
    CHECK(c.total == 5);

    // production-size grid: shift-inverted iteration vs dispersion root
    SpectralWorkspace ws64(s, 64, 32);
    LongitudinalRoots lr64 = solve_longitudinal(ws64.ds, 1e-3);
    PerturbedOperator m0 = make_perturbed_operator(ws64.op.basis(0), 1e-3);
    for (Complex mu : {lr64.mu0, lr64.mu_plus, lr64.mu_minus}) {
        const Complex mm = matrix_eigenvalue_near(m0, mu);
        CHECK(std::abs(mm - mu) <= 1e-6 * (1.0 + std::abs(mu)));
    }
}

TEST_CASE("unperturbed operator is PSD with the right kernel dimensions") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::polynomial, 5.5, 2.0);
    SpectralWorkspace ws(s, 24, 12);
    for (int sector : {0, 1}) {
        EigenDecomposition e =
            full_eigendecomposition(assemble_perturbed_operator(ws.op.basis(sector), 0.0));
        int zero = 0;
        for (Eigen::Index i = 0; i < e.values.size(); ++i) {
            CHECK(e.values[i].real() >= -1e-10);
            CHECK(std::abs(e.values[i].imag()) <= 1e-10);
            if (std::abs(e.values[i]) < 1e-10) ++zero;
            else CHECK(e.values[i].real() >= 1.0 - 1e-8); // BGK gap
        }
        CHECK(zero == (sector == 0 ? 3 : 1));
    }
}

TEST_CASE("fluid eigenvalue census and out-of-ball reporting") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::gaussian, 0.0, 0.0);
    SpectralWorkspace ws(s, 48, 24);
    const auto at_zero = fluid_eigenvalues(ws.ds, 0.0);
    REQUIRE(at_zero.size() == 5);
    for (Complex m : at_zero) CHECK(std::abs(m) == 0.0);

    const auto vals = fluid_eigenvalues(ws.ds, 1e-2);
    REQUIRE(vals.size() == 5);
    CHECK(std::abs(vals[1] - std::conj(vals[2])) <= 1e-10);
    CHECK(std::abs(vals[3] - vals[4]) == 0.0); // transversal doubly counted

    // near the spectral gap the acoustic pair leaves B(0, 0.5)
    CHECK_THROWS_AS(fluid_eigenvalues(ws.ds, 0.45, 0.5, 1.0), CountMismatch);
    CHECK_THROWS_AS(fluid_eigenvalues(ws.ds, 0.2, 0.5, 0.1), ParameterDomain);
}

TEST_CASE("eigenmode coefficients, defect and residual") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::gaussian, 0.0, 0.0);
    SpectralWorkspace ws(s, 64, 32);
    const double eta = 1e-3;
    LongitudinalRoots lr = solve_longitudinal(ws.ds, eta);

    Eigenmode b = eigenmode_coefficients(ws, eta, lr.mu0, 0);
    // normalization ||P phi||_{-beta} = 1 in the metric (1, 1, 3/(m4-3))
    const double met = 3.0 / (s.m4 - 3.0);
    const double nrm = std::sqrt(std::norm(b.C[0]) + std::norm(b.C[1]) + met * std::norm(b.C[4]));
    CHECK(nrm == Approx(1.0).epsilon(1e-12));
    // gaussian boussinesq mode near eta = 0: (-sqrt(2/5), 0, sqrt(2/5))
    CHECK(b.C[0].real() == Approx(-std::sqrt(0.4)).margin(2e-3));
    CHECK(b.C[4].real() == Approx(std::sqrt(0.4)).margin(2e-3));
    CHECK(b.residual <= 1e-9);
    CHECK(b.defect <= 3.0 * std::sqrt(lr.mu0.real()));

    Eigenmode t = eigenmode_coefficients(ws, eta, solve_transversal(ws.ds, eta), 1);
    CHECK(std::abs(t.C[0]) == 0.0);
    CHECK(std::abs(t.C[4]) == 0.0);
    CHECK(std::abs(t.C[2] - 1.0) <= 1e-12);
    CHECK(t.residual <= 1e-9);

    // a regular (eta, mu) is rejected
    CHECK_THROWS_AS(eigenmode_coefficients(ws, eta, Complex(0.2, 0.1), 0), DegenerateNullspace);
}

TEST_CASE("branch tracking: conjugation, defect band, trust region") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::polynomial, 8.0, 0.0);
    SpectralWorkspace ws(s, 96, 32);
    std::vector<double> etas;
    for (int i = 0; i < 17; ++i) etas.push_back(1e-1 * std::pow(1e-3, i / 16.0));
    const auto branches = track_branches(ws, etas);
    REQUIRE(branches[0].samples.size() == etas.size());
    for (std::size_t i = 0; i < etas.size(); ++i) {
        const Complex mp = branches[1].samples[i].mu;
        const Complex mm = branches[2].samples[i].mu;
        CHECK(std::abs(mp - std::conj(mm)) <= 1e-9 * (1.0 + std::abs(mp)));
        CHECK(std::abs(branches[0].samples[i].mu.imag()) <=
              1e-9 * (1.0 + std::abs(branches[0].samples[i].mu)));
        CHECK(std::abs(branches[3].samples[i].mu.imag()) <=
              1e-9 * (1.0 + std::abs(branches[3].samples[i].mu)));
        for (const auto& br : branches) CHECK(br.samples[i].mu.real() >= -1e-12);
    }
    // defect/sqrt(Re mu) stays in a tight band along each branch
    for (const auto& br : branches) {
        double lo = 1e300, hi = 0.0;
        for (const auto& smp : br.samples) {
            const double q = smp.defect / std::sqrt(smp.mu.real());
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        CHECK(hi / lo <= 3.0);
    }
    // an absurdly small trust factor turns continuation noise into BranchJump
    TrackOptions strict;
    strict.trust_factor = 1e-12;
    strict.with_modes = false;
    CHECK_THROWS_AS(track_branches(ws, etas, strict), BranchJump);
}

TEST_CASE("grid refinement moves eigenvalues below 1e-7") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::gaussian, 0.0, 0.0);
    SpectralWorkspace a(s, 64, 32), b(s, 128, 64);
    for (double eta : {1e-3, 1e-2}) {
        const LongitudinalRoots ra = solve_longitudinal(a.ds, eta);
        const LongitudinalRoots rb = solve_longitudinal(b.ds, eta);
        CHECK(std::abs(ra.mu0 - rb.mu0) <= 1e-7 * (1.0 + std::abs(rb.mu0)));
        CHECK(std::abs(ra.mu_plus - rb.mu_plus) <= 1e-7 * (1.0 + std::abs(rb.mu_plus)));
    }
}
