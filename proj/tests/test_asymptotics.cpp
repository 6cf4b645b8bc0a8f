#include <catch2/catch_amalgamated.hpp>

#include "kinmodes/scaling.hpp"
#include "oracle.hpp"

using namespace kinmodes;
using Catch::Approx;

TEST_CASE("theoretical exponents across the dichotomy") {
    ScalingPrediction p = theoretical_exponents(8.0, 0.0);
    CHECK(p.zeta_long == Approx(2.0));
    CHECK(p.zeta_trans == Approx(2.0));
    CHECK_FALSE(p.fractional_long);

    p = theoretical_exponents(5.5, 0.0);
    CHECK(p.zeta_long == Approx(1.5));
    CHECK(p.zeta_trans == Approx(2.0));
    CHECK(p.fractional_long);
    CHECK_FALSE(p.fractional_trans);

    p = theoretical_exponents(5.5, 2.0);
    CHECK(p.zeta_long == Approx(7.0 / 6.0));
    CHECK(p.zeta_trans == Approx(11.0 / 6.0));
    CHECK(p.fractional_trans);
    CHECK(p.im_exponent == Approx(1.0));

    CHECK(p.zeta_trans >= p.zeta_long);
    CHECK_THROWS_AS(theoretical_exponents(4.5, 0.0), ParameterDomain);
}

TEST_CASE("power-law fit recovers synthetic data exactly") {
    std::vector<double> x, y;
    for (int i = 0; i < 12; ++i) {
        const double xi = 1e-4 * std::pow(100.0, i / 11.0);
        x.push_back(xi);
        y.push_back(3.0 * std::pow(xi, 1.5));
    }
    const ScalingFit f = fit_power_law(x, y, {1e-4, 1e-2});
    CHECK(f.exponent == Approx(1.5).margin(1e-12));
    CHECK(f.amplitude == Approx(3.0).epsilon(1e-12));
    CHECK(f.r_squared == Approx(1.0).margin(1e-12));

    CHECK_THROWS_AS(fit_power_law(x, y, {1e-4, 2e-4}), InsufficientRange);
    std::vector<double> bad = y;
    bad[3] = -1.0;
    CHECK_THROWS_AS(fit_power_law(x, bad, {1e-4, 1e-2}), NonPositiveValue);
}

TEST_CASE("limit modes: gaussian closed forms and the m4 correction") {
    const EquilibriumSpec sg = build_equilibrium(EquilibriumKind::gaussian, 0.0, 0.0);
    const LimitModes lg = limit_modes(sg);
    CHECK(lg.boussinesq[0] == Approx(-std::sqrt(2.0 / 5.0)).epsilon(1e-9));
    CHECK(lg.boussinesq[1] == Approx(0.0).margin(1e-12));
    CHECK(lg.boussinesq[2] == Approx(std::sqrt(2.0 / 5.0)).epsilon(1e-9));
    CHECK(lg.acoustic_plus[0] == Approx(std::sqrt(3.0 / 10.0)).epsilon(1e-9));
    CHECK(std::abs(lg.acoustic_plus[1]) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(lg.acoustic_plus[2] == Approx(2.0 / std::sqrt(30.0)).epsilon(1e-9));
    // normalization identity 3/10 + 1/2 + 1/5 = 1 in the weighted metric
    const double met = 3.0 / (sg.m4 - 3.0);
    const double n2 = lg.acoustic_plus[0] * lg.acoustic_plus[0] +
                      lg.acoustic_plus[1] * lg.acoustic_plus[1] +
                      met * lg.acoustic_plus[2] * lg.acoustic_plus[2];
    CHECK(n2 == Approx(1.0).epsilon(1e-12));

    // polynomial: null vector of the limit matrix, orthogonality built in
    const EquilibriumSpec sp = build_equilibrium(EquilibriumKind::polynomial, 5.5, 0.0);
    const LimitModes lp = limit_modes(sp);
    const double metp = 3.0 / (sp.m4 - 3.0);
    const double cross = lp.boussinesq[0] * lp.acoustic_plus[0] +
                         lp.boussinesq[1] * lp.acoustic_plus[1] +
                         metp * lp.boussinesq[2] * lp.acoustic_plus[2];
    CHECK(std::abs(cross) <= 1e-12);
    // the boussinesq mode solves the limit system: row 1 of A(0, 0) C = 0
    const double g01 = sp.u2, g12 = sp.u2r2m3 / (sp.m4 - 3.0);
    CHECK(std::abs(g01 * lp.boussinesq[0] + g12 * lp.boussinesq[2]) <= 1e-12);
}

TEST_CASE("branch endpoints extrapolate onto the limit modes") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::polynomial, 5.5, 0.0);
    // production-depth radial grid: the eta = 1e-4 tail layer must be resolved
    SpectralWorkspace ws(s, 320, 64, RadialMap::algebraic, 2.0);
    std::vector<double> etas;
    for (int i = 0; i < 28; ++i) etas.push_back(1e-2 * std::pow(1e-2, i / 27.0));
    const auto branches = track_branches(ws, etas);
    const ScalingPrediction pred = theoretical_exponents(5.5, 0.0);
    const LimitModes lm = limit_modes(s);

    const EndpointExtrapolation eb = extrapolate_endpoint(branches[0], pred.zeta_long);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(eb.C[i] - Complex(lm.boussinesq[i], 0.0)) <= 1e-3);

    const EndpointExtrapolation ep = extrapolate_endpoint(branches[1], pred.zeta_long);
    double dplus = 0.0, dminus = 0.0;
    for (int i = 0; i < 3; ++i) {
        dplus = std::max(dplus, std::abs(ep.C[i] - Complex(lm.acoustic_plus[i], 0.0)));
        dminus = std::max(dminus, std::abs(ep.C[i] - Complex(lm.acoustic_minus[i], 0.0)));
    }
    CHECK(std::min(dplus, dminus) <= 1e-3);
}

TEST_CASE("acoustic constants: D and the phase-speed integral agree") {
    const EquilibriumSpec sg = build_equilibrium(EquilibriumKind::gaussian, 0.0, 0.0);
    SpectralWorkspace ws(sg, 96, 32);
    std::vector<double> etas;
    for (int i = 0; i < 13; ++i) etas.push_back(1e-2 * std::pow(1e-2, i / 12.0));
    auto branches = track_branches(ws, etas);
    const AcousticConstants ac = acoustic_constants(ws.ds, &branches[1]);
    CHECK(ac.D == Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-10));
    // the limit integral reproduces +D for the plus branch
    CHECK(ac.im_mu_bar == Approx(ac.D).epsilon(1e-9));
    CHECK(std::abs(ac.im_fit - ac.im_mu_bar) <= 0.01 * ac.im_mu_bar);

    // sign symmetry: the minus branch carries the opposite drift
    const auto& last_p = branches[1].samples.back();
    const auto& last_m = branches[2].samples.back();
    CHECK(last_p.mu.imag() == Approx(-last_m.mu.imag()).epsilon(1e-10));

    // polynomial cross-check per the (8, 0) set
    const EquilibriumSpec sp = build_equilibrium(EquilibriumKind::polynomial, 8.0, 0.0);
    SpectralWorkspace wsp(sp, 128, 48);
    auto bp = track_branches(wsp, etas);
    const AcousticConstants acp = acoustic_constants(wsp.ds, &bp[1]);
    CHECK(std::abs(acp.im_fit - acp.im_mu_bar) <= 0.01 * std::abs(acp.im_mu_bar));
}

TEST_CASE("diffusion constants are positive and refinement-stable") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::gaussian, 0.0, 0.0);
    const ScalingPrediction pred = theoretical_exponents(s.alpha, s.beta);
    std::vector<double> etas;
    for (int i = 0; i < 13; ++i) etas.push_back(1e-2 * std::pow(1e-2, i / 12.0));
    auto run = [&](int nr, int nu) {
        SpectralWorkspace ws(s, nr, nu);
        auto br = track_branches(ws, etas);
        return diffusion_constants(br[0], br[3], pred, {1e-4, 1e-2});
    };
    const DiffusionConstants a = run(48, 24), b = run(96, 48);
    CHECK(a.kappa_theta > 0.0);
    CHECK(a.kappa_transversal > 0.0);
    CHECK(std::abs(a.kappa_theta - b.kappa_theta) <= 0.01 * b.kappa_theta);
    CHECK(std::abs(a.kappa_transversal - b.kappa_transversal) <= 0.01 * b.kappa_transversal);
    // gaussian amplitudes are the classical unit transport coefficients
    CHECK(a.kappa_theta == Approx(1.0).epsilon(2e-3));
    CHECK(a.kappa_transversal == Approx(1.0).epsilon(2e-3));
}

TEST_CASE("fit window stability: amplitude shifts below 5 percent") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::polynomial, 5.5, 0.0);
    SpectralWorkspace ws(s, 320, 64, RadialMap::algebraic, 2.0);
    std::vector<double> etas;
    for (int i = 0; i < 28; ++i) etas.push_back(3e-2 * std::pow(10.0, -2.5 * i / 27.0));
    auto br = track_branches(ws, etas);
    const ScalingFit f1 = fit_power_law_branch(br[0], {3e-4, 3e-3});
    const ScalingFit f2 = fit_power_law_branch(br[0], {6e-4, 6.1e-3});
    // compare amplitudes at a common reference eta inside both windows
    const double ref = 1e-3;
    const double a1 = f1.amplitude * std::pow(ref, f1.exponent);
    const double a2 = f2.amplitude * std::pow(ref, f2.exponent);
    CHECK(std::abs(a1 / a2 - 1.0) <= 0.05);
}

TEST_CASE("rescaled-mode diagnostic stays bounded") {
    const EquilibriumSpec s = build_equilibrium(EquilibriumKind::polynomial, 5.5, 0.0);
    SpectralWorkspace ws(s, 160, 48, RadialMap::algebraic, 2.0);
    double prev = 0.0;
    bool first = true;
    for (double eta : {1e-2, 1e-3, 1e-4}) {
        const LongitudinalRoots lr = solve_longitudinal(ws.ds, eta);
        const Eigenmode em = eigenmode_coefficients(ws, eta, lr.mu0, 0);
        const RescaledModeDiagnostic d = rescaled_mode_diagnostic(
            ws, eta, lr.mu0, Eigen::Vector3cd(em.C[0], em.C[1], em.C[4]));
        CHECK(d.sup_ratio > 0.0);
        if (!first) CHECK(d.sup_ratio <= 10.0 * prev + 10.0);
        prev = d.sup_ratio;
        first = false;
    }
}
