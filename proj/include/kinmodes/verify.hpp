#pragma once

#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kinmodes/amplitude.hpp"
#include "kinmodes/config.hpp"
#include "kinmodes/evolution.hpp"
#include "kinmodes/report.hpp"
#include "kinmodes/scaling.hpp"
#include "kinmodes/spectral.hpp"

namespace kinmodes {

struct CriterionResult {
    int id = 0;
    std::string name;
    std::string set;
    bool applicable = true;
    bool pass = false;
    std::string detail;
};

struct Tolerances {
    std::map<std::string, double> t = {
        {"census_runtime_s", 60.0}, {"gauss_D_rel", 1e-3},    {"gauss_slope", 0.05},
        {"gauss_im_const", 0.01},   {"slope", 0.1},           {"im_slope", 0.02},
        {"trans_ratio_factor", 3.0}, {"defect_band", 3.0},    {"crossval_rel", 1e-6},
        {"limit_mode", 1e-3},       {"amplitude_slope", 0.1}, {"zeta_fit", 0.1},
        {"kappa_rel", 0.05},        {"residual_factor", 10.0}, {"energy_slack", 1e-10},
    };

    double operator()(const std::string& key) const { return t.at(key); }

    static Tolerances resolve(const RunConfig& cfg, bool fast) {
        Tolerances tol;
        for (const auto& [k, v] : cfg.tolerances) tol.t[k] = v;
        if (fast) {
            // --fast relaxes every tolerance by a factor 2: upper bounds
            // double, lower-bound factors halve, the runtime budget stays
            for (auto& [k, v] : tol.t) {
                if (k == "census_runtime_s") continue;
                if (k == "trans_ratio_factor" || k == "residual_factor") v *= 0.5;
                else v *= 2.0;
            }
        }
        return tol;
    }
};

// Everything the criteria need from one parameter set.
struct SetArtifacts {
    RunConfig cfg;
    EquilibriumSpec spec;
    ScalingPrediction pred;
    std::vector<double> etas; // descending
    std::array<SpectralBranch, 4> branches;
    double D = 0.0;
    double census_seconds = 0.0;
    std::vector<CensusResult> census;
    double crossval_max_rel = 0.0;
    AmplitudeReport amplitude;
    DiffusionConstants diffusion;
    std::vector<MomentTrajectory> zeta_family; // (eps_min, xi_j)
    std::vector<MomentTrajectory> eps_family;  // (eps_i, xi_front)
    std::vector<Complex> macro_mu0;            // mu0 on the macro grid per zeta trajectory
    std::vector<Complex> macro_mut;
};

namespace detail {

inline std::vector<double> descending_etas(const SpectralConfig& s) {
    std::vector<double> e(s.n_eta);
    for (int i = 0; i < s.n_eta; ++i)
        e[i] = s.eta_max * std::pow(s.eta_min / s.eta_max,
                                    static_cast<double>(i) / (s.n_eta - 1));
    return e;
}

inline FitWindow slope_window(const RunConfig& cfg) {
    if (cfg.spectral.fit_lo > 0 && cfg.spectral.fit_hi > cfg.spectral.fit_lo)
        return {cfg.spectral.fit_lo, cfg.spectral.fit_hi};
    return {cfg.spectral.eta_min, 10.0 * cfg.spectral.eta_min};
}

// least-squares decay rate of log|series| over the middle of the trajectory
inline double decay_rate(const std::vector<double>& t, const std::vector<Complex>& v) {
    std::vector<double> ts, ls;
    const double v0 = std::abs(v.front());
    for (std::size_t k = t.size() / 5; k < t.size(); ++k) {
        if (std::abs(v[k]) < 1e-13 * v0) break;
        ts.push_back(t[k]);
        ls.push_back(std::log(std::abs(v[k])));
    }
    if (ts.size() < 4) throw InsufficientRange("decay_rate: trajectory too short");
    const int n = static_cast<int>(ts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += ts[i];
        sy += ls[i];
        sxx += ts[i] * ts[i];
        sxy += ts[i] * ls[i];
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Per-set computation
// ---------------------------------------------------------------------------

inline SetArtifacts compute_set_artifacts(const RunConfig& cfg) {
    SetArtifacts art;
    art.cfg = cfg;
    art.spec = build_equilibrium(cfg.equilibrium);
    art.pred = theoretical_exponents(art.spec.alpha, art.spec.beta);
    art.etas = detail::descending_etas(cfg.spectral);

    // production branches
    SpectralWorkspace ws(art.spec, cfg.grid.n_radial, cfg.grid.n_angular,
                         radial_map_from_string(cfg.grid.radial_map), cfg.grid.map_scale);
    art.D = ws.ds.acoustic_speed();
    art.branches = track_branches(ws, art.etas);

    // census + cross-validation on the pinned grid
    SpectralWorkspace wsc(art.spec, cfg.census_grid.n_radial, cfg.census_grid.n_angular,
                          radial_map_from_string(cfg.census_grid.radial_map),
                          cfg.census_grid.map_scale);
    const auto t0 = std::chrono::steady_clock::now();
    for (double eta : art.etas)
        art.census.push_back(eigenvalue_census(wsc.ds, eta, cfg.spectral.r_bar));
    art.census_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (std::size_t i = 0; i < art.etas.size(); ++i) {
        const double eta = art.etas[i];
        // dispersion roots on the census grid, seeded from the production branches
        Complex sb = art.branches[0].samples[i].mu;
        Complex sp = art.branches[1].samples[i].mu;
        Complex sm = art.branches[2].samples[i].mu;
        Complex st = art.branches[3].samples[i].mu;
        LongitudinalRoots lr = solve_longitudinal(wsc.ds, eta, &sb, &sp, &sm);
        const Complex mt = solve_transversal(wsc.ds, eta, &st);
        PerturbedOperator m0 = make_perturbed_operator(wsc.op.basis(0), eta);
        PerturbedOperator m1 = make_perturbed_operator(wsc.op.basis(1), eta);
        const std::pair<Complex, const PerturbedOperator*> pairs[4] = {
            {lr.mu0, &m0}, {lr.mu_plus, &m0}, {lr.mu_minus, &m0}, {mt, &m1}};
        for (const auto& [mu, op] : pairs) {
            const Complex mu_mat = matrix_eigenvalue_near(*op, mu);
            art.crossval_max_rel =
                std::max(art.crossval_max_rel, std::abs(mu_mat - mu) / (1.0 + std::abs(mu)));
        }
    }

    // amplitude estimates over R in [2, 32]
    {
        std::vector<double> Rs;
        for (int i = 0; i < 9; ++i) Rs.push_back(2.0 * std::pow(16.0, i / 8.0));
        art.amplitude = verify_amplitude_estimates(art.spec, Rs);
    }

    // branch-side diffusion constants over the macro-matched window
    art.diffusion = diffusion_constants(art.branches[0], art.branches[3], art.pred,
                                        {cfg.macro.kappa_lo, cfg.macro.kappa_hi});

    // macro trajectories (eigendecompositions cached per eta inside)
    SpectralWorkspace wsm(art.spec, cfg.macro.grid_m0.n_radial, cfg.macro.grid_m0.n_angular,
                          radial_map_from_string(cfg.macro.grid_m0.radial_map),
                          cfg.macro.grid_m0.map_scale, cfg.macro.grid_m1.n_radial,
                          cfg.macro.grid_m1.n_angular,
                          radial_map_from_string(cfg.macro.grid_m1.radial_map),
                          cfg.macro.grid_m1.map_scale);
    const double eps_min = cfg.macro.epsilon.back();
    const double kappa = art.diffusion.kappa_theta;
    EvolveOptions eopt;
    eopt.n_times = cfg.macro.n_times;
    eopt.eta_bar = cfg.spectral.eta_max;
    eopt.seed = cfg.macro.seed;
    for (double xi : cfg.macro.xi) {
        SectorState init = well_prepared_init(wsm.op.grid(0), wsm.op.grid(1), xi, cfg.macro.seed);
        const double T = 3.0 / (kappa * std::pow(xi, art.pred.zeta_long));
        art.zeta_family.push_back(evolve_mode(wsm, xi, eps_min, T, init, eopt));
        const double eta = eps_min * xi;
        art.macro_mu0.push_back(solve_longitudinal(wsm.ds, eta).mu0);
        art.macro_mut.push_back(solve_transversal(wsm.ds, eta));
    }
    const double xi_res = cfg.macro.xi.front();
    for (double eps : cfg.macro.epsilon) {
        SectorState init =
            well_prepared_init(wsm.op.grid(0), wsm.op.grid(1), xi_res, cfg.macro.seed);
        const double T = 3.0 / (kappa * std::pow(xi_res, art.pred.zeta_long));
        art.eps_family.push_back(evolve_mode(wsm, xi_res, eps, T, init, eopt));
    }
    return art;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

inline std::vector<CriterionResult> evaluate_criteria(const SetArtifacts& art,
                                                      const Tolerances& tol) {
    std::vector<CriterionResult> out;
    const std::string set = art.cfg.name;
    const bool gaussian = art.spec.kind == EquilibriumKind::gaussian;
    auto add = [&](int id, const std::string& name, bool applicable, bool pass,
                   const std::string& detail) {
        out.push_back({id, name, set, applicable, pass, detail});
    };
    std::ostringstream os;
    os.precision(4);

    // 1. eigenvalue census
    {
        bool ok = true;
        int bad = 0;
        for (const auto& c : art.census)
            if (c.total != 5) {
                ok = false;
                ++bad;
            }
        const bool fast_enough = art.census_seconds <= tol("census_runtime_s");
        std::ostringstream d;
        d << "count==5 at " << art.census.size() - bad << "/" << art.census.size()
          << " etas, census time " << art.census_seconds << " s";
        add(1, "eigenvalue census (5 in ball)", true, ok && fast_enough, d.str());
    }

    const FitWindow win = detail::slope_window(art.cfg);
    const ScalingFit fit_b = fit_power_law_branch(art.branches[0], win);
    const ScalingFit fit_p = fit_power_law_branch(art.branches[1], win);
    const ScalingFit fit_t = fit_power_law_branch(art.branches[3], win);
    const ScalingFit fit_im = fit_power_law_branch(art.branches[1], win, true);

    // 2. Gaussian sanity
    {
        if (!gaussian) {
            add(2, "gaussian sanity (D, slopes)", false, true, "non-gaussian set");
        } else {
            const double Dref = std::sqrt(5.0 / 3.0);
            const double drel = std::abs(art.D - Dref) / Dref;
            const auto& ap = art.branches[1].samples.back();
            const double imrel = std::abs(ap.mu.imag() / ap.eta - art.D) / art.D;
            const auto& b0 = art.branches[0].samples.back();
            const double mu0_prime = std::abs(b0.mu) / b0.eta; // -> 0 linearly in eta
            bool slopes = true;
            double worst = 0.0;
            for (int bi : {0, 1, 2, 3}) {
                const ScalingFit f = fit_power_law_branch(art.branches[bi], win);
                worst = std::max(worst, std::abs(f.exponent - 2.0));
                slopes = slopes && std::abs(f.exponent - 2.0) <= tol("gauss_slope");
            }
            // Im mu_+ / eta constant to 1 percent across the window
            double imin = 1e300, imax = 0.0;
            for (const auto& s : art.branches[1].samples)
                if (win.contains(s.eta)) {
                    imin = std::min(imin, s.mu.imag() / s.eta);
                    imax = std::max(imax, s.mu.imag() / s.eta);
                }
            const bool imconst = (imax / imin - 1.0) <= tol("gauss_im_const");
            const bool pass = drel <= tol("gauss_D_rel") && imrel <= tol("gauss_D_rel") &&
                              slopes && imconst && mu0_prime < 10.0 * b0.eta;
            std::ostringstream d;
            d << "D=" << art.D << " (|rel err|=" << drel << "), worst Re-slope dev " << worst
              << ", Im/eta spread " << imax / imin - 1.0;
            add(2, "gaussian sanity (D, slopes)", true, pass, d.str());
        }
    }

    // 3. scaling dichotomy
    {
        if (gaussian) {
            add(3, "fractional dichotomy slopes", false, true, "covered by criterion 2");
        } else {
            const double zl = art.pred.zeta_long, zt = art.pred.zeta_trans;
            bool pass = std::abs(fit_b.exponent - zl) <= tol("slope") &&
                        std::abs(fit_p.exponent - zl) <= tol("slope") &&
                        std::abs(fit_t.exponent - zt) <= tol("slope") &&
                        fit_b.r_squared >= 0.995 && fit_p.r_squared >= 0.995 &&
                        fit_t.r_squared >= 0.995;
            std::ostringstream d;
            d << "Re mu0 " << fit_b.exponent << " (target " << zl << "), Re mu+ "
              << fit_p.exponent << ", mu_t " << fit_t.exponent << " (target " << zt << ")";
            if (art.pred.fractional_long && !art.pred.fractional_trans) {
                // (5.5, 0)-type set also pins the acoustic phase slope
                pass = pass && std::abs(fit_im.exponent - 1.0) <= tol("im_slope");
                d << ", Im mu+ " << fit_im.exponent;
            }
            add(3, "fractional dichotomy slopes", true, pass, d.str());
        }
    }

    // 4. faster transversal decay over the final decade
    {
        if (!art.pred.fractional_long) {
            add(4, "transversal/longitudinal ratio decay", false, true, "classical regime");
        } else {
            const double emin = art.cfg.spectral.eta_min;
            std::vector<double> ratio;
            for (std::size_t i = 0; i < art.etas.size(); ++i)
                if (art.etas[i] <= 10.0 * emin * (1.0 + 1e-12))
                    ratio.push_back(art.branches[3].samples[i].mu.real() /
                                    art.branches[0].samples[i].mu.real());
            bool mono = true;
            for (std::size_t i = 1; i < ratio.size(); ++i) mono = mono && ratio[i] < ratio[i - 1];
            const double factor = ratio.front() / ratio.back();
            std::ostringstream d;
            d << "ratio decreased by " << factor << "x over the final decade, monotone=" << mono;
            add(4, "transversal/longitudinal ratio decay", true,
                mono && factor >= tol("trans_ratio_factor"), d.str());
        }
    }

    // 5. defect bound band
    {
        bool pass = true;
        double worst = 0.0;
        for (int bi : {0, 1, 2, 3}) {
            double lo = 1e300, hi = 0.0;
            for (const auto& s : art.branches[bi].samples) {
                if (!win.contains(s.eta)) continue;
                const double q = s.defect / std::sqrt(std::max(s.mu.real(), 1e-300));
                lo = std::min(lo, q);
                hi = std::max(hi, q);
            }
            worst = std::max(worst, hi / lo);
            pass = pass && hi / lo <= tol("defect_band");
        }
        std::ostringstream d;
        d << "worst band ratio " << worst;
        add(5, "defect ~ sqrt(Re mu) band", true, pass, d.str());
    }

    // 6. method cross-validation
    {
        std::ostringstream d;
        d << "max |mu_disp - mu_matrix|/(1+|mu|) = " << art.crossval_max_rel;
        add(6, "dispersion vs matrix eigenvalues", true,
            art.crossval_max_rel <= tol("crossval_rel"), d.str());
    }

    // 7. limiting modes
    {
        const LimitModes lm = limit_modes(art.spec);
        const EndpointExtrapolation eb = extrapolate_endpoint(art.branches[0], art.pred.zeta_long);
        const EndpointExtrapolation ep = extrapolate_endpoint(art.branches[1], art.pred.zeta_long);
        const EndpointExtrapolation em = extrapolate_endpoint(art.branches[2], art.pred.zeta_long);
        auto dev = [](const Eigen::Vector3cd& c, const Eigen::Vector3d& ref) {
            double m = 0.0;
            for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(c[i] - Complex(ref[i], 0.0)));
            return m;
        };
        const double d_b = dev(eb.C, lm.boussinesq);
        // the +/- labels may attach to either member of the conjugate pair
        const double d_p = std::min(dev(ep.C, lm.acoustic_plus), dev(ep.C, lm.acoustic_minus));
        const double d_m = std::min(dev(em.C, lm.acoustic_plus), dev(em.C, lm.acoustic_minus));
        const bool pair_split = dev(ep.C, lm.acoustic_plus) > dev(ep.C, lm.acoustic_minus)
                                    ? dev(em.C, lm.acoustic_plus) < dev(em.C, lm.acoustic_minus)
                                    : dev(em.C, lm.acoustic_minus) < dev(em.C, lm.acoustic_plus);
        const double worst = std::max({d_b, d_p, d_m});
        bool pass = worst <= tol("limit_mode") && pair_split;
        if (gaussian) {
            // closed forms of the classical limit modes
            const double s25 = std::sqrt(2.0 / 5.0), s310 = std::sqrt(3.0 / 10.0);
            pass = pass && std::abs(lm.boussinesq[0] + s25) < 1e-9 &&
                   std::abs(lm.boussinesq[2] - s25) < 1e-9 &&
                   std::abs(lm.acoustic_plus[0] - s310) < 1e-9 &&
                   std::abs(std::abs(lm.acoustic_plus[1]) - 1.0 / std::sqrt(2.0)) < 1e-9 &&
                   std::abs(lm.acoustic_plus[2] - 2.0 / std::sqrt(30.0)) < 1e-9;
        }
        std::ostringstream d;
        d << "worst endpoint deviation " << worst << " (b " << d_b << ", +/- " << d_p << "/"
          << d_m << ")";
        add(7, "limiting modes", true, pass, d.str());
    }

    // 8. amplitude estimates
    {
        if (gaussian) {
            double last = art.amplitude.families[0].norms.back();
            double first = art.amplitude.families[0].norms.front();
            std::ostringstream d;
            d << "super-polynomial decay, ||L(chi_R)|| drops " << first / std::max(last, 1e-300)
              << "x (report only)";
            add(8, "collision amplitude slopes", false, true, d.str());
        } else {
            bool pass = true;
            double worst = 0.0;
            for (const auto& f : art.amplitude.families) {
                if (f.name.rfind("chi2", 0) == 0) continue; // chi^2 variants: report only
                worst = std::max(worst, std::abs(f.slope - f.target_slope));
                pass = pass && std::abs(f.slope - f.target_slope) <= tol("amplitude_slope");
            }
            std::ostringstream d;
            d << "worst slope deviation " << worst << " over R in [2,32]";
            add(8, "collision amplitude slopes", true, pass, d.str());
        }
    }

    // 9. macroscopic limit
    {
        std::ostringstream d;
        bool pass = true;
        // (a) |xi|-exponent of the theta decay rate
        std::vector<double> xis, rates, trates;
        for (std::size_t j = 0; j < art.zeta_family.size(); ++j) {
            const auto& tr = art.zeta_family[j];
            xis.push_back(tr.xi);
            rates.push_back(detail::decay_rate(tr.times, tr.theta_hat));
            trates.push_back(detail::decay_rate(tr.times, tr.m_hat[1]));
        }
        const ScalingFit zfit = fit_power_law(xis, rates, {xis.front(), xis.back()});
        const bool a_ok = std::abs(zfit.exponent - art.pred.zeta_long) <= tol("zeta_fit");
        d << "zeta fit " << zfit.exponent << " (target " << art.pred.zeta_long << ")"
          << (a_ok ? "" : " [FAIL]");
        pass = pass && a_ok;
        // (b) kappa from trajectories vs branch amplitude
        std::vector<double> kap;
        for (std::size_t j = 0; j < xis.size(); ++j)
            kap.push_back(rates[j] / std::pow(xis[j], art.pred.zeta_long));
        std::nth_element(kap.begin(), kap.begin() + kap.size() / 2, kap.end());
        const double kappa_traj = kap[kap.size() / 2];
        const double krel = std::abs(kappa_traj / art.diffusion.kappa_theta - 1.0);
        const bool b_ok = krel <= tol("kappa_rel");
        d << "; kappa " << kappa_traj << " vs " << art.diffusion.kappa_theta << " (rel " << krel
          << ")" << (b_ok ? "" : " [FAIL]");
        pass = pass && b_ok;
        // (c) Boussinesq residual across the epsilon decade
        std::vector<double> resid;
        for (const auto& tr : art.eps_family) resid.push_back(tr.sup_boussinesq_residual);
        const double e0 = std::sqrt(art.eps_family.front().energy.front());
        const double decades =
            std::log10(art.cfg.macro.epsilon.front() / art.cfg.macro.epsilon.back());
        const double factor = std::pow(resid.front() / resid.back(), 1.0 / decades);
        const bool vacuous = resid.front() < 1e-12 * e0;
        const bool c_ok = vacuous || factor >= tol("residual_factor");
        d << "; boussinesq residual factor " << (vacuous ? 0.0 : factor) << "/decade"
          << (vacuous ? " (residual at floor)" : "") << (c_ok ? "" : " [FAIL]");
        pass = pass && c_ok;
        // (d) incompressibility bound
        double bmax = 0.0, bfirst = 0.0;
        for (std::size_t i = 0; i < art.eps_family.size(); ++i) {
            const auto& tr = art.eps_family[i];
            const double bi = tr.sup_m_parallel * tr.epsilon / tr.gamma;
            if (i == 0) bfirst = bi;
            bmax = std::max(bmax, bi);
        }
        const bool d_ok = bmax <= std::max(3.0 * bfirst, 1e-8 * e0);
        d << "; sup (eps/gamma)|sigma.m| = " << bmax << (d_ok ? "" : " [FAIL]");
        pass = pass && d_ok;
        // (e) transverse momentum behaviour
        if (!art.pred.fractional_long) {
            const ScalingFit tfit = fit_power_law(xis, trates, {xis.front(), xis.back()});
            const bool e_ok = std::abs(tfit.exponent - 2.0) <= tol("zeta_fit");
            d << "; transverse rate exponent " << tfit.exponent << " (diffusive)"
              << (e_ok ? "" : " [FAIL]");
            pass = pass && e_ok;
        } else {
            std::vector<double> dec;
            for (const auto& tr : art.eps_family)
                dec.push_back(1.0 - std::abs(tr.m_hat[1].back()) / std::abs(tr.m_hat[1].front()));
            bool mono = true;
            for (std::size_t i = 1; i < dec.size(); ++i) mono = mono && dec[i] < dec[i - 1];
            d << "; transverse relative decay " << dec.front() << " -> " << dec.back()
              << " (frozen, monotone=" << mono << ")";
            pass = pass && mono;
        }
        add(9, "macroscopic limit", true, pass, d.str());
    }

    // 10. energy estimate
    {
        bool mono = true, budget = true;
        double worst_growth = 0.0, worst_budget = 0.0;
        auto check = [&](const MomentTrajectory& tr) {
            const double E0 = tr.energy.front();
            for (std::size_t k = 1; k < tr.energy.size(); ++k) {
                const double growth = tr.energy[k] - tr.energy[k - 1];
                worst_growth = std::max(worst_growth, growth / E0);
                if (growth > tol("energy_slack") * E0) mono = false;
            }
            const double over = tr.dissipation_integral / tr.dissipation_budget - 1.0;
            worst_budget = std::max(worst_budget, over);
            if (over > 1e-6) budget = false;
        };
        for (const auto& tr : art.zeta_family) check(tr);
        for (const auto& tr : art.eps_family) check(tr);
        std::ostringstream d;
        d << "worst relative energy growth " << worst_growth << ", worst budget excess "
          << worst_budget;
        add(10, "energy estimate", true, mono && budget, d.str());
    }

    return out;
}

// ---------------------------------------------------------------------------
// Full verification across parameter sets
// ---------------------------------------------------------------------------

struct VerificationRun {
    std::vector<SetArtifacts> artifacts;
    std::vector<CriterionResult> results;
    bool all_pass = true;
};

inline VerificationRun run_verification(const std::vector<RunConfig>& configs, bool fast) {
    VerificationRun run;
    std::vector<std::future<SetArtifacts>> futs;
    const int workers = configs.empty() ? 1 : std::max(1, configs.front().workers);
    // dispatch at most `workers` sets at a time; results join in input order
    std::vector<SetArtifacts> arts(configs.size());
    for (std::size_t i = 0; i < configs.size(); i += workers) {
        futs.clear();
        for (std::size_t j = i; j < std::min(i + static_cast<std::size_t>(workers), configs.size());
             ++j)
            futs.push_back(std::async(std::launch::async, [&configs, j, fast] {
                RunConfig c = fast ? fast_variant(configs[j]) : configs[j];
                return compute_set_artifacts(c);
            }));
        for (std::size_t j = 0; j < futs.size(); ++j) arts[i + j] = futs[j].get();
    }
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const Tolerances tol = Tolerances::resolve(configs[i], fast);
        auto res = evaluate_criteria(arts[i], tol);
        for (const auto& r : res) run.all_pass = run.all_pass && (r.pass || !r.applicable);
        run.results.insert(run.results.end(), res.begin(), res.end());
        run.artifacts.push_back(std::move(arts[i]));
    }
    return run;
}

inline std::string format_table(const std::vector<CriterionResult>& results) {
    std::string s;
    for (const auto& r : results) {
        std::string status = !r.applicable ? "  --  " : (r.pass ? " PASS " : " FAIL ");
        char line[400];
        std::snprintf(line, sizeof(line), "[%s] %-12s %2d %-38s %s\n", status.c_str(),
                      r.set.c_str(), r.id, r.name.c_str(), r.detail.c_str());
        s += line;
    }
    return s;
}

} // namespace kinmodes
