#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kinmodes/equilibrium.hpp"
#include "kinmodes/errors.hpp"
#include "kinmodes/spectral.hpp"

namespace kinmodes {

// Predicted eta -> 0 scaling exponents. The longitudinal pair (Boussinesq and
// the real part of the acoustic eigenvalues) turns fractional below
// alpha = 6 + beta, the transversal one below alpha = 4 + beta; the acoustic
// imaginary part is linear in every regime.
struct ScalingPrediction {
    double zeta_long = 2.0;
    double zeta_trans = 2.0;
    double im_exponent = 1.0;
    bool fractional_long = false;
    bool fractional_trans = false;
};

inline ScalingPrediction theoretical_exponents(double alpha, double beta) {
    if (beta <= -1.0) throw ParameterDomain("theoretical_exponents: requires beta > -1");
    ScalingPrediction p;
    if (std::isinf(alpha)) return p;
    if (!(alpha > 5.0) || !(alpha + beta > 4.0))
        throw ParameterDomain("theoretical_exponents: requires alpha > 5 and alpha + beta > 4");
    if (alpha < 6.0 + beta) {
        p.zeta_long = (alpha + beta - 4.0) / (1.0 + beta);
        p.fractional_long = true;
    }
    if (alpha < 4.0 + beta) {
        p.zeta_trans = (alpha + beta - 2.0) / (1.0 + beta);
        p.fractional_trans = true;
    }
    return p;
}

struct FitWindow {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct ScalingFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    double r_squared = 0.0;
    FitWindow window;
    int n_points = 0;
};

// Least-squares slope of log(value) against log(x) over the window.
inline ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& value,
                                FitWindow window) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!window.contains(x[i])) continue;
        if (!(value[i] > 0.0))
            throw NonPositiveValue("fit_power_law: values must be positive inside the window");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(value[i]));
    }
    if (lx.size() < 6)
        throw InsufficientRange("fit_power_law: need at least 6 samples in the window");
    if (!(window.hi / window.lo >= 10.0 * (1.0 - 1e-9)))
        throw InsufficientRange("fit_power_law: window must span at least one decade");
    const auto [mn, mx] = std::minmax_element(lx.begin(), lx.end());
    if (*mx - *mn < std::log(10.0) * 0.8)
        throw InsufficientRange("fit_power_law: samples must cover most of the window");
    const int n = static_cast<int>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    double ssr = 0, sst = 0;
    for (int i = 0; i < n; ++i) {
        const double p = icept + slope * lx[i];
        ssr += (ly[i] - p) * (ly[i] - p);
        sst += (ly[i] - sy / n) * (ly[i] - sy / n);
    }
    ScalingFit fit;
    fit.exponent = slope;
    fit.amplitude = std::exp(icept);
    fit.r_squared = sst > 0 ? 1.0 - ssr / sst : 1.0;
    fit.window = window;
    fit.n_points = n;
    return fit;
}

inline ScalingFit fit_power_law_branch(const SpectralBranch& br, FitWindow window,
                                       bool imaginary_part = false) {
    std::vector<double> e, v;
    for (const auto& s : br.samples) {
        e.push_back(s.eta);
        v.push_back(imaginary_part ? std::abs(s.mu.imag()) : std::abs(s.mu.real()));
    }
    return fit_power_law(e, v, window);
}

// ---------------------------------------------------------------------------
// Limiting modes at eta = 0 (m4-corrected null-space solve)
// ---------------------------------------------------------------------------

// Coefficients of the limiting fluid modes in the basis (1, v1, E2) with
// E2 = (|v|^2 - 3)/(m4 - 3), normalized so ||P phi||_{-beta} = 1. For the
// Gaussian equilibrium these reduce to the classical closed forms
// (-sqrt(2/5), 0, sqrt(2/5)) and (sqrt(3/10), -/+ 1/sqrt(2), 2/sqrt(30) * 2)
// once mapped onto the (1, v, (|v|^2-3)/2) basis.
struct LimitModes {
    Eigen::Vector3d boussinesq;
    Eigen::Vector3d acoustic_plus;
    Eigen::Vector3d acoustic_minus;
};

inline LimitModes limit_modes(const EquilibriumSpec& s) {
    const double g01 = s.u2;
    const double g12 = s.u2r2m3 / (s.m4 - 3.0);
    const double g21 = s.u2r2m3 / 3.0;
    const double D2 = g01 * g01 + g12 * g21;
    if (!(D2 > 0.0)) throw DegenerateNullspace("limit_modes: vanishing acoustic speed");
    const double D = std::sqrt(D2);
    const double met = 3.0 / (s.m4 - 3.0);

    LimitModes lm;
    // boussinesq: null vector of the limit matrix at mu~ = 0
    Eigen::Vector3d b(-g12 / g01, 0.0, 1.0);
    b /= std::sqrt(b[0] * b[0] + met * b[2] * b[2]);
    if (b[2] < 0) b = -b;
    lm.boussinesq = b;
    // acoustic: null vectors at mu~ = +/- iD; the +iD branch carries the
    // anti-parallel momentum component in this convention
    Eigen::Vector3d p(-g01 / D, 1.0, -g21 / D);
    p /= std::sqrt(p[0] * p[0] + p[1] * p[1] + met * p[2] * p[2]);
    if (p[2] < 0) p = -p;
    lm.acoustic_plus = p;
    lm.acoustic_minus = Eigen::Vector3d(p[0], -p[1], p[2]);
    return lm;
}

// highest moment represented in a coefficient vector (threshold 1e-8)
inline int highest_moment(const Eigen::Vector3d& c) {
    if (std::abs(c[2]) > 1e-8) return 2;
    if (std::abs(c[1]) > 1e-8) return 1;
    return 0;
}

// ---------------------------------------------------------------------------
// Branch-endpoint extrapolation to eta = 0
// ---------------------------------------------------------------------------

namespace detail {

inline Eigen::Vector3cd sample_C3(const BranchSample& s) {
    return Eigen::Vector3cd(s.C[0], s.C[1], s.C[4]);
}

inline Eigen::Vector3cd aitken3(const Eigen::Vector3cd& c0, const Eigen::Vector3cd& c1,
                                const Eigen::Vector3cd& c2) {
    Eigen::Vector3cd out;
    for (int i = 0; i < 3; ++i) {
        const Complex d2 = c2[i] - 2.0 * c1[i] + c0[i];
        out[i] = (std::abs(d2) > 1e-14 * (1.0 + std::abs(c2[i])))
                     ? c2[i] - (c2[i] - c1[i]) * (c2[i] - c1[i]) / d2
                     : c2[i];
    }
    return out;
}

// three-sample fit C(eta) = C0 + a eta^p + b eta^{2p} with known p
inline Eigen::Vector3cd power_extrapolate(const std::vector<BranchSample>& smp, int stride,
                                          double p) {
    const int n = static_cast<int>(smp.size());
    const int i2 = n - 1, i1 = n - 1 - stride, i0 = n - 1 - 2 * stride;
    Eigen::Matrix3d V;
    const double x0 = std::pow(smp[i0].eta, p), x1 = std::pow(smp[i1].eta, p),
                 x2 = std::pow(smp[i2].eta, p);
    V << 1.0, x0, x0 * x0, 1.0, x1, x1 * x1, 1.0, x2, x2 * x2;
    const Eigen::Matrix3d Vi = V.inverse();
    Eigen::Vector3cd out = Eigen::Vector3cd::Zero();
    const Eigen::Vector3cd cs[3] = {sample_C3(smp[i0]), sample_C3(smp[i1]), sample_C3(smp[i2])};
    for (int j = 0; j < 3; ++j) out += Vi(0, j) * cs[j];
    return out;
}

} // namespace detail

// Estimate C(eta -> 0) for a longitudinal branch tracked down to small eta.
// Two accelerators are formed -- plain Aitken and a fixed-exponent fit with
// the known leading correction power (zeta - 1 in the fractional regime, 1
// otherwise) -- each over two shifted windows; the one whose windows agree
// best wins. Returns the estimate and the cross-window stability.
struct EndpointExtrapolation {
    Eigen::Vector3cd C;     // (C0, C_sigma, C4) at eta = 0
    double stability = 0.0; // max component drift between the two windows
};

inline EndpointExtrapolation extrapolate_endpoint(const SpectralBranch& br, double zeta_long) {
    const auto& smp = br.samples;
    const int n = static_cast<int>(smp.size());
    if (n < 12) throw InsufficientRange("extrapolate_endpoint: need at least 12 samples");
    const double p = std::max(zeta_long - 1.0, 1e-3);

    // candidate accelerators, each evaluated over two shifted windows; the
    // subleading correction mixes several powers and the dominant one differs
    // per coefficient, so the winner is chosen per component
    std::vector<std::pair<Eigen::Vector3cd, Eigen::Vector3cd>> cands;
    cands.emplace_back(detail::sample_C3(smp[n - 1]), detail::sample_C3(smp[n - 2]));
    cands.emplace_back(detail::aitken3(detail::sample_C3(smp[n - 3]), detail::sample_C3(smp[n - 2]),
                                       detail::sample_C3(smp[n - 1])),
                       detail::aitken3(detail::sample_C3(smp[n - 4]), detail::sample_C3(smp[n - 3]),
                                       detail::sample_C3(smp[n - 2])));
    for (int stride : {2, 4}) {
        if (n - 1 - 2 * (stride + 1) < 0) continue;
        cands.emplace_back(detail::power_extrapolate(smp, stride, p),
                           detail::power_extrapolate(smp, stride + 1, p));
    }
    EndpointExtrapolation out;
    for (int i = 0; i < 3; ++i) {
        double best = 1e300;
        for (const auto& [a, b] : cands) {
            const double stab = std::abs(a[i] - b[i]);
            if (stab < best) {
                best = stab;
                out.C[i] = a[i];
            }
        }
        out.stability = std::max(out.stability, best);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Acoustic and diffusion constants
// ---------------------------------------------------------------------------

struct AcousticConstants {
    double D = 0.0;          // from the eta = 0 determinant expansion
    double im_mu_bar = 0.0;  // -int (v.sigma) |phi_{0,+}|^2 M dv
    double im_fit = 0.0;     // Im mu_+ / eta at the smallest tracked eta
};

inline AcousticConstants acoustic_constants(const DispersionSystem& ds,
                                            const SpectralBranch* acoustic_plus = nullptr) {
    const EquilibriumSpec& s = ds.spec();
    AcousticConstants out;
    out.D = ds.acoustic_speed();
    const LimitModes lm = limit_modes(s);
    const Eigen::Vector3d& c = lm.acoustic_plus;
    // odd part of |phi_0|^2 against v1: 2 C0 Cs <v1^2 M> + 2 Cs C4 <v1^2 E2 M>
    out.im_mu_bar = -(2.0 * c[0] * c[1] * s.u2 + 2.0 * c[1] * c[2] * s.u2r2m3 / (s.m4 - 3.0));
    if (acoustic_plus && !acoustic_plus->samples.empty()) {
        const auto& last = acoustic_plus->samples.back();
        out.im_fit = last.mu.imag() / last.eta;
    }
    return out;
}

struct DiffusionConstants {
    double kappa_theta = 0.0;       // lim mu_0 / Theta(eta)
    double kappa_transversal = 0.0; // lim mu_t / Theta~(eta)
    ScalingFit fit_theta;
    ScalingFit fit_trans;
};

inline DiffusionConstants diffusion_constants(const SpectralBranch& boussinesq,
                                              const SpectralBranch& transversal,
                                              const ScalingPrediction& pred, FitWindow window) {
    DiffusionConstants out;
    // amplitude of mu / eta^zeta over the window (slope pinned to zeta)
    auto amp = [&](const SpectralBranch& br, double zeta) {
        std::vector<double> vals;
        for (const auto& s : br.samples)
            if (window.contains(s.eta)) vals.push_back(s.mu.real() / std::pow(s.eta, zeta));
        if (vals.size() < 3)
            throw InsufficientRange("diffusion_constants: too few samples in the window");
        std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
        return vals[vals.size() / 2];
    };
    out.fit_theta = fit_power_law_branch(boussinesq, window);
    out.fit_trans = fit_power_law_branch(transversal, window);
    out.kappa_theta = amp(boussinesq, pred.zeta_long);
    out.kappa_transversal = amp(transversal, pred.zeta_trans);
    if (!(out.kappa_theta > 0.0) || !(out.kappa_transversal > 0.0))
        throw NonPositiveValue("diffusion_constants: kappa must be positive");
    return out;
}

// ---------------------------------------------------------------------------
// Rescaled-mode diagnostic (pointwise growth against the assumed bound)
// ---------------------------------------------------------------------------

struct RescaledModeDiagnostic {
    double eta = 0.0;
    double sup_ratio = 0.0; // sup_u |Phi_eta(u)| / (eta^{2/(1+beta)} + |u|^2)^{delta/2}
};

// Evaluates Phi_eta(u) = eta^{k/(1+beta)} phi_eta(eta^{-1/(1+beta)} u) on a
// fixed u-grid and reports the sup of its ratio to the assumed pointwise
// envelope with delta = alpha - 3 + 0.5 (longitudinal modes). Diagnostic
// only: the envelope is an assumption, not a computable identity.
inline RescaledModeDiagnostic rescaled_mode_diagnostic(const SpectralWorkspace& ws, double eta,
                                                       Complex mu, const Eigen::Vector3cd& C3) {
    const EquilibriumSpec& s = ws.spec();
    const double beta = s.beta;
    const double alpha = s.alpha;
    const int k = highest_moment(
        Eigen::Vector3d(std::abs(C3[0]), std::abs(C3[1]), std::abs(C3[2])));
    const double lam = std::pow(eta, 1.0 / (1.0 + beta)); // u = lam * v
    const double delta = std::isinf(alpha) ? 10.0 : (alpha - 3.0 + 0.5);
    RescaledModeDiagnostic out;
    out.eta = eta;
    const double q = s.energy_coeff();
    for (int i = 0; i <= 64; ++i) {
        const double u = 0.02 + (4.0 - 0.02) * i / 64.0; // fixed u-grid
        const double r = u / lam;
        // on-axis profile (v parallel to sigma): P(r) / ((1-mu) - i eta <r>^beta r)
        const Complex P = C3[0] + C3[1] * r + C3[2] * (r * r - 3.0) * q;
        const Complex den = (1.0 - mu) - Complex(0.0, eta * std::pow(1.0 + r * r, 0.5 * beta) * r);
        const Complex Phi = std::pow(eta, k / (1.0 + beta)) * P / den;
        const double env = std::pow(lam * lam + u * u, 0.5 * delta);
        out.sup_ratio = std::max(out.sup_ratio, std::abs(Phi) / env);
    }
    return out;
}

} // namespace kinmodes
