#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "kinmodes/errors.hpp"
#include "kinmodes/quadrature.hpp"

namespace kinmodes {

enum class EquilibriumKind { polynomial, gaussian };

inline EquilibriumKind equilibrium_kind_from_string(const std::string& s) {
    if (s == "polynomial") return EquilibriumKind::polynomial;
    if (s == "gaussian") return EquilibriumKind::gaussian;
    throw ConfigError("unknown equilibrium kind '" + s + "'");
}

inline std::string to_string(EquilibriumKind k) {
    return k == EquilibriumKind::polynomial ? "polynomial" : "gaussian";
}

// Radially symmetric equilibrium density, normalized so that the weighted
// moments m0 = int <v>^-beta M dv and m2 = int v1^2 <v>^-beta M dv both equal
// one. A multiplicative constant fixes m0 and a dilation of the profile fixes
// m2. The fourth moment m4 = int v1^2 |v|^2 <v>^-beta M dv is computed, not
// forced; it enters every formula downstream through the energy basis
// function (|v|^2 - 3)/(m4 - 3). The classical Gaussian case (beta = 0) has
// dilation 1, norm_const (2 pi)^{-3/2} and m4 = 5.
//
// Unweighted second moments (u2, u2r2m3) are carried as well: they build the
// eta -> 0 dispersion matrix and the acoustic speed.
struct EquilibriumSpec {
    EquilibriumKind kind = EquilibriumKind::gaussian;
    double alpha = std::numeric_limits<double>::infinity();
    double beta = 0.0;
    double dilation = 1.0;   // a > 0
    double norm_const = 0.0; // c > 0
    double m0 = 0.0;
    double m2 = 0.0;
    double m4 = 0.0;
    double u2 = 0.0;     // int v1^2 M dv          (no weight)
    double u2r2m3 = 0.0; // int v1^2 (|v|^2-3) M dv (no weight)

    // radial profile M(r) including the normalization constant
    double density(double r) const {
        const double x = r / dilation;
        if (kind == EquilibriumKind::gaussian) return norm_const * std::exp(-0.5 * x * x);
        return norm_const * std::pow(1.0 + x * x, -0.5 * (3.0 + alpha));
    }

    // basis scale for the energy direction: <E2, E2>_{-beta} = 3/(m4-3)
    double energy_coeff() const { return 1.0 / (m4 - 3.0); }
};

namespace detail {

// int_0^inf r^(2+k) <r>^(-w) shape(r/a) dr via a tanh-sinh rule in the
// compactified variable r = s/(1-s). Polynomial tails leave an algebraic
// endpoint singularity after the substitution, so the double-exponential
// rule is what keeps these moments at full precision.
inline double radial_moment(const EquilibriumSpec& s, int k, double wexp, double a,
                            const Quadrature1D& rule) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double si = rule.nodes[i];
        const double r = si / (1.0 - si);
        const double jac = 1.0 / ((1.0 - si) * (1.0 - si));
        const double x = r / a;
        const double shape = (s.kind == EquilibriumKind::gaussian)
                                 ? std::exp(-0.5 * x * x)
                                 : std::pow(1.0 + x * x, -0.5 * (3.0 + s.alpha));
        const double f = std::pow(r, 2.0 + k) * std::pow(1.0 + r * r, -0.5 * wexp) * shape;
        if (std::isfinite(f)) acc += rule.weights[i] * f * jac;
    }
    return acc;
}

} // namespace detail

inline EquilibriumSpec build_equilibrium(EquilibriumKind kind, double alpha, double beta) {
    if (beta <= -1.0) throw ParameterDomain("build_equilibrium: requires beta > -1");
    if (kind == EquilibriumKind::polynomial) {
        if (!(alpha > 5.0)) throw ParameterDomain("build_equilibrium: requires alpha > 5");
        if (!(alpha + beta > 4.0))
            throw ParameterDomain("build_equilibrium: requires alpha + beta > 4 (m4 diverges)");
    } else {
        alpha = std::numeric_limits<double>::infinity();
    }

    EquilibriumSpec s;
    s.kind = kind;
    s.alpha = alpha;
    s.beta = beta;

    const Quadrature1D rule = tanh_sinh_01();
    const double pi = 3.14159265358979323846;

    // m2(a)/m0(a) is monotone increasing in the dilation; bisect to m2 = m0.
    auto ratio = [&](double a) {
        const double i0 = detail::radial_moment(s, 0, beta, a, rule);
        const double i2 = detail::radial_moment(s, 2, beta, a, rule);
        return i2 / (3.0 * i0) - 1.0;
    };
    double lo = 1e-3, hi = 1e3;
    double flo = ratio(lo), fhi = ratio(hi);
    if (!(flo < 0.0 && fhi > 0.0))
        throw NormalizationFailure("build_equilibrium: dilation not bracketed in [1e-3, 1e3]");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = ratio(mid);
        (fm < 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-12 * mid) break;
    }
    const double a = 0.5 * (lo + hi);

    const double i0 = detail::radial_moment(s, 0, beta, a, rule);
    s.dilation = a;
    s.norm_const = 1.0 / (4.0 * pi * i0);
    s.m0 = 4.0 * pi * s.norm_const * detail::radial_moment(s, 0, beta, a, rule);
    s.m2 = (4.0 * pi / 3.0) * s.norm_const * detail::radial_moment(s, 2, beta, a, rule);
    s.m4 = (4.0 * pi / 3.0) * s.norm_const * detail::radial_moment(s, 4, beta, a, rule);
    s.u2 = (4.0 * pi / 3.0) * s.norm_const * detail::radial_moment(s, 2, 0.0, a, rule);
    const double u4 = (4.0 * pi / 3.0) * s.norm_const * detail::radial_moment(s, 4, 0.0, a, rule);
    s.u2r2m3 = u4 - 3.0 * s.u2;
    return s;
}

} // namespace kinmodes
