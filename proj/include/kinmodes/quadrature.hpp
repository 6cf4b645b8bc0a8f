#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kinmodes/errors.hpp"

namespace kinmodes {

struct Quadrature1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on (-1, 1). Nodes by Newton iteration on P_n with the
// Tricomi initial guess; converges to machine precision in a handful of steps.
inline Quadrature1D gauss_legendre(int n) {
    if (n < 1) throw ParameterDomain("gauss_legendre: n must be positive");
    Quadrature1D q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // evaluate P_n(x) and P_n'(x) by the three-term recurrence
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.nodes[k] = -x;
        q.nodes[n - 1 - k] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.weights[k] = w;
        q.weights[n - 1 - k] = w;
    }
    return q;
}

// Same rule shifted to (a, b).
inline Quadrature1D gauss_legendre(int n, double a, double b) {
    Quadrature1D q = gauss_legendre(n);
    const double h = 0.5 * (b - a), m = 0.5 * (b + a);
    for (int i = 0; i < n; ++i) {
        q.nodes[i] = m + h * q.nodes[i];
        q.weights[i] *= h;
    }
    return q;
}

// tanh-sinh rule on (0, 1); converges exponentially even with algebraic
// endpoint singularities, which rational compactifications of polynomial
// tails always produce.
inline Quadrature1D tanh_sinh_01(int levels = 300, double h = 0.02) {
    const double pi_half = 1.57079632679489661923;
    Quadrature1D q;
    for (int k = -levels; k <= levels; ++k) {
        const double t = k * h;
        const double s = pi_half * std::sinh(t);
        const double c = std::cosh(s);
        const double w = h * pi_half * std::cosh(t) / (c * c);
        if (w < 1e-300) continue;
        const double x = 0.5 * (1.0 + std::tanh(s));
        if (x <= 0.0 || x >= 1.0) continue;
        q.nodes.push_back(x);
        q.weights.push_back(0.5 * w);
    }
    return q;
}

enum class RadialMap {
    algebraic, // r = R0 * s / (1 - s)
    tangent,   // r = R0 * tan(pi s / 2)
};

inline RadialMap radial_map_from_string(const std::string& s) {
    if (s == "algebraic") return RadialMap::algebraic;
    if (s == "tangent") return RadialMap::tangent;
    throw ConfigError("unknown radial_map '" + s + "' (expected algebraic|tangent)");
}

inline std::string to_string(RadialMap m) {
    return m == RadialMap::algebraic ? "algebraic" : "tangent";
}

// Compactified rule on (0, inf): Gauss-Legendre in s on (0, 1) pushed through
// the chosen map. Weights carry the map Jacobian, nothing else.
inline Quadrature1D radial_rule(int n, RadialMap map, double scale) {
    if (scale <= 0.0) throw ParameterDomain("radial_rule: scale must be positive");
    Quadrature1D s = gauss_legendre(n, 0.0, 1.0);
    Quadrature1D q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
        const double si = s.nodes[i];
        if (map == RadialMap::algebraic) {
            q.nodes[i] = scale * si / (1.0 - si);
            q.weights[i] = s.weights[i] * scale / ((1.0 - si) * (1.0 - si));
        } else {
            const double c = std::cos(0.5 * pi * si);
            q.nodes[i] = scale * std::tan(0.5 * pi * si);
            q.weights[i] = s.weights[i] * scale * 0.5 * pi / (c * c);
        }
    }
    return q;
}

// Composite rule on (lo, hi) made of per-decade Gauss panels; used where an
// integrand lives on a known finite window (cutoff transition regions).
inline Quadrature1D panel_rule(double lo, double hi, int pts_per_panel, int panels) {
    Quadrature1D out;
    const double ratio = std::pow(hi / lo, 1.0 / panels);
    double a = lo;
    for (int p = 0; p < panels; ++p) {
        double b = (p + 1 == panels) ? hi : a * ratio;
        Quadrature1D g = gauss_legendre(pts_per_panel, a, b);
        out.nodes.insert(out.nodes.end(), g.nodes.begin(), g.nodes.end());
        out.weights.insert(out.weights.end(), g.weights.begin(), g.weights.end());
        a = b;
    }
    return out;
}

// Semi-infinite composite rule starting at r0: panels on [r0, r0*4^k] plus an
// algebraically mapped tail. Serves the cutoff-amplitude integrals whose
// support starts at R and decays polynomially.
inline Quadrature1D tail_rule(double r0, int pts_per_panel = 24, int panels = 10) {
    Quadrature1D out = panel_rule(r0, r0 * std::pow(4.0, panels), pts_per_panel, panels);
    // map the remaining (r1, inf) with r = r1 / (1 - s)
    const double r1 = r0 * std::pow(4.0, panels);
    Quadrature1D s = gauss_legendre(pts_per_panel, 0.0, 1.0);
    for (int i = 0; i < pts_per_panel; ++i) {
        const double si = s.nodes[i];
        out.nodes.push_back(r1 / (1.0 - si));
        out.weights.push_back(s.weights[i] * r1 / ((1.0 - si) * (1.0 - si)));
    }
    return out;
}

} // namespace kinmodes
