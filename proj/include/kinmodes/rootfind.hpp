#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "kinmodes/errors.hpp"

namespace kinmodes {

struct RootResult {
    std::complex<double> root{0.0, 0.0};
    double residual = 0.0; // |f(root)|
    int iterations = 0;
};

// Damped Newton for an analytic scalar function with exact derivative,
// falling back to a Muller step when the Newton direction stagnates. The
// function returns (f, f').
inline RootResult
find_root(const std::function<std::pair<std::complex<double>, std::complex<double>>(
              std::complex<double>)>& fdf,
          std::complex<double> seed, double step_tol = 1e-14, int max_iter = 80) {
    using C = std::complex<double>;
    C mu = seed;
    auto [f, df] = fdf(mu);
    double af = std::abs(f);
    C prev_mu[2] = {mu, mu};
    C prev_f[2] = {f, f};
    int stalls = 0;

    for (int it = 1; it <= max_iter; ++it) {
        if (std::abs(df) == 0.0) throw RootNotConverged("find_root: vanishing derivative");
        C step = f / df;
        double lam = 1.0;
        C mu_new = mu - step;
        auto [fn, dfn] = fdf(mu_new);
        while (std::abs(fn) > af && lam > 1.0 / 1024.0) {
            lam *= 0.5;
            mu_new = mu - lam * step;
            std::tie(fn, dfn) = fdf(mu_new);
        }
        if (std::abs(fn) > af) {
            // Newton made no progress: one Muller step through the last three
            // iterates, then continue.
            ++stalls;
            const C x0 = prev_mu[1], x1 = prev_mu[0], x2 = mu;
            const C f0 = prev_f[1], f1 = prev_f[0], f2 = f;
            const C h1 = x1 - x0, h2 = x2 - x1;
            if (std::abs(h1) > 0 && std::abs(h2) > 0 && std::abs(h1 + h2) > 0) {
                const C d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
                const C a = (d2 - d1) / (h1 + h2);
                const C b = a * h2 + d2;
                const C disc = std::sqrt(b * b - 4.0 * f2 * a);
                const C den = (std::abs(b + disc) > std::abs(b - disc)) ? b + disc : b - disc;
                if (std::abs(den) > 0) {
                    mu_new = x2 - 2.0 * f2 / den;
                    std::tie(fn, dfn) = fdf(mu_new);
                }
            }
            if (stalls > 4) return {mu, af, it};
        }
        prev_mu[1] = prev_mu[0];
        prev_f[1] = prev_f[0];
        prev_mu[0] = mu;
        prev_f[0] = f;
        const double moved = std::abs(mu_new - mu);
        mu = mu_new;
        f = fn;
        df = dfn;
        af = std::abs(f);
        if (moved <= step_tol * (1.0 + std::abs(mu))) return {mu, af, it};
    }
    throw RootNotConverged("find_root: no convergence in " + std::to_string(max_iter) +
                           " iterations (|f| = " + std::to_string(af) + ")");
}

} // namespace kinmodes
