#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "kinmodes/equilibrium.hpp"
#include "kinmodes/errors.hpp"
#include "kinmodes/quadrature.hpp"

namespace kinmodes {

using Complex = std::complex<double>;

// Azimuthal sector of the velocity space after rotating the wave direction
// onto e1. Sector 0 carries azimuthally invariant profiles (1, v1, |v|^2);
// sector 1 carries profiles g(r,u) cos(phi) / g(r,u) sin(phi), i.e. the
// transverse-velocity directions. The quadrature weight absorbs the full
// L^2(M) measure including the azimuthal integral (2 pi vs pi).
struct VelocityGrid {
    EquilibriumSpec spec;
    int sector = 0; // 0 or 1
    RadialMap map = RadialMap::algebraic;
    double map_scale = 1.0;
    std::vector<double> radial_nodes;
    std::vector<double> radial_weights; // includes map Jacobian only
    std::vector<double> angular_nodes;  // u in (-1, 1)
    std::vector<double> angular_weights;
    Eigen::ArrayXd w;    // measure weights, flattened radial-major
    Eigen::ArrayXd r;    // |v| per node
    Eigen::ArrayXd u;    // cos(theta) per node
    Eigen::ArrayXd vsq1; // 1 + |v|^2 per node

    int n_radial() const { return static_cast<int>(radial_nodes.size()); }
    int n_angular() const { return static_cast<int>(angular_nodes.size()); }
    Eigen::Index size() const { return w.size(); }

    Eigen::ArrayXd v1() const { return r * u; }
    Eigen::ArrayXd vperp() const { return r * (1.0 - u * u).sqrt(); }
    // <v>^p per node
    Eigen::ArrayXd vpow(double p) const { return vsq1.pow(0.5 * p); }
};

using GridPtr = std::shared_ptr<const VelocityGrid>;

inline GridPtr build_grid(const EquilibriumSpec& spec, int n_radial, int n_angular, int sector,
                          RadialMap map = RadialMap::algebraic, double map_scale = 1.0) {
    if (n_radial < 8 || n_angular < 8)
        throw ParameterDomain("build_grid: n_radial and n_angular must be >= 8");
    if (sector != 0 && sector != 1) throw ParameterDomain("build_grid: sector must be 0 or 1");

    auto g = std::make_shared<VelocityGrid>();
    g->spec = spec;
    g->sector = sector;
    g->map = map;
    g->map_scale = map_scale;

    Quadrature1D rad = radial_rule(n_radial, map, map_scale);
    Quadrature1D ang = gauss_legendre(n_angular);
    g->radial_nodes = rad.nodes;
    g->radial_weights = rad.weights;
    g->angular_nodes = ang.nodes;
    g->angular_weights = ang.weights;

    const double pi = 3.14159265358979323846;
    const double az = (sector == 0) ? 2.0 * pi : pi;
    const Eigen::Index n = static_cast<Eigen::Index>(n_radial) * n_angular;
    g->w.resize(n);
    g->r.resize(n);
    g->u.resize(n);
    g->vsq1.resize(n);
    for (int i = 0; i < n_radial; ++i) {
        const double ri = rad.nodes[i];
        const double wr = az * rad.weights[i] * ri * ri * spec.density(ri);
        for (int j = 0; j < n_angular; ++j) {
            const Eigen::Index k = static_cast<Eigen::Index>(i) * n_angular + j;
            g->w[k] = wr * ang.weights[j];
            g->r[k] = ri;
            g->u[k] = ang.nodes[j];
            g->vsq1[k] = 1.0 + ri * ri;
        }
    }
    return g;
}

// Which weight power is folded into the sampled values: phi is the plain
// velocity profile, psi = <v>^{-beta/2} phi.
enum class WeightGauge { phi, psi };

struct GridFunction {
    GridPtr grid;
    WeightGauge gauge = WeightGauge::phi;
    Eigen::VectorXcd values;

    GridFunction() = default;
    GridFunction(GridPtr g, WeightGauge wg) : grid(std::move(g)), gauge(wg) {
        values = Eigen::VectorXcd::Zero(grid->size());
    }
    GridFunction(GridPtr g, WeightGauge wg, Eigen::VectorXcd v)
        : grid(std::move(g)), gauge(wg), values(std::move(v)) {}
};

inline void require_compatible(const GridFunction& f, const GridFunction& g) {
    if (f.grid.get() != g.grid.get() || f.grid->sector != g.grid->sector)
        throw GridMismatch("grid functions live on different grids or sectors");
    if (f.gauge != g.gauge) throw GridMismatch("grid functions carry different weight gauges");
}

inline GridFunction make_function(const GridPtr& g, WeightGauge gauge,
                                  const std::function<Complex(double r, double u)>& f) {
    GridFunction out(g, gauge);
    for (Eigen::Index k = 0; k < g->size(); ++k) out.values[k] = f(g->r[k], g->u[k]);
    return out;
}

inline GridFunction make_function(const GridPtr& g,
                                  const std::function<Complex(double r, double u)>& f) {
    return make_function(g, WeightGauge::phi, f);
}

inline GridFunction to_psi(const GridFunction& f) {
    if (f.gauge == WeightGauge::psi) return f;
    GridFunction out(f.grid, WeightGauge::psi);
    out.values = f.values.array() * f.grid->vpow(-0.5 * f.grid->spec.beta);
    return out;
}

inline GridFunction to_phi(const GridFunction& f) {
    if (f.gauge == WeightGauge::phi) return f;
    GridFunction out(f.grid, WeightGauge::phi);
    out.values = f.values.array() * f.grid->vpow(0.5 * f.grid->spec.beta);
    return out;
}

// int f conj(g) <v>^k M dv over the sector, as a plain weighted sum.
inline Complex inner_product(const GridFunction& f, const GridFunction& g, double k = 0.0) {
    require_compatible(f, g);
    const VelocityGrid& G = *f.grid;
    Eigen::ArrayXcd prod = f.values.array() * g.values.array().conjugate();
    if (k != 0.0) prod *= G.vpow(k);
    return (prod * G.w).sum();
}

inline double norm(const GridFunction& f, double k = 0.0) {
    const VelocityGrid& G = *f.grid;
    Eigen::ArrayXd prod = f.values.array().abs2();
    if (k != 0.0) prod *= G.vpow(k);
    return std::sqrt((prod * G.w).sum());
}

// Standard velocity profiles (phi gauge).
inline GridFunction profile_one(const GridPtr& g) {
    return make_function(g, [](double, double) { return Complex(1.0, 0.0); });
}
inline GridFunction profile_v1(const GridPtr& g) {
    return make_function(g, [](double r, double u) { return Complex(r * u, 0.0); });
}
inline GridFunction profile_vsq(const GridPtr& g) {
    return make_function(g, [](double r, double) { return Complex(r * r, 0.0); });
}
// (|v|^2 - 3)/(m4 - 3): the energy direction normalized against (|v|^2-3)/3
inline GridFunction profile_energy(const GridPtr& g) {
    const double q = g->spec.energy_coeff();
    return make_function(g, [q](double r, double) { return Complex((r * r - 3.0) * q, 0.0); });
}
inline GridFunction profile_energy_tilde(const GridPtr& g) {
    return make_function(g, [](double r, double) { return Complex((r * r - 3.0) / 3.0, 0.0); });
}
// transverse velocity profile in sector 1 (the (r,u) part of v2 or v3)
inline GridFunction profile_vperp(const GridPtr& g) {
    return make_function(g, [](double r, double u) {
        return Complex(r * std::sqrt(std::max(1.0 - u * u, 0.0)), 0.0);
    });
}

struct Moments {
    Complex rho{0.0, 0.0};
    Complex m_parallel{0.0, 0.0};
    Complex m_transverse[2] = {{0.0, 0.0}, {0.0, 0.0}};
    Complex theta{0.0, 0.0};
};

// Macroscopic moments in the weighted pairing. f0 lives on the m = 0 sector;
// the optional pair (f1c, f1s) carries the two transverse directions on the
// m = 1 sector. All inputs must be in the phi representation.
inline Moments extract_moments(const GridFunction& f0, const GridFunction* f1c = nullptr,
                               const GridFunction* f1s = nullptr) {
    if (f0.grid->sector != 0) throw GridMismatch("extract_moments: f0 must live on sector 0");
    if (f0.gauge != WeightGauge::phi)
        throw GridMismatch("extract_moments: moments are defined on the phi representation");
    const double beta = f0.grid->spec.beta;
    Moments m;
    m.rho = inner_product(f0, profile_one(f0.grid), -beta);
    m.m_parallel = inner_product(f0, profile_v1(f0.grid), -beta);
    m.theta = inner_product(f0, profile_energy_tilde(f0.grid), -beta);
    const GridFunction* fs[2] = {f1c, f1s};
    for (int d = 0; d < 2; ++d) {
        if (!fs[d]) continue;
        if (fs[d]->grid->sector != 1)
            throw GridMismatch("extract_moments: transverse parts must live on sector 1");
        if (fs[d]->gauge != WeightGauge::phi)
            throw GridMismatch("extract_moments: moments are defined on the phi representation");
        m.m_transverse[d] = inner_product(*fs[d], profile_vperp(fs[d]->grid), -beta);
    }
    return m;
}

} // namespace kinmodes
