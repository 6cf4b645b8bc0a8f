#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kinmodes/collision.hpp"
#include "kinmodes/dispersion.hpp"
#include "kinmodes/operator_matrix.hpp"

namespace kinmodes {

using Vector5c = Eigen::Matrix<Complex, 5, 1>;

enum class BranchLabel { boussinesq, acoustic_plus, acoustic_minus, transversal };

inline std::string to_string(BranchLabel l) {
    switch (l) {
    case BranchLabel::boussinesq: return "boussinesq";
    case BranchLabel::acoustic_plus: return "acoustic_plus";
    case BranchLabel::acoustic_minus: return "acoustic_minus";
    default: return "transversal";
    }
}

struct BranchSample {
    double eta = 0.0;
    Complex mu{0.0, 0.0};
    Vector5c C = Vector5c::Zero(); // moments (rho, m1, m2, m3, theta), sigma = e1
    double defect = 0.0;           // ||phi - P phi||_{-beta}
    double residual = 0.0;         // eigen-equation residual in L^2(M)
};

struct SpectralBranch {
    BranchLabel label = BranchLabel::boussinesq;
    std::vector<BranchSample> samples; // ordered by decreasing eta
};

// Shared spectral state for one equilibrium at one resolution: the collision
// operator (grids + projection bases) plus the reduced dispersion system.
struct SpectralWorkspace {
    CollisionOperator op;
    DispersionSystem ds;

    SpectralWorkspace(const EquilibriumSpec& spec, int n_radial, int n_angular,
                      RadialMap map = RadialMap::algebraic, double map_scale = 1.0)
        : op(make_collision_operator(spec, n_radial, n_angular, map, map_scale)),
          ds(op.grid(0), op.grid(1)) {}

    // per-sector resolutions (the m = 0 sector usually needs the deeper grid)
    SpectralWorkspace(const EquilibriumSpec& spec, int nr0, int nu0, RadialMap map0, double scale0,
                      int nr1, int nu1, RadialMap map1, double scale1)
        : op(spec, build_grid(spec, nr0, nu0, 0, map0, scale0),
             build_grid(spec, nr1, nu1, 1, map1, scale1)),
          ds(op.grid(0), op.grid(1)) {}

    const EquilibriumSpec& spec() const { return op.spec(); }
};

// ---------------------------------------------------------------------------
// Longitudinal and transversal root solves
// ---------------------------------------------------------------------------

struct LongitudinalRoots {
    Complex mu0{0.0, 0.0};
    Complex mu_plus{0.0, 0.0};
    Complex mu_minus{0.0, 0.0};
    double residual = 0.0; // max |det| over the three roots
};

namespace detail {

// Continuation seeds at a target eta, produced by a short ascending sweep
// from the asymptotic regime where {0, +iD eta, -iD eta} are in-basin. Needed
// because for stiff acoustic speeds the asymptotic seed at a large eta falls
// into the attraction basin of the real root.
struct SeedSet {
    Complex b, ap, am, t;
};

inline SeedSet bootstrap_seeds(const DispersionSystem& ds, double eta_target) {
    const double D = ds.acoustic_speed();
    double e0 = std::min(1e-5, 0.01 * eta_target);
    // keep the first acoustic seed well inside the asymptotic regime
    e0 = std::min(e0, 1e-3 / std::max(D, 1.0));
    SeedSet s{Complex(0, 0), Complex(0, D * e0), Complex(0, -D * e0), Complex(0, 0)};
    if (eta_target <= e0) {
        s.ap = Complex(0, D * eta_target);
        s.am = Complex(0, -D * eta_target);
        return s;
    }
    const int steps = 14;
    const double ratio = std::pow(eta_target / e0, 1.0 / steps);
    double eta = e0;
    Complex prev_ap = s.ap, prev_t = s.t, prev_b = s.b;
    for (int k = 0; k <= steps; ++k) {
        s.b = ds.solve_det(eta, k == 0 ? Complex(0, 0) : prev_b * (ratio * ratio)).root;
        s.ap = ds.solve_det(eta, k == 0 ? s.ap : prev_ap * ratio).root;
        if (std::abs(s.ap.imag()) < 1e-3 * std::abs(s.ap))
            s.ap = ds.solve_det_deflated(eta, prev_ap * ratio, {s.b}).root;
        s.t = ds.solve_transversal_eq(eta, k == 0 ? Complex(0, 0) : prev_t * (ratio * ratio)).root;
        prev_ap = s.ap;
        prev_t = s.t;
        prev_b = s.b;
        eta *= ratio;
    }
    s.am = std::conj(s.ap);
    return s;
}

} // namespace detail

// Three roots of det calA(eta, .) = 0 near the origin. Seeds default to a
// continuation bootstrap; explicit seeds skip it.
inline LongitudinalRoots solve_longitudinal(const DispersionSystem& ds, double eta,
                                            const Complex* seed_b = nullptr,
                                            const Complex* seed_ap = nullptr,
                                            const Complex* seed_am = nullptr) {
    if (!(eta > 0.0)) throw ParameterDomain("solve_longitudinal: eta must be positive");
    detail::SeedSet seeds;
    if (seed_b && seed_ap && seed_am) {
        seeds.b = *seed_b;
        seeds.ap = *seed_ap;
        seeds.am = *seed_am;
    } else {
        seeds = detail::bootstrap_seeds(ds, eta);
    }
    LongitudinalRoots out;
    RootResult rb = ds.solve_det(eta, seeds.b);
    out.mu0 = rb.root;
    RootResult rp = ds.solve_det(eta, seeds.ap);
    // acoustic solve collapsing onto the real branch: deflate and retry
    if (std::abs(rp.root - rb.root) < 1e-8 * (1.0 + std::abs(rb.root)))
        rp = ds.solve_det_deflated(eta, seeds.ap, {rb.root});
    out.mu_plus = rp.root;
    RootResult rm = ds.solve_det(eta, seeds.am);
    if (std::abs(rm.root - rb.root) < 1e-8 * (1.0 + std::abs(rb.root)))
        rm = ds.solve_det_deflated(eta, seeds.am, {rb.root});
    out.mu_minus = rm.root;
    out.residual = std::max({rb.residual, rp.residual, rm.residual});

    const double tol = 1e-9 * (1.0 + std::abs(out.mu_plus));
    if (std::abs(out.mu_plus - out.mu_minus) < tol && std::abs(out.mu_plus.imag()) > tol)
        throw RootCollision("solve_longitudinal: acoustic pair collapsed at eta = " +
                            std::to_string(eta));
    return out;
}

inline Complex solve_transversal(const DispersionSystem& ds, double eta,
                                 const Complex* seed = nullptr) {
    if (!(eta > 0.0)) throw ParameterDomain("solve_transversal: eta must be positive");
    Complex s = seed ? *seed : detail::bootstrap_seeds(ds, eta).t;
    return ds.solve_transversal_eq(eta, s).root;
}

// Exactly 5 eigenvalues (with multiplicity) of the discretized generator in
// B(0, r_bar): 3 longitudinal plus the doubly counted transversal one. The
// census is an argument-principle count along the circle, so it detects
// stray or missing eigenvalues independently of the Newton solves.
inline std::vector<Complex> fluid_eigenvalues(const DispersionSystem& ds, double eta,
                                              double r_bar = 0.5, double eta_bar = 0.1) {
    if (!(eta >= 0.0) || eta > eta_bar)
        throw ParameterDomain("fluid_eigenvalues: require 0 <= eta <= eta_bar");
    if (eta == 0.0) return {Complex(0, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0)};
    const CensusResult census = eigenvalue_census(ds, eta, r_bar);
    if (census.total != 5)
        throw CountMismatch("fluid_eigenvalues: found " + std::to_string(census.total) +
                            " eigenvalues in B(0, " + std::to_string(r_bar) +
                            ") at eta = " + std::to_string(eta) +
                            " (eta too large or grid too coarse)");
    LongitudinalRoots lr = solve_longitudinal(ds, eta);
    const Complex mt = solve_transversal(ds, eta);
    for (Complex m : {lr.mu0, lr.mu_plus, lr.mu_minus, mt})
        if (std::abs(m) >= r_bar)
            throw CountMismatch("fluid_eigenvalues: solved root left the census ball");
    return {lr.mu0, lr.mu_plus, lr.mu_minus, mt, mt};
}

// ---------------------------------------------------------------------------
// Eigenmode coefficients, defect and residual
// ---------------------------------------------------------------------------

struct Eigenmode {
    Vector5c C = Vector5c::Zero();
    GridFunction phi; // reconstructed mode, phi gauge
    double defect = 0.0;
    double residual = 0.0;
};

namespace detail {

// canonical complex phase: minimize the imaginary mass of the coefficient
// vector in the weighted metric, then pin the sign on the dominant real entry
inline void canonicalize_phase(Eigen::Vector3cd& c, double energy_metric) {
    const Complex s =
        c[0] * c[0] + c[1] * c[1] + energy_metric * c[2] * c[2];
    if (std::abs(s) > 0) c *= std::exp(Complex(0.0, -0.5 * std::arg(s)));
    int imax = 0;
    double best = 0.0;
    for (int i = 0; i < 3; ++i)
        if (std::abs(c[i].real()) > best) {
            best = std::abs(c[i].real());
            imax = i;
        }
    if (c[imax].real() < 0) c = -c;
    // prefer positive energy coefficient when it is significant
    if (std::abs(c[2].real()) > 1e-8 && c[2].real() < 0) c = -c;
}

} // namespace detail

// Null vector of the reduced system at an accepted root, the reconstructed
// mode phi = G(P phi), its defect and the eigen-equation residual. The
// normalization is ||P phi||_{-beta} = 1.
inline Eigenmode eigenmode_coefficients(const SpectralWorkspace& ws, double eta, Complex mu,
                                        int sector, int transverse_direction = 0) {
    const EquilibriumSpec& s = ws.spec();
    const double emetric = 3.0 / (s.m4 - 3.0); // ||E2||^2_{-beta}
    Eigenmode out;
    if (sector == 1) {
        // transversal: C0 = C4 = 0, momentum perpendicular to sigma
        out.C[2 + transverse_direction] = 1.0;
        const GridPtr& g = ws.op.grid(1);
        const Eigen::ArrayXcd mult = DispersionSystem::multiplier(ws.ds.b(1), eta, mu);
        GridFunction P = profile_vperp(g);
        out.phi = GridFunction(g, WeightGauge::phi);
        out.phi.values = (P.values.array() * (1.0 + mult)).matrix();
        GridFunction diff(g, WeightGauge::phi);
        diff.values = (P.values.array() * mult).matrix();
        out.defect = norm(diff, -s.beta);
        GridFunction Pphi = ws.op.project(out.phi);
        GridFunction res(g, WeightGauge::phi);
        res.values = (Pphi.values - P.values).array() * g->vpow(-s.beta);
        out.residual = norm(res);
        return out;
    }

    const Matrix3c A = ws.ds.matrix(eta, mu);
    Eigen::JacobiSVD<Matrix3c> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(sv[0], 1e-300);
    if (sv[1] / scale < 1e-7)
        throw DegenerateNullspace("eigenmode_coefficients: reduced matrix rank deficiency > 1");
    if (sv[2] / scale > 1e-5)
        throw DegenerateNullspace(
            "eigenmode_coefficients: reduced matrix is regular ((eta, mu) is not a root)");
    Eigen::Vector3cd c = svd.matrixV().col(2);

    // normalize ||P phi||^2 = |C0|^2 + |Cs|^2 + emetric |C4|^2 = 1
    const double nrm = std::sqrt(std::norm(c[0]) + std::norm(c[1]) + emetric * std::norm(c[2]));
    c /= nrm;
    detail::canonicalize_phase(c, emetric);

    out.C[0] = c[0];
    out.C[1] = c[1];
    out.C[4] = c[2];

    const GridPtr& g = ws.op.grid(0);
    GridFunction P(g, WeightGauge::phi);
    P.values = (c[0] * profile_one(g).values + c[1] * profile_v1(g).values +
                c[2] * profile_energy(g).values);
    const Eigen::ArrayXcd mult = DispersionSystem::multiplier(ws.ds.b(0), eta, mu);
    out.phi = GridFunction(g, WeightGauge::phi);
    out.phi.values = (P.values.array() * (1.0 + mult)).matrix();
    GridFunction diff(g, WeightGauge::phi);
    diff.values = (P.values.array() * mult).matrix();
    out.defect = norm(diff, -s.beta);

    // residual of L phi + i eta v1 phi + mu <v>^{-beta} phi in L^2(M); by the
    // reconstruction identity this equals <v>^{-beta} (P(phi) - C.E)
    GridFunction Pphi = ws.op.project(out.phi);
    GridFunction res(g, WeightGauge::phi);
    res.values = (Pphi.values - P.values).array() * g->vpow(-s.beta);
    out.residual = norm(res);
    return out;
}

// ---------------------------------------------------------------------------
// Branch continuation
// ---------------------------------------------------------------------------

struct TrackOptions {
    double trust_factor = 10.0; // BranchJump threshold on the secant prediction
    bool with_modes = true;     // compute coefficients/defect per sample
};

// Track the four labeled branches over a descending eta grid. Labels are
// assigned at the first (largest) eta by realness, the sign of Im mu and the
// sector; afterwards secant continuation follows each branch.
inline std::array<SpectralBranch, 4> track_branches(const SpectralWorkspace& ws,
                                                    const std::vector<double>& etas_desc,
                                                    const TrackOptions& opt = {}) {
    if (etas_desc.size() < 2) throw InsufficientRange("track_branches: need at least 2 eta values");
    for (std::size_t i = 1; i < etas_desc.size(); ++i)
        if (!(etas_desc[i] < etas_desc[i - 1]))
            throw ParameterDomain("track_branches: eta grid must be strictly decreasing");

    const DispersionSystem& ds = ws.ds;
    std::array<SpectralBranch, 4> out;
    out[0].label = BranchLabel::boussinesq;
    out[1].label = BranchLabel::acoustic_plus;
    out[2].label = BranchLabel::acoustic_minus;
    out[3].label = BranchLabel::transversal;

    detail::SeedSet seeds = detail::bootstrap_seeds(ds, etas_desc.front());
    std::array<std::vector<Complex>, 4> hist; // b, ap, am, t

    auto predict = [&](int bi, double eta, double e1, double e2) -> Complex {
        const auto& h = hist[bi];
        if (h.size() >= 2 && e1 != e2)
            return h.back() + (h.back() - h[h.size() - 2]) * (eta - e1) / (e1 - e2);
        if (!h.empty()) return h.back();
        switch (bi) {
        case 1: return seeds.ap;
        case 2: return seeds.am;
        case 3: return seeds.t;
        default: return seeds.b;
        }
    };

    double e1 = 0.0, e2 = 0.0;
    for (double eta : etas_desc) {
        Complex sb = predict(0, eta, e1, e2);
        Complex sp = predict(1, eta, e1, e2);
        Complex sm = predict(2, eta, e1, e2);
        Complex st = predict(3, eta, e1, e2);
        LongitudinalRoots lr = solve_longitudinal(ds, eta, &sb, &sp, &sm);
        const Complex mt = solve_transversal(ds, eta, &st);
        const Complex found[4] = {lr.mu0, lr.mu_plus, lr.mu_minus, mt};
        for (int bi = 0; bi < 4; ++bi) {
            if (hist[bi].size() >= 2) {
                const Complex pred = predict(bi, eta, e1, e2);
                const double step = std::abs(pred - hist[bi].back());
                const double dev = std::abs(found[bi] - hist[bi].back());
                if (dev > opt.trust_factor * std::max(step, 1e-13 * (1.0 + std::abs(pred))))
                    throw BranchJump("track_branches: " + to_string(out[bi].label) +
                                     " jumped at eta = " + std::to_string(eta));
            }
            hist[bi].push_back(found[bi]);
            BranchSample smp;
            smp.eta = eta;
            smp.mu = found[bi];
            if (opt.with_modes) {
                const int sector = (bi == 3) ? 1 : 0;
                Eigenmode em = eigenmode_coefficients(ws, eta, found[bi], sector);
                smp.C = em.C;
                smp.defect = em.defect;
                smp.residual = em.residual;
            }
            out[bi].samples.push_back(smp);
        }
        e2 = e1;
        e1 = eta;
    }
    return out;
}

} // namespace kinmodes
