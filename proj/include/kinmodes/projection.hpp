#pragma once

#include <vector>

#include "kinmodes/grid.hpp"

namespace kinmodes {

// Orthonormal basis (w.r.t. <.,.>_{-beta}) of the collision invariants
// restricted to one azimuthal sector: {1, v1, |v|^2} on sector 0, {vperp} on
// sector 1. Gram-Schmidt runs on the grid so the basis is orthonormal for the
// discrete quadrature exactly, which keeps P idempotent to roundoff.
struct ProjectionBasis {
    GridPtr grid;
    std::vector<GridFunction> e; // phi gauge, orthonormal in <.,.>_{-beta}

    explicit ProjectionBasis(const GridPtr& g) : grid(g) {
        std::vector<GridFunction> raw;
        if (g->sector == 0) {
            raw.push_back(profile_one(g));
            raw.push_back(profile_v1(g));
            raw.push_back(profile_vsq(g));
        } else {
            raw.push_back(profile_vperp(g));
        }
        const double beta = g->spec.beta;
        for (auto& f : raw) {
            GridFunction q = f;
            for (const auto& ek : e)
                q.values -= inner_product(q, ek, -beta) * ek.values;
            // second pass for orthogonality at roundoff level
            for (const auto& ek : e)
                q.values -= inner_product(q, ek, -beta) * ek.values;
            q.values /= norm(q, -beta);
            e.push_back(std::move(q));
        }
    }

    int dim() const { return static_cast<int>(e.size()); }
};

// P f = sum_k <f, e_k>_{-beta} e_k on the sector of f.
inline GridFunction apply_projection(const ProjectionBasis& basis, const GridFunction& f) {
    if (f.grid.get() != basis.grid.get())
        throw GridMismatch("apply_projection: function lives on a different grid");
    if (f.gauge != WeightGauge::phi)
        throw GridMismatch("apply_projection: expected the phi representation");
    const double beta = f.grid->spec.beta;
    GridFunction out(f.grid, WeightGauge::phi);
    for (const auto& ek : basis.e) out.values += inner_product(f, ek, -beta) * ek.values;
    return out;
}

} // namespace kinmodes
