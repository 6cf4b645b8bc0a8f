#pragma once

#include <memory>

#include "kinmodes/grid.hpp"
#include "kinmodes/projection.hpp"

namespace kinmodes {

// Weighted BGK collision operator L f = <v>^{-beta} (P f - f), with P the
// <.,.>_{-beta}-orthogonal projection onto the collision invariants. This
// instance is self-adjoint in L^2(M), annihilates exactly the invariants and
// satisfies the weighted coercivity bound with spectral gap 1 (with equality,
// since the weighted form is I minus an orthogonal projection).
class CollisionOperator {
  public:
    CollisionOperator(const EquilibriumSpec& spec, GridPtr grid_m0, GridPtr grid_m1)
        : spec_(spec), grid_{std::move(grid_m0), std::move(grid_m1)},
          basis_{ProjectionBasis(grid_[0]), ProjectionBasis(grid_[1])} {}

    const EquilibriumSpec& spec() const { return spec_; }
    const GridPtr& grid(int sector) const { return grid_[sector]; }
    const ProjectionBasis& basis(int sector) const { return basis_[sector]; }
    double spectral_gap() const { return 1.0; }

    GridFunction project(const GridFunction& f) const {
        return apply_projection(basis_[f.grid->sector], f);
    }

    // L f in the phi representation
    GridFunction apply_L(const GridFunction& f) const {
        if (f.gauge != WeightGauge::phi)
            throw GridMismatch("apply_L: expected the phi representation");
        GridFunction pf = project(f);
        GridFunction out(f.grid, WeightGauge::phi);
        out.values =
            (pf.values - f.values).array() * f.grid->vpow(-spec_.beta);
        return out;
    }

    // Ltilde g = <v>^{-beta/2} P(<v>^{beta/2} g) - g in the psi representation
    GridFunction apply_Ltilde(const GridFunction& g) const {
        if (g.gauge != WeightGauge::psi)
            throw GridMismatch("apply_Ltilde: expected the psi representation");
        GridFunction pf = project(to_phi(g));
        GridFunction out(g.grid, WeightGauge::psi);
        out.values = pf.values.array() * g.grid->vpow(-0.5 * spec_.beta) - g.values.array();
        return out;
    }

  private:
    EquilibriumSpec spec_;
    GridPtr grid_[2];
    ProjectionBasis basis_[2];
};

inline CollisionOperator make_collision_operator(const EquilibriumSpec& spec, int n_radial,
                                                 int n_angular,
                                                 RadialMap map = RadialMap::algebraic,
                                                 double map_scale = 1.0) {
    GridPtr g0 = build_grid(spec, n_radial, n_angular, 0, map, map_scale);
    GridPtr g1 = build_grid(spec, n_radial, n_angular, 1, map, map_scale);
    return CollisionOperator(spec, std::move(g0), std::move(g1));
}

} // namespace kinmodes
