#pragma once

#include <algorithm>
#include <vector>

#include "dpnp/darcy.hpp"
#include "dpnp/elliptic.hpp"
#include "dpnp/grid.hpp"
#include "dpnp/model.hpp"

namespace dpnp {

/// Everything that stays fixed during a run.
struct Model {
    Grid2D grid;
    ModelParams params;
    ReactionSpec reactions;
    BoundaryData bc;
    EllipticOptions elliptic;
    ForceAssembly force_assembly; ///< empty: Coulomb force rho_f E

    FaceField body_force(const CellField& rho_f, const FaceField& E) const {
        return force_assembly ? force_assembly(grid, rho_f, E, params) : electric_body_force(grid, rho_f, E, params);
    }

    /// No path from the concentrations back into the fields or the reaction
    /// terms: the outer iteration is a constant map.
    bool decoupled() const {
        const bool neutral = std::all_of(params.valencies.begin(), params.valencies.end(), [](int z) { return z == 0; });
        return neutral && reactions.is_trivial() && !force_assembly;
    }
};

/// Solution snapshot (E, Phi, q, p, c_1..c_L) at time t.
struct SystemState {
    double t = 0.0;
    SpeciesFields c;
    FaceField E;
    FaceField q;
    CellField phi;
    CellField p;
    CellField rho_f;
};

} // namespace dpnp
