#pragma once

/**
 * @file darcy.hpp
 * @brief Darcy sub-solver with electric body force:
 *        q = K (-mu^-1 grad p + F), div q = 0, q.nu = f,
 *        where F = (mu eps)^-1 f_el is assembled on faces.
 */

#include <functional>

#include "dpnp/elliptic.hpp"
#include "dpnp/model.hpp"

namespace dpnp {

struct DarcySolution {
    FaceField q;   ///< normal components; boundary entries equal f
    CellField p;   ///< zero mean
    double residual_norm = 0.0;
    int cg_iterations = 0;
    double imbalance = 0.0;
    bool repaired = false;
};

/// Replaces the default Coulomb force assembly (rho_f, E, params) -> face force.
using ForceAssembly = std::function<FaceField(const Grid2D&, const CellField&, const FaceField&, const ModelParams&)>;

/// Face-normal force density (mu eps)^-1 * rho_f * E with rho_f averaged
/// arithmetically onto interior faces.
inline FaceField electric_body_force(const Grid2D& grid, const CellField& rho_f, const FaceField& E,
                                     const ModelParams& params) {
    const double scale = 1.0 / (params.viscosity * params.permittivity);
    FaceField out = grid.make_face_field();
    for (std::size_t f = 0; f < grid.face_count(); ++f) {
        const Face& fc = grid.face(f);
        const double rho = fc.is_boundary() ? rho_f[fc.inside()] : 0.5 * (rho_f[fc.lo] + rho_f[fc.hi]);
        out[f] = scale * rho * E[f];
    }
    return out;
}

/// q on all faces from pressure and force; boundary entries take `flux`.
inline FaceField darcy_velocity(const Grid2D& grid, const CellField& p, const FaceField& force, const FaceField& flux,
                                const ModelParams& params) {
    const DiagTensor& K = params.permeability;
    const DiagTensor mobility{K.xx / params.viscosity, K.yy / params.viscosity};
    FaceField q = tpfa_gradient_flux(grid, p, mobility, flux);
    for (std::size_t f : grid.interior_faces()) q[f] += K.along(grid.face(f).orientation) * force[f];
    return q;
}

/// Cell-integrated right-hand side: -div(K F) - boundary inflow.
inline std::vector<double> darcy_rhs(const Grid2D& grid, const FaceField& force, const FaceField& flux,
                                     const ModelParams& params) {
    std::vector<double> b(grid.cell_count(), 0.0);
    for (std::size_t f : grid.interior_faces()) {
        const Face& fc = grid.face(f);
        const double kf = params.permeability.along(fc.orientation) * force[f] * fc.length;
        b[fc.lo] -= kf;
        b[fc.hi] += kf;
    }
    for (std::size_t f : grid.boundary_faces()) b[grid.face(f).inside()] -= flux[f] * grid.face(f).length;
    return b;
}

inline DarcySolution solve_darcy(const Grid2D& grid, const FaceField& force, const BoundaryData& bc,
                                 const ModelParams& params, double t, const EllipticOptions& opt = {},
                                 const CellField* guess = nullptr) {
    if (force.size() != grid.face_count()) throw InvalidArgument("solve_darcy: force field size mismatch");
    const FaceField flux = bc.flux_field(grid, t);
    const DiagTensor& K = params.permeability;
    const TpfaLaplacian op(grid, DiagTensor{K.xx / params.viscosity, K.yy / params.viscosity});
    NeumannSolve ns = solve_neumann(grid, op, darcy_rhs(grid, force, flux, params), opt, guess, "solve_darcy");

    DarcySolution sol;
    sol.p = std::move(ns.x);
    sol.p.set_role(FieldRole::pressure);
    sol.q = darcy_velocity(grid, sol.p, force, flux, params);
    sol.residual_norm = ns.relative_residual;
    sol.cg_iterations = ns.iterations;
    sol.imbalance = ns.imbalance;
    sol.repaired = ns.repaired;
    return sol;
}

} // namespace dpnp
