#pragma once

/**
 * @file poisson.hpp
 * @brief Gauss sub-solver: E = -eps grad(Phi), div E = rho_f + rho_b,
 *        E.nu = sigma, with Phi normalised to zero mean.
 */

#include "dpnp/elliptic.hpp"
#include "dpnp/model.hpp"

namespace dpnp {

struct PoissonSolution {
    FaceField E;         ///< normal components; boundary entries equal sigma
    CellField phi;       ///< zero mean
    double residual_norm = 0.0;
    int cg_iterations = 0;
    double imbalance = 0.0;
    bool repaired = false;
};

/// Field reconstruction E = -eps grad(phi) on interior faces, sigma on the boundary.
inline FaceField electric_field(const Grid2D& grid, const CellField& phi, const FaceField& sigma,
                                const ModelParams& params) {
    const DiagTensor eps{params.permittivity, params.permittivity};
    return tpfa_gradient_flux(grid, phi, eps, sigma);
}

/// Cell-integrated right-hand side of the Gauss system for given total charge.
inline std::vector<double> gauss_rhs(const Grid2D& grid, const CellField& total_charge, const FaceField& sigma) {
    std::vector<double> b(grid.cell_count());
    for (std::size_t c = 0; c < b.size(); ++c) b[c] = total_charge[c] * grid.cell_area();
    for (std::size_t f : grid.boundary_faces()) b[grid.face(f).inside()] -= sigma[f] * grid.face(f).length;
    return b;
}

inline PoissonSolution solve_gauss(const Grid2D& grid, const CellField& rho_f, const BoundaryData& bc,
                                   const ModelParams& params, double t, const EllipticOptions& opt = {},
                                   const CellField* guess = nullptr) {
    if (rho_f.size() != grid.cell_count()) throw InvalidArgument("solve_gauss: charge field size mismatch");
    const FaceField sigma = bc.sigma_field(grid, t);
    const CellField total = rho_f + bc.background_field(grid, t);
    const TpfaLaplacian op(grid, DiagTensor{params.permittivity, params.permittivity});
    NeumannSolve ns = solve_neumann(grid, op, gauss_rhs(grid, total, sigma), opt, guess, "solve_gauss");

    PoissonSolution sol;
    sol.phi = std::move(ns.x);
    sol.phi.set_role(FieldRole::potential);
    sol.E = electric_field(grid, sol.phi, sigma, params);
    sol.residual_norm = ns.relative_residual;
    sol.cg_iterations = ns.iterations;
    sol.imbalance = ns.imbalance;
    sol.repaired = ns.repaired;
    return sol;
}

} // namespace dpnp
