#pragma once

/**
 * @file transport.hpp
 * @brief One backward-Euler step of the Nernst-Planck equations for all
 *        species: implicit TPFA diffusion, implicit first-order upwind drift
 *        with velocity q + alpha_l E, zero total flux on the boundary.
 *
 * Per cell i and species l the assembled equation is
 *
 *   theta |i| (c_i - c_old,i) / dt + sum_faces (v c_upwind - D dc/dn) |f|
 *       = theta |i| R_l(c_frozen)
 *
 * Boundary faces contribute nothing: the advective and diffusive parts of
 * the boundary flux cancel.
 *
 * Reactions: linear decay is always implicit (lambda on the diagonal). For
 * the other kinds a cell takes R(c_frozen) explicitly when that keeps every
 * species' right-hand side non-negative, so reactions that conserve charge
 * do so exactly in every outer iterate; otherwise negative rates move to the
 * diagonal as -R_l / c_frozen,l. Either way the matrix is an M-matrix and
 * the right-hand side is non-negative.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dpnp/errors.hpp"
#include "dpnp/grid.hpp"
#include "dpnp/linear_algebra.hpp"
#include "dpnp/model.hpp"
#include "dpnp/parallel.hpp"

namespace dpnp {

/// Values above this (and below zero) are rounding noise and get clamped.
inline constexpr double kClampThreshold = -1e-14;

struct TransportStepInput {
    SpeciesFields c_old;     ///< start-of-step concentrations, >= 0
    FaceField E;
    FaceField q;
    double dt = 0.0;
    double t = 0.0;          ///< time at the end of the step
    SpeciesFields c_frozen;  ///< reaction linearisation point; empty = c_old
};

struct TransportResult {
    SpeciesFields c;
    int clamp_events = 0;
    double min_before_clamp = 0.0;
};

/// v_l = q + alpha_l E on every face.
inline FaceField species_velocity(const FaceField& E, const FaceField& q, std::size_t l, const ModelParams& params) {
    const double alpha = params.drift_coefficient(l);
    FaceField v = q;
    if (alpha != 0.0) {
        for (std::size_t f = 0; f < v.size(); ++f) v[f] += alpha * E[f];
    }
    return v;
}

struct SpeciesSystem {
    BandedMatrix matrix;
    std::vector<double> rhs;
};

/// Reaction rates at c_frozen and, per cell, whether they enter explicitly.
struct ReactionTerms {
    SpeciesFields rates;
    std::vector<char> explicit_cell; ///< empty: diagonal shift everywhere
};

inline ReactionTerms reaction_terms(const Grid2D& grid, const TransportStepInput& in, const ReactionSpec& reactions) {
    const std::size_t L = in.c_old.size();
    const SpeciesFields& frozen = in.c_frozen.empty() ? in.c_old : in.c_frozen;
    ReactionTerms rt;
    if (reactions.is_trivial()) {
        rt.rates.assign(L, grid.make_cell_field());
        return rt;
    }
    rt.rates = evaluate_reactions(reactions, frozen);
    if (reactions.kind == ReactionKind::linear_decay) return rt;
    rt.explicit_cell.assign(grid.cell_count(), 1);
    for (std::size_t i = 0; i < grid.cell_count(); ++i)
        for (std::size_t l = 0; l < L; ++l)
            if (in.c_old[l][i] + in.dt * rt.rates[l][i] < 0.0) rt.explicit_cell[i] = 0;
    return rt;
}

/// Assembles the linear system of one species.
inline SpeciesSystem assemble_species_system(const Grid2D& grid, const TransportStepInput& in, std::size_t l,
                                             const ReactionTerms& terms, const ModelParams& params) {
    const std::size_t n = grid.cell_count();
    SpeciesSystem sys{BandedMatrix(n, static_cast<std::size_t>(grid.nx())), std::vector<double>(n)};
    const double theta = params.porosity;
    const double mass = theta * grid.cell_area() / in.dt;
    const CellField& c_old = in.c_old[l];
    const CellField& frozen = in.c_frozen.empty() ? in.c_old[l] : in.c_frozen[l];
    const CellField& rates = terms.rates[l];

    for (std::size_t i = 0; i < n; ++i) {
        double diag = mass;
        double rhs = mass * c_old[i];
        const double r = rates[i];
        const bool explicit_rate = !terms.explicit_cell.empty() && terms.explicit_cell[i];
        if (r >= 0.0 || explicit_rate) {
            rhs += theta * grid.cell_area() * r;
        } else if (frozen[i] > 0.0) {
            diag += theta * grid.cell_area() * (-r) / frozen[i];
        }
        sys.matrix.add(i, i, diag);
        sys.rhs[i] = rhs;
    }

    const FaceField v = species_velocity(in.E, in.q, l, params);
    const DiagTensor& D = params.diffusivities[l];
    for (std::size_t f : grid.interior_faces()) {
        const Face& fc = grid.face(f);
        const std::size_t lo = fc.lo, hi = fc.hi;
        const double trans = D.along(fc.orientation) * fc.length / fc.spacing;
        const double vp = std::max(v[f], 0.0) * fc.length;
        const double vm = std::min(v[f], 0.0) * fc.length;
        // flux lo -> hi = (vp c_lo + vm c_hi) + trans (c_lo - c_hi)
        sys.matrix.add(lo, lo, trans + vp);
        sys.matrix.add(lo, hi, -trans + vm);
        sys.matrix.add(hi, lo, -trans - vp);
        sys.matrix.add(hi, hi, trans - vm);
    }
    return sys;
}

/// Advances every species by one implicit step with the fields frozen.
inline TransportResult step_species(const Grid2D& grid, const TransportStepInput& in, const ReactionSpec& reactions,
                                    const ModelParams& params) {
    const std::size_t L = params.species_count;
    if (in.c_old.size() != L) throw InvalidArgument("step_species: species count mismatch");
    if (!(in.dt > 0.0)) throw InvalidArgument("step_species: dt must be > 0");
    if (in.E.size() != grid.face_count() || in.q.size() != grid.face_count())
        throw InvalidArgument("step_species: face field size mismatch");

    const ReactionTerms terms = reaction_terms(grid, in, reactions);

    TransportResult out;
    out.c.assign(L, grid.make_cell_field(0.0, FieldRole::concentration));
    std::vector<double> mins(L, 0.0);
    parallel_for(L, [&](std::size_t l) {
        SpeciesSystem sys = assemble_species_system(grid, in, l, terms, params);
        sys.matrix.factorize();
        sys.matrix.solve_in_place(sys.rhs);
        out.c[l].data() = std::move(sys.rhs);
        mins[l] = out.c[l].min();
    });

    out.min_before_clamp = *std::min_element(mins.begin(), mins.end());
    if (out.min_before_clamp < kClampThreshold) {
        throw NegativeConcentration("step_species: concentration " + std::to_string(out.min_before_clamp) +
                                    " below rounding threshold");
    }
    for (CellField& c : out.c) {
        for (double& v : c.data()) {
            if (v < 0.0) {
                v = 0.0;
                ++out.clamp_events;
            }
        }
    }
    return out;
}

} // namespace dpnp
