#pragma once

/**
 * @file oracle.hpp
 * @brief Reference solutions: a dense monolithic Picard solve of one time
 *        step on tiny grids, and manufactured-solution error tables.
 *
 * The monolithic unknown vector is [phi (N), lambda_phi, p (N), lambda_p,
 * c_1 (N), ..., c_L (N)]. The two multipliers enforce zero-mean phi and p
 * through bordered rows. Each Picard iterate freezes rho_f in the Darcy
 * force, the transport velocities (from phi and p) and the reaction rates at
 * the previous iterate; everything else is solved simultaneously by
 * Gaussian elimination.
 */

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dpnp/coupling.hpp"
#include "dpnp/darcy.hpp"
#include "dpnp/errors.hpp"
#include "dpnp/poisson.hpp"
#include "dpnp/transport.hpp"

namespace dpnp {

/// Dense solve with partial pivoting; `a` is row-major n x n.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    if (a.size() != n * n) throw InvalidArgument("dense_solve: size mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
        if (a[piv * n + k] == 0.0) throw NonConvergence("dense_solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / a[k * n + k];
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * x[j];
        x[k] = s / a[k * n + k];
    }
    return x;
}

struct MonolithicSystem {
    std::size_t n = 0;
    std::vector<double> matrix; ///< row-major
    std::vector<double> rhs;
};

struct OracleOptions {
    double tol = 1e-12; ///< max-abs change between Picard iterates, relative to max(1, |x|_inf)
    int max_iters = 500;
    static constexpr std::size_t max_cells = 16;
};

struct OracleResult {
    SystemState state;
    int iterations = 0;
};

namespace detail {

struct OracleLayout {
    std::size_t N, L;
    std::size_t phi(std::size_t i) const { return i; }
    std::size_t lphi() const { return N; }
    std::size_t p(std::size_t i) const { return N + 1 + i; }
    std::size_t lp() const { return 2 * N + 1; }
    std::size_t c(std::size_t l, std::size_t i) const { return 2 * N + 2 + l * N + i; }
    std::size_t size() const { return 2 * N + 2 + L * N; }
};

} // namespace detail

/// Linear system of one Picard iterate around (phi_k, p_k, c_k).
inline MonolithicSystem assemble_monolithic(const Model& m, const SpeciesFields& c_old, const CellField& phi_k,
                                            const CellField& p_k, const SpeciesFields& c_k, double dt, double t) {
    const Grid2D& g = m.grid;
    const std::size_t N = g.cell_count(), L = m.params.species_count;
    const detail::OracleLayout lay{N, L};
    MonolithicSystem sys;
    sys.n = lay.size();
    sys.matrix.assign(sys.n * sys.n, 0.0);
    sys.rhs.assign(sys.n, 0.0);
    auto A = [&](std::size_t r, std::size_t c) -> double& { return sys.matrix[r * sys.n + c]; };

    const FaceField sigma = m.bc.sigma_field(g, t);
    const FaceField flux = m.bc.flux_field(g, t);
    const CellField zero_cells = g.make_cell_field();

    // Gauss rows: L_eps phi + lambda = gauss_rhs(rho_f(c) + rho_b, sigma).
    const TpfaLaplacian lap_eps(g, DiagTensor{m.params.permittivity, m.params.permittivity});
    const std::vector<double> d_eps = lap_eps.dense();
    const std::vector<double> g0 = gauss_rhs(g, m.bc.background_field(g, t), sigma);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) A(lay.phi(i), lay.phi(j)) = d_eps[i * N + j];
        A(lay.phi(i), lay.lphi()) = 1.0;
        sys.rhs[lay.phi(i)] = g0[i];
    }
    const FaceField no_sigma = g.make_face_field();
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t j = 0; j < N; ++j) {
            SpeciesFields unit(L, zero_cells);
            unit[l][j] = 1.0;
            const std::vector<double> col = gauss_rhs(g, charge_density(unit, m.params), no_sigma);
            for (std::size_t i = 0; i < N; ++i) A(lay.phi(i), lay.c(l, j)) -= col[i];
        }
    }
    for (std::size_t j = 0; j < N; ++j) A(lay.lphi(), lay.phi(j)) = 1.0;

    // Darcy rows: L_K p + lambda = darcy_rhs(force(rho_k, E(phi))), affine in phi.
    const DiagTensor& K = m.params.permeability;
    const TpfaLaplacian lap_k(g, DiagTensor{K.xx / m.params.viscosity, K.yy / m.params.viscosity});
    const std::vector<double> d_k = lap_k.dense();
    const CellField rho_k = charge_density(c_k, m.params);
    auto darcy_b = [&](const CellField& phi) {
        return darcy_rhs(g, m.body_force(rho_k, electric_field(g, phi, sigma, m.params)), flux, m.params);
    };
    const std::vector<double> b0 = darcy_b(zero_cells);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) A(lay.p(i), lay.p(j)) = d_k[i * N + j];
        A(lay.p(i), lay.lp()) = 1.0;
        sys.rhs[lay.p(i)] = b0[i];
    }
    for (std::size_t j = 0; j < N; ++j) {
        CellField unit = zero_cells;
        unit[j] = 1.0;
        const std::vector<double> col = darcy_b(unit);
        for (std::size_t i = 0; i < N; ++i) A(lay.p(i), lay.phi(j)) -= col[i] - b0[i];
    }
    for (std::size_t j = 0; j < N; ++j) A(lay.lp(), lay.p(j)) = 1.0;

    // Transport rows with velocities from the previous iterate.
    const FaceField E_k = electric_field(g, phi_k, sigma, m.params);
    const FaceField force_k = m.body_force(rho_k, E_k);
    const FaceField q_k = darcy_velocity(g, p_k, force_k, flux, m.params);
    const TransportStepInput in{c_old, E_k, q_k, dt, t, c_k};
    const ReactionTerms rates = reaction_terms(g, in, m.reactions);
    for (std::size_t l = 0; l < L; ++l) {
        const SpeciesSystem ss = assemble_species_system(g, in, l, rates, m.params);
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j)
                if (ss.matrix.in_band(i, j)) A(lay.c(l, i), lay.c(l, j)) = ss.matrix.at(i, j);
            sys.rhs[lay.c(l, i)] = ss.rhs[i];
        }
    }
    return sys;
}

/// One backward-Euler step solved monolithically; grids of at most 16 cells.
inline OracleResult monolithic_step(const Model& m, const SystemState& start, double dt,
                                    const OracleOptions& opt = {}) {
    const Grid2D& g = m.grid;
    const std::size_t N = g.cell_count(), L = m.params.species_count;
    if (N > OracleOptions::max_cells) throw InvalidArgument("monolithic_step: grid has more than 16 cells");
    if (!(dt > 0.0)) throw InvalidArgument("monolithic_step: dt must be > 0");
    const detail::OracleLayout lay{N, L};
    const double t = start.t + dt;

    CellField phi = start.phi.size() == N ? start.phi : g.make_cell_field();
    CellField p = start.p.size() == N ? start.p : g.make_cell_field();
    SpeciesFields c = start.c;
    std::vector<double> x(lay.size(), 0.0);
    OracleResult out;
    bool converged = false;
    for (int it = 1; it <= opt.max_iters; ++it) {
        const MonolithicSystem sys = assemble_monolithic(m, start.c, phi, p, c, dt, t);
        const std::vector<double> y = dense_solve(sys.matrix, sys.rhs);
        double change = 0.0, scale = 1.0;
        for (std::size_t k = 0; k < y.size(); ++k) {
            change = std::max(change, std::abs(y[k] - x[k]));
            scale = std::max(scale, std::abs(y[k]));
        }
        x = y;
        for (std::size_t i = 0; i < N; ++i) {
            phi[i] = x[lay.phi(i)];
            p[i] = x[lay.p(i)];
        }
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t i = 0; i < N; ++i) c[l][i] = x[lay.c(l, i)];
        out.iterations = it;
        if (it > 1 && change <= opt.tol * scale) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NonConvergence("monolithic_step: Picard iteration did not converge");

    SystemState& s = out.state;
    s.t = t;
    s.c = c;
    for (CellField& cl : s.c) cl.set_role(FieldRole::concentration);
    s.phi = phi;
    s.phi.set_role(FieldRole::potential);
    s.p = p;
    s.p.set_role(FieldRole::pressure);
    s.rho_f = charge_density(s.c, m.params);
    s.E = electric_field(g, s.phi, m.bc.sigma_field(g, t), m.params);
    s.q = darcy_velocity(g, s.p, m.body_force(s.rho_f, s.E), m.bc.flux_field(g, t), m.params);
    return out;
}

/// Largest absolute difference over c, phi, p, E and q.
inline double max_abs_difference(const SystemState& a, const SystemState& b) {
    double d = 0.0;
    auto acc = [&](std::span<const double> u, std::span<const double> v) {
        for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
    };
    for (std::size_t l = 0; l < a.c.size(); ++l) acc(a.c[l].values(), b.c[l].values());
    acc(a.phi.values(), b.phi.values());
    acc(a.p.values(), b.p.values());
    acc(a.E.values(), b.E.values());
    acc(a.q.values(), b.q.values());
    return d;
}

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

enum class ManufacturedCase { poisson_cos, darcy_gradient_force, transport_translate };

inline const char* to_string(ManufacturedCase c) {
    switch (c) {
    case ManufacturedCase::poisson_cos: return "poisson_cos";
    case ManufacturedCase::darcy_gradient_force: return "darcy_gradient_force";
    case ManufacturedCase::transport_translate: return "transport_translate";
    }
    return "?";
}

inline ManufacturedCase parse_manufactured_case(const std::string& s) {
    if (s == "poisson_cos") return ManufacturedCase::poisson_cos;
    if (s == "darcy_gradient_force") return ManufacturedCase::darcy_gradient_force;
    if (s == "transport_translate") return ManufacturedCase::transport_translate;
    throw InvalidArgument("unknown manufactured case '" + s + "'");
}

struct ErrorTable {
    ManufacturedCase which{};
    std::vector<int> levels;
    std::vector<double> errors;
    std::vector<double> ratios; ///< errors[k] / errors[k+1]
    std::vector<double> orders; ///< log2 of the ratios
};

/// Default mesh sequences: n = 8, 16, 32 for the elliptic cases, n = 64, 128, 256 cells along x for translation.
inline std::vector<int> default_levels(ManufacturedCase c) {
    if (c == ManufacturedCase::transport_translate) return {64, 128, 256};
    return {8, 16, 32};
}

namespace detail {

inline double cos_cos(double x, double y) { return std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y); }

inline double zero_mean_l2_error(const Grid2D& g, const CellField& u, const CellField& exact) {
    CellField e = exact;
    const double m = mean(e);
    for (double& v : e.data()) v -= m;
    return l2_norm(g, u - e);
}

inline ModelParams unit_params(std::size_t species) {
    ModelParams p;
    p.species_count = species;
    p.valencies.assign(species, 0);
    p.diffusivities.assign(species, DiagTensor{1.0, 1.0});
    p.permeability = DiagTensor{1.0, 1.0};
    return p;
}

inline double poisson_cos_error(int n) {
    const Grid2D g(n, n, 1.0, 1.0);
    const ModelParams params = unit_params(1);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CellField rho = g.make_cell_field(), exact = g.make_cell_field();
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        rho[c] = 2.0 * pi2 * cos_cos(g.cell_x(c), g.cell_y(c));
        exact[c] = cos_cos(g.cell_x(c), g.cell_y(c));
    }
    EllipticOptions opt;
    opt.cg_tol = 1e-13;
    const PoissonSolution sol = solve_gauss(g, rho, BoundaryData{}, params, 0.0, opt);
    return zero_mean_l2_error(g, sol.phi, exact);
}

inline double darcy_gradient_error(int n) {
    const Grid2D g(n, n, 1.0, 1.0);
    const ModelParams params = unit_params(1);
    const double pi = std::numbers::pi;
    FaceField force = g.make_face_field();
    for (std::size_t f = 0; f < g.face_count(); ++f) {
        const Face& fc = g.face(f);
        force[f] = fc.orientation == Orientation::x ? -pi * std::sin(pi * fc.x) * std::cos(pi * fc.y)
                                                   : -pi * std::cos(pi * fc.x) * std::sin(pi * fc.y);
    }
    CellField exact = g.make_cell_field();
    for (std::size_t c = 0; c < g.cell_count(); ++c) exact[c] = cos_cos(g.cell_x(c), g.cell_y(c));
    EllipticOptions opt;
    opt.cg_tol = 1e-13;
    const DarcySolution sol = solve_darcy(g, force, BoundaryData{}, params, 0.0, opt);
    return zero_mean_l2_error(g, sol.p, exact);
}

/// sin^2 bump on [start, start + width], zero elsewhere.
inline double bump(double x, double start, double width) {
    if (x <= start || x >= start + width) return 0.0;
    const double s = std::sin(std::numbers::pi * (x - start) / width);
    return s * s;
}

/// A bump carried by the unit through-flow of the Darcy solver, D ~ 0,
/// CFL number 1/2, travel distance 0.25.
inline double transport_translate_error(int n) {
    constexpr double start = 0.1, width = 0.5, travel = 0.25;
    const Grid2D g(n, 1, 1.0, 1.0);
    ModelParams params = unit_params(1);
    params.diffusivities[0] = DiagTensor{1e-12, 1e-12};
    BoundaryData bc;
    bc.fluid_flux = [](const BoundaryPoint& bp, double) {
        return bp.side == BoundarySide::left ? -1.0 : (bp.side == BoundarySide::right ? 1.0 : 0.0);
    };
    bc.flux_bound = 1.0;
    EllipticOptions opt;
    opt.cg_tol = 1e-13;
    const DarcySolution flow = solve_darcy(g, g.make_face_field(), bc, params, 0.0, opt);

    const int steps = n / 2;
    const double dt = travel / steps;
    SpeciesFields c(1, g.make_cell_field(0.0, FieldRole::concentration));
    for (std::size_t i = 0; i < g.cell_count(); ++i) c[0][i] = bump(g.cell_x(i), start, width);
    for (int k = 0; k < steps; ++k) {
        const TransportStepInput in{c, g.make_face_field(), flow.q, dt, (k + 1) * dt, {}};
        c = step_species(g, in, ReactionSpec::none(), params).c;
    }
    CellField exact = g.make_cell_field();
    for (std::size_t i = 0; i < g.cell_count(); ++i) exact[i] = bump(g.cell_x(i), start + travel, width);
    return l2_norm(g, c[0] - exact);
}

} // namespace detail

inline ErrorTable manufactured_errors(ManufacturedCase which, const std::vector<int>& levels) {
    ErrorTable t;
    t.which = which;
    t.levels = levels;
    for (int n : levels) {
        switch (which) {
        case ManufacturedCase::poisson_cos: t.errors.push_back(detail::poisson_cos_error(n)); break;
        case ManufacturedCase::darcy_gradient_force: t.errors.push_back(detail::darcy_gradient_error(n)); break;
        case ManufacturedCase::transport_translate: t.errors.push_back(detail::transport_translate_error(n)); break;
        }
    }
    for (std::size_t k = 0; k + 1 < t.errors.size(); ++k) {
        t.ratios.push_back(t.errors[k] / t.errors[k + 1]);
        t.orders.push_back(std::log2(t.ratios.back()));
    }
    return t;
}

inline ErrorTable manufactured_errors(ManufacturedCase which) { return manufactured_errors(which, default_levels(which)); }

} // namespace dpnp
