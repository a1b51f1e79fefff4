#pragma once

// Hand-rolled generators and scenario builders shared by the unit tests and
// the acceptance runner.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dpnp/dpnp.hpp"

namespace dpnp::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }
    std::uint64_t seed() { return rng_(); }

    CellField cell_field(const Grid2D& g, double lo, double hi) {
        CellField f = g.make_cell_field();
        for (double& v : f.data()) v = uniform(lo, hi);
        return f;
    }

    /// Random boundary values with zero net flux sum_f v |f| = 0.
    std::vector<double> balanced_boundary(const Grid2D& g, double amplitude) {
        std::vector<double> v(g.boundary_faces().size());
        double net = 0.0, len = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            v[k] = uniform(-amplitude, amplitude);
            const double l = g.face(g.boundary_faces()[k]).length;
            net += v[k] * l;
            len += l;
        }
        for (double& x : v) x -= net / len;
        return v;
    }

private:
    std::mt19937_64 rng_;
};

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Boundary data from per-boundary-face tables and a per-cell rho_b table.
inline BoundaryData tabulated_boundary(std::vector<double> sigma, std::vector<double> flux, std::vector<double> rho_b) {
    BoundaryData bc;
    bc.sigma_bound = max_abs(sigma);
    bc.flux_bound = max_abs(flux);
    bc.background_bound = max_abs(rho_b);
    bc.sigma = [s = std::move(sigma)](const BoundaryPoint& bp, double) { return s[bp.ordinal]; };
    bc.fluid_flux = [f = std::move(flux)](const BoundaryPoint& bp, double) { return f[bp.ordinal]; };
    bc.background_charge = [r = std::move(rho_b)](const CellPoint& cp, double) { return r[cp.index]; };
    return bc;
}

inline ModelParams simple_params(std::vector<int> z, double D = 1.0) {
    ModelParams p;
    p.species_count = z.size();
    p.valencies = std::move(z);
    p.diffusivities.assign(p.species_count, DiagTensor{D, D});
    p.permeability = DiagTensor{1.0, 1.0};
    return p;
}

struct RandomCase {
    Model model;
    SpeciesFields initial;
    FixedPointConfig fp;
};

struct RandomCaseOptions {
    int nx = 16, ny = 16;
    int min_species = 1, max_species = 4;
    int max_valency = 3;
    double max_initial = 10.0;
    bool boundary_data = true; ///< random sigma, f, rho_b; else all zero
    bool neutral = false;      ///< rescale so that the total charge vanishes
    double dt = 1e-3;
    int steps = 100;
    double fp_tol = 1e-8;
    std::vector<int> valencies; ///< fixed valencies; empty = random
};

/// Random admissible case; Gauss compatibility is restored by shifting rho_b
/// by a constant (or, with `neutral`, by rescaling the negative ions).
inline RandomCase random_case(Gen& gen, const RandomCaseOptions& o) {
    const Grid2D g(o.nx, o.ny, 1.0, 1.0);
    const int L = o.valencies.empty() ? gen.integer(o.min_species, o.max_species) : static_cast<int>(o.valencies.size());
    std::vector<int> z(L);
    for (int& v : z) v = gen.integer(-o.max_valency, o.max_valency);
    if (!o.valencies.empty()) z = o.valencies;
    else if (o.neutral) {
        // need at least one ion of each sign
        z[0] = gen.integer(1, o.max_valency);
        z[1] = -gen.integer(1, o.max_valency);
    }

    ModelParams p;
    p.species_count = L;
    p.valencies = z;
    p.porosity = gen.uniform(0.3, 1.0);
    p.viscosity = gen.uniform(0.5, 2.0);
    p.permittivity = gen.uniform(0.5, 2.0);
    p.elementary_charge = 1.0;
    p.thermal_energy = gen.uniform(0.5, 2.0);
    p.charge_prefactor = gen.uniform(0.05, 0.5);
    p.permeability = DiagTensor{gen.uniform(0.2, 2.0), gen.uniform(0.2, 2.0)};
    for (int l = 0; l < L; ++l) p.diffusivities.push_back(DiagTensor{gen.uniform(0.01, 1.0), gen.uniform(0.01, 1.0)});

    SpeciesFields c0;
    for (int l = 0; l < L; ++l) {
        CellField c = gen.coin() ? gen.cell_field(g, 0.0, o.max_initial) : g.make_cell_field();
        if (c.max() == 0.0) {
            // smooth bump instead of white noise
            const double cx = gen.uniform(0.2, 0.8), cy = gen.uniform(0.2, 0.8), a = gen.uniform(0.0, o.max_initial);
            for (std::size_t i = 0; i < g.cell_count(); ++i) {
                const double dx = g.cell_x(i) - cx, dy = g.cell_y(i) - cy;
                c[i] = a * std::exp(-(dx * dx + dy * dy) / 0.02);
            }
        }
        c.set_role(FieldRole::concentration);
        c0.push_back(std::move(c));
    }
    if (o.neutral) {
        double pos = 0.0, neg = 0.0;
        for (int l = 0; l < L; ++l) {
            const double q = z[l] * cell_integral(g, c0[l]);
            (q > 0 ? pos : neg) += q;
        }
        if (pos > 0.0 && neg < 0.0) {
            const double scale = pos / -neg;
            for (int l = 0; l < L; ++l)
                if (z[l] < 0) c0[l] *= scale;
        }
        // exact balance up to rounding; clip back under the cap
        for (CellField& c : c0)
            if (c.max() > o.max_initial) c *= o.max_initial / c.max();
        pos = neg = 0.0;
        for (int l = 0; l < L; ++l) {
            const double q = z[l] * cell_integral(g, c0[l]);
            (q > 0 ? pos : neg) += q;
        }
        const double scale = pos / -neg;
        for (int l = 0; l < L; ++l)
            if (z[l] < 0) c0[l] *= scale;
    }

    const std::size_t nb = g.boundary_faces().size();
    std::vector<double> sigma(nb, 0.0), flux(nb, 0.0), rho_b(g.cell_count(), 0.0);
    if (o.boundary_data) {
        for (double& s : sigma) s = gen.uniform(-1.0, 1.0);
        flux = gen.balanced_boundary(g, 1.0);
        for (double& r : rho_b) r = gen.uniform(-1.0, 1.0);
        double sig = 0.0;
        for (std::size_t k = 0; k < nb; ++k) sig += sigma[k] * g.face(g.boundary_faces()[k]).length;
        const double charge = cell_integral(g, charge_density(c0, p));
        double rb = 0.0;
        for (double r : rho_b) rb += r * g.cell_area();
        const double shift = (sig - charge - rb) / g.domain_area();
        for (double& r : rho_b) r += shift;
    }

    RandomCase rc{Model{g, p, ReactionSpec::none(), tabulated_boundary(sigma, flux, rho_b), {}, {}}, std::move(c0), {}};
    rc.fp.dt = o.dt;
    rc.fp.t_end = o.dt * o.steps;
    rc.fp.fp_tol = o.fp_tol;
    return rc;
}

} // namespace dpnp::testing
