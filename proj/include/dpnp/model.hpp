#pragma once

/**
 * @file model.hpp
 * @brief Physical parameters, per-species data, reaction rates and
 *        boundary/source data of the Darcy-Poisson-Nernst-Planck system,
 *        plus the admissibility checks run before any solve.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dpnp/errors.hpp"
#include "dpnp/grid.hpp"

namespace dpnp {

/// Physical constants and per-species data.
///
/// `charge_prefactor` converts theta * sum z_l c_l into the free charge
/// density. Set it to 1 for the normalised convention div E = sum z_l c_l,
/// or to the elementary charge for the dimensional one (the config loader
/// defaults it to `elementary_charge`).
struct ModelParams {
    double porosity = 1.0;          ///< theta [-]
    double viscosity = 1.0;         ///< mu [Pa s]
    double permittivity = 1.0;      ///< epsilon [F/m]
    double elementary_charge = 1.0; ///< e [C]
    double thermal_energy = 1.0;    ///< k_B T [J]
    double charge_prefactor = 1.0;  ///< [-]
    std::vector<DiagTensor> diffusivities; ///< D_l [m^2/s]
    DiagTensor permeability;               ///< K [m^2]
    std::vector<int> valencies;            ///< z_l
    std::size_t species_count = 0;         ///< L

    /// alpha_l = e z_l / (epsilon k_B T)
    double drift_coefficient(std::size_t l) const {
        return elementary_charge * valencies.at(l) / (permittivity * thermal_energy);
    }
    /// Multiplier of sum z_l c_l in the free charge density.
    double charge_factor() const { return charge_prefactor * porosity; }

    /// Smallest diagonal diffusivity entry over all species (ellipticity constant).
    double min_diffusivity() const {
        double m = std::numeric_limits<double>::infinity();
        for (const DiagTensor& d : diffusivities) m = std::min(m, d.min_entry());
        return m;
    }
    int max_abs_valency() const {
        int m = 0;
        for (int z : valencies) m = std::max(m, std::abs(z));
        return m;
    }
    bool operator==(const ModelParams&) const = default;
};

// ---------------------------------------------------------------------------
// Reactions
// ---------------------------------------------------------------------------

enum class ReactionKind { none, linear_decay, mass_action, custom_lipschitz };

/// One mass-action reaction; stoichiometric coefficients are indexed by species.
struct MassActionReaction {
    std::vector<int> reactants;
    std::vector<int> products;
    double rate = 0.0;
    bool operator==(const MassActionReaction&) const = default;
};

/// Piecewise-linear table with constant extrapolation.
struct PiecewiseLinear {
    std::vector<double> x;
    std::vector<double> y;

    double operator()(double v) const {
        if (x.empty()) return 0.0;
        if (v <= x.front()) return y.front();
        if (v >= x.back()) return y.back();
        const auto it = std::upper_bound(x.begin(), x.end(), v);
        const std::size_t k = static_cast<std::size_t>(it - x.begin());
        const double s = (v - x[k - 1]) / (x[k] - x[k - 1]);
        return y[k - 1] + s * (y[k] - y[k - 1]);
    }
    double max_slope() const {
        double m = 0.0;
        for (std::size_t k = 1; k < x.size(); ++k) m = std::max(m, std::abs((y[k] - y[k - 1]) / (x[k] - x[k - 1])));
        return m;
    }
    bool operator==(const PiecewiseLinear&) const = default;
};

/// R_target(c) += table(c_source)
struct CustomReactionTerm {
    std::size_t target = 0;
    std::size_t source = 0;
    PiecewiseLinear table;
    bool operator==(const CustomReactionTerm&) const = default;
};

struct ReactionSpec {
    ReactionKind kind = ReactionKind::none;
    std::vector<double> decay_rates;            ///< linear_decay: R_l = -lambda_l c_l
    std::vector<MassActionReaction> reactions;  ///< mass_action
    /// Mass-action rates are quadratic or worse; their Lipschitz constants are
    /// estimated on the concentration box [0, lipschitz_box]^L.
    double lipschitz_box = 10.0;
    std::vector<CustomReactionTerm> custom_terms; ///< custom_lipschitz
    std::vector<double> declared_lipschitz;       ///< custom_lipschitz, one per species

    bool operator==(const ReactionSpec&) const = default;

    static ReactionSpec none() { return {}; }
    static ReactionSpec linear_decay(std::vector<double> rates) {
        ReactionSpec r;
        r.kind = ReactionKind::linear_decay;
        r.decay_rates = std::move(rates);
        return r;
    }
    static ReactionSpec mass_action(std::vector<MassActionReaction> list, double box = 10.0) {
        ReactionSpec r;
        r.kind = ReactionKind::mass_action;
        r.reactions = std::move(list);
        r.lipschitz_box = box;
        return r;
    }

    /// Rates at one point. Mass-action laws use the positive part of each
    /// concentration, which makes quasi-positivity structural.
    void evaluate(std::span<const double> c, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        switch (kind) {
        case ReactionKind::none: break;
        case ReactionKind::linear_decay:
            for (std::size_t l = 0; l < out.size(); ++l) out[l] = -decay_rates[l] * c[l];
            break;
        case ReactionKind::mass_action:
            for (const MassActionReaction& r : reactions) {
                double w = r.rate;
                for (std::size_t l = 0; l < c.size(); ++l) {
                    if (r.reactants[l] > 0) w *= std::pow(std::max(c[l], 0.0), r.reactants[l]);
                }
                for (std::size_t l = 0; l < out.size(); ++l) out[l] += (r.products[l] - r.reactants[l]) * w;
            }
            break;
        case ReactionKind::custom_lipschitz:
            for (const CustomReactionTerm& t : custom_terms) out[t.target] += t.table(c[t.source]);
            break;
        }
    }

    /// Lipschitz constant C_Rl of each R_l (stored, structural, or box estimate).
    std::vector<double> lipschitz_constants(std::size_t species_count) const {
        std::vector<double> out(species_count, 0.0);
        switch (kind) {
        case ReactionKind::none: break;
        case ReactionKind::linear_decay:
            for (std::size_t l = 0; l < species_count; ++l) out[l] = std::abs(decay_rates[l]);
            break;
        case ReactionKind::mass_action:
            // |dR_l/dc_m| <= sum_r |nu_lr| k_r a_mr M^(order_r - 1); summed over m.
            for (const MassActionReaction& r : reactions) {
                int order = 0;
                for (int a : r.reactants) order += a;
                const double grad = r.rate * std::pow(lipschitz_box, std::max(order - 1, 0));
                double sum_m = 0.0;
                for (int a : r.reactants) sum_m += a * grad;
                for (std::size_t l = 0; l < species_count; ++l)
                    out[l] += std::abs(r.products[l] - r.reactants[l]) * sum_m;
            }
            break;
        case ReactionKind::custom_lipschitz: out = declared_lipschitz; break;
        }
        return out;
    }

    /// True when no rate can ever be nonzero.
    bool is_trivial() const {
        switch (kind) {
        case ReactionKind::none: return true;
        case ReactionKind::linear_decay:
            return std::all_of(decay_rates.begin(), decay_rates.end(), [](double r) { return r == 0.0; });
        case ReactionKind::mass_action: return reactions.empty();
        case ReactionKind::custom_lipschitz: return custom_terms.empty();
        }
        return true;
    }
};

// ---------------------------------------------------------------------------
// Boundary and source data
// ---------------------------------------------------------------------------

using BoundaryFunction = std::function<double(const BoundaryPoint&, double)>;
using CellFunction = std::function<double(const CellPoint&, double)>;

/// sigma (E.nu on the boundary), f (q.nu on the boundary) and the background
/// charge rho_b, each with a declared magnitude bound.
struct BoundaryData {
    BoundaryFunction sigma = [](const BoundaryPoint&, double) { return 0.0; };
    BoundaryFunction fluid_flux = [](const BoundaryPoint&, double) { return 0.0; };
    CellFunction background_charge = [](const CellPoint&, double) { return 0.0; };
    double sigma_bound = 0.0;
    double flux_bound = 0.0;
    double background_bound = 0.0;

    /// Face field with sigma on boundary faces, zero inside.
    FaceField sigma_field(const Grid2D& grid, double t) const { return boundary_field(grid, sigma, t); }
    FaceField flux_field(const Grid2D& grid, double t) const { return boundary_field(grid, fluid_flux, t); }
    CellField background_field(const Grid2D& grid, double t) const {
        CellField out = grid.make_cell_field(0.0, FieldRole::charge);
        for (std::size_t c = 0; c < grid.cell_count(); ++c) out[c] = background_charge(grid.cell_point(c), t);
        return out;
    }

private:
    static FaceField boundary_field(const Grid2D& grid, const BoundaryFunction& fn, double t) {
        FaceField out = grid.make_face_field();
        for (std::size_t k = 0; k < grid.boundary_faces().size(); ++k) {
            const BoundaryPoint& bp = grid.boundary_point(k);
            out[bp.face] = fn(bp, t);
        }
        return out;
    }
};

/// Sum over boundary faces of value * |face|.
inline double boundary_integral(const Grid2D& grid, const FaceField& u) {
    double s = 0.0;
    for (std::size_t f : grid.boundary_faces()) s += u[f] * grid.face(f).length;
    return s;
}

inline double cell_integral(const Grid2D& grid, const CellField& u) {
    double s = 0.0;
    for (double v : u.values()) s += v;
    return s * grid.cell_area();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct AssumptionCheck {
    std::string id; ///< "A1".."A7" or "species", "compatibility"
    bool passed = true;
    std::string detail;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;

    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
    }
    const AssumptionCheck* find(const std::string& id) const {
        for (const AssumptionCheck& c : checks)
            if (c.id == id) return &c;
        return nullptr;
    }
    std::string summary() const {
        std::ostringstream os;
        for (const AssumptionCheck& c : checks)
            os << (c.passed ? "pass " : "FAIL ") << c.id << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
        return os.str();
    }
};

namespace detail {

inline std::string fmt_value(const std::string& name, double v) {
    std::ostringstream os;
    os << name << " = " << v;
    return os.str();
}

/// Samples the quasi-positivity condition R_l(v) >= 0 whenever v_l <= 0.
inline std::string quasi_positivity_violation(const ReactionSpec& spec, std::size_t L) {
    std::mt19937_64 rng(0x5eed);
    const double box = std::max(spec.lipschitz_box, 1.0);
    std::uniform_real_distribution<double> any(-box, box);
    std::uniform_real_distribution<double> nonpos(-box, 0.0);
    std::vector<double> v(L), r(L);
    for (std::size_t l = 0; l < L; ++l) {
        for (int s = 0; s < 256; ++s) {
            for (std::size_t m = 0; m < L; ++m) v[m] = any(rng);
            v[l] = (s % 4 == 0) ? 0.0 : nonpos(rng);
            spec.evaluate(v, r);
            if (r[l] < -1e-12 * (1.0 + std::abs(v[l]))) {
                std::ostringstream os;
                os << "R_" << l << " = " << r[l] << " < 0 at c_" << l << " = " << v[l];
                return os.str();
            }
        }
    }
    return {};
}

} // namespace detail

/// Checks the admissibility assumptions on the data; every check is reported,
/// nothing throws. `initial` may be empty (then A2 is skipped) and boundary
/// data are sampled at each entry of `times`.
inline ValidationReport validate(const Grid2D& grid, const ModelParams& params, const ReactionSpec& reactions,
                                 const BoundaryData& bc, const SpeciesFields& initial = {},
                                 std::span<const double> times = {}) {
    ValidationReport rep;
    const std::size_t L = params.species_count;
    std::vector<double> default_times{0.0};
    if (times.empty()) times = default_times;

    {
        AssumptionCheck c{"species", true, ""};
        if (L < 1) {
            c.passed = false;
            c.detail = "species_count must be >= 1";
        } else if (params.valencies.size() != L || params.diffusivities.size() != L) {
            c.passed = false;
            c.detail = "per-species list length differs from species_count";
        } else if (reactions.kind == ReactionKind::linear_decay && reactions.decay_rates.size() != L) {
            c.passed = false;
            c.detail = "decay rate count differs from species_count";
        } else if (reactions.kind == ReactionKind::custom_lipschitz && reactions.declared_lipschitz.size() != L) {
            c.passed = false;
            c.detail = "declared Lipschitz constant count differs from species_count";
        }
        if (reactions.kind == ReactionKind::mass_action) {
            for (const MassActionReaction& r : reactions.reactions) {
                if (r.reactants.size() != L || r.products.size() != L) {
                    c.passed = false;
                    c.detail = "mass-action stoichiometry length differs from species_count";
                }
            }
        }
        if (reactions.kind == ReactionKind::custom_lipschitz) {
            for (const CustomReactionTerm& t : reactions.custom_terms) {
                if (t.target >= L || t.source >= L) {
                    c.passed = false;
                    c.detail = "custom reaction term refers to an unknown species";
                }
            }
        }
        rep.checks.push_back(c);
        if (!c.passed) return rep;
    }

    rep.checks.push_back({"A1", true, "rectangle " + std::to_string(grid.nx()) + "x" + std::to_string(grid.ny())});

    {
        AssumptionCheck c{"A2", true, initial.empty() ? "no initial data given" : ""};
        if (!initial.empty()) {
            if (initial.size() != L) {
                c.passed = false;
                c.detail = "initial data species count mismatch";
            }
            for (std::size_t l = 0; l < initial.size() && c.passed; ++l) {
                if (initial[l].size() != grid.cell_count() || !initial[l].all_finite()) {
                    c.passed = false;
                    c.detail = "initial data for species " + std::to_string(l) + " not finite or wrong size";
                } else if (initial[l].min() < 0.0) {
                    c.passed = false;
                    c.detail = detail::fmt_value("min c_" + std::to_string(l) + "(0)", initial[l].min());
                }
            }
        }
        rep.checks.push_back(c);
    }

    {
        AssumptionCheck c{"A3", true, ""};
        for (std::size_t l = 0; l < params.diffusivities.size(); ++l) {
            const DiagTensor& d = params.diffusivities[l];
            if (!(d.xx > 0.0) || !(d.yy > 0.0)) {
                c.passed = false;
                c.detail = detail::fmt_value("min D_" + std::to_string(l), d.min_entry());
            }
        }
        if (!(params.permeability.xx > 0.0) || !(params.permeability.yy > 0.0)) {
            c.passed = false;
            c.detail = detail::fmt_value("min K", params.permeability.min_entry());
        }
        rep.checks.push_back(c);
    }

    {
        AssumptionCheck c{"A4", true, ""};
        const std::pair<const char*, double> coeffs[] = {{"porosity", params.porosity},
                                                         {"viscosity", params.viscosity},
                                                         {"permittivity", params.permittivity},
                                                         {"thermal_energy", params.thermal_energy},
                                                         {"elementary_charge", params.elementary_charge},
                                                         {"charge_prefactor", params.charge_prefactor}};
        for (const auto& [name, v] : coeffs) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                c.passed = false;
                c.detail = detail::fmt_value(name, v);
                break;
            }
        }
        rep.checks.push_back(c);
    }

    {
        AssumptionCheck c{"A5", true, ""};
        std::vector<double> zero(L, 0.0), r(L, 0.0);
        reactions.evaluate(zero, r);
        for (std::size_t l = 0; l < L; ++l) {
            if (r[l] != 0.0) {
                c.passed = false;
                c.detail = detail::fmt_value("R_" + std::to_string(l) + "(0)", r[l]);
            }
        }
        if (c.passed && reactions.kind == ReactionKind::linear_decay) {
            for (std::size_t l = 0; l < L; ++l) {
                if (reactions.decay_rates[l] < 0.0) {
                    c.passed = false;
                    c.detail = detail::fmt_value("decay rate " + std::to_string(l), reactions.decay_rates[l]);
                }
            }
        }
        if (c.passed && reactions.kind == ReactionKind::mass_action) {
            for (const MassActionReaction& mr : reactions.reactions) {
                if (mr.rate < 0.0) {
                    c.passed = false;
                    c.detail = detail::fmt_value("mass-action rate", mr.rate);
                }
            }
        }
        if (c.passed && reactions.kind == ReactionKind::custom_lipschitz) {
            for (std::size_t l = 0; l < L; ++l) {
                double slope = 0.0;
                for (const CustomReactionTerm& t : reactions.custom_terms)
                    if (t.target == l) slope += t.table.max_slope();
                if (!std::isfinite(reactions.declared_lipschitz[l]) || reactions.declared_lipschitz[l] + 1e-12 < slope) {
                    c.passed = false;
                    c.detail = "declared Lipschitz constant of R_" + std::to_string(l) + " below table slope";
                }
            }
            if (c.passed) {
                const std::string v = detail::quasi_positivity_violation(reactions, L);
                if (!v.empty()) {
                    c.passed = false;
                    c.detail = "quasi-positivity: " + v;
                }
            }
        }
        if (c.passed) {
            for (double k : reactions.lipschitz_constants(L)) {
                if (!std::isfinite(k)) {
                    c.passed = false;
                    c.detail = "infinite Lipschitz constant";
                }
            }
        }
        rep.checks.push_back(c);
    }

    {
        AssumptionCheck a6{"A6", true, ""};
        AssumptionCheck compat{"compatibility", true, ""};
        for (double t : times) {
            const FaceField s = bc.sigma_field(grid, t);
            const FaceField f = bc.flux_field(grid, t);
            for (std::size_t b : grid.boundary_faces()) {
                if (!std::isfinite(s[b]) || std::abs(s[b]) > bc.sigma_bound * (1.0 + 1e-12)) {
                    a6.passed = false;
                    a6.detail = detail::fmt_value("|sigma|", std::abs(s[b])) +
                                detail::fmt_value(" > declared bound", bc.sigma_bound);
                }
                if (!std::isfinite(f[b]) || std::abs(f[b]) > bc.flux_bound * (1.0 + 1e-12)) {
                    a6.passed = false;
                    a6.detail = detail::fmt_value("|f|", std::abs(f[b])) +
                                detail::fmt_value(" > declared bound", bc.flux_bound);
                }
            }
            const double net = boundary_integral(grid, f);
            const double scale = std::max(1.0, bc.flux_bound) * (grid.lx() + grid.ly());
            if (std::abs(net) > 1e-12 * scale) {
                compat.passed = false;
                std::ostringstream os;
                os << "sum f |face| = " << net << " at t = " << t << " (must vanish)";
                compat.detail = os.str();
            }
        }
        rep.checks.push_back(a6);

        AssumptionCheck a7{"A7", true, ""};
        for (double t : times) {
            const CellField rb = bc.background_field(grid, t);
            if (!rb.all_finite() || rb.max_abs() > bc.background_bound * (1.0 + 1e-12)) {
                a7.passed = false;
                a7.detail = detail::fmt_value("|rho_b|", rb.max_abs()) +
                            detail::fmt_value(" > declared bound", bc.background_bound);
            }
        }
        rep.checks.push_back(a7);
        rep.checks.push_back(compat);
    }
    return rep;
}

/// rho_f = charge_prefactor * theta * sum_l z_l c_l, cell-wise.
inline CellField charge_density(const SpeciesFields& c, const ModelParams& params) {
    if (c.size() != params.valencies.size()) throw InvalidArgument("charge_density: species count mismatch");
    if (c.empty()) return {};
    CellField rho(c[0].size(), 0.0, FieldRole::charge);
    const double factor = params.charge_factor();
    for (std::size_t l = 0; l < c.size(); ++l) {
        const double z = params.valencies[l];
        if (z == 0.0) continue;
        for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += z * c[l][i];
    }
    rho *= factor;
    return rho;
}

/// R_l(c_1..c_L) in every cell.
inline SpeciesFields evaluate_reactions(const ReactionSpec& spec, const SpeciesFields& c) {
    const std::size_t L = c.size();
    SpeciesFields out;
    if (L == 0) return out;
    const std::size_t n = c[0].size();
    out.assign(L, CellField(n, 0.0, FieldRole::concentration));
    std::vector<double> point(L), rate(L);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < L; ++l) point[l] = c[l][i];
        spec.evaluate(point, rate);
        for (std::size_t l = 0; l < L; ++l) out[l][i] = rate[l];
    }
    return out;
}

} // namespace dpnp
