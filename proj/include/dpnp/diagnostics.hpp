#pragma once

/**
 * @file diagnostics.hpp
 * @brief Discrete a-priori quantities: the Lyapunov function
 *        Lambda(x) = x (ln x - 1) + e, total entropy, norms, the
 *        Gronwall envelopes for entropy and energy, and the drift sign term.
 */

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dpnp/errors.hpp"
#include "dpnp/grid.hpp"
#include "dpnp/model.hpp"
#include "dpnp/state.hpp"

namespace dpnp {

/// Lambda(x) = x (ln x - 1) + e, continuously extended by Lambda(0) = e.
inline double lyapunov(double x) {
    if (x < 0.0 || std::isnan(x)) throw InvalidArgument("lyapunov: negative argument " + std::to_string(x));
    if (x == 0.0) return std::numbers::e;
    return x * (std::log(x) - 1.0) + std::numbers::e;
}

/// sum_l sum_cells Lambda(c_l,i) |cell|
inline double entropy_total(const Grid2D& grid, const SpeciesFields& c) {
    double s = 0.0;
    for (const CellField& cl : c) {
        for (double v : cl.values()) {
            if (v < 0.0) throw InvalidArgument("entropy_total: negative concentration " + std::to_string(v));
            s += lyapunov(v);
        }
    }
    return s * grid.cell_area();
}

/// (sum_l z_l c_l) * (sum_l sign(z_l) (|z_l| c_l)^2): the pointwise electric
/// drift integrand, whose sign is indefinite once three species are present.
inline double drift_sign_term(std::span<const int> valencies, std::span<const double> c) {
    double charge = 0.0, weighted = 0.0;
    for (std::size_t l = 0; l < valencies.size(); ++l) {
        const double z = valencies[l];
        const double s = (z > 0) - (z < 0);
        charge += z * c[l];
        weighted += s * (std::abs(z) * c[l]) * (std::abs(z) * c[l]);
    }
    return charge * weighted;
}

inline double sum_squared_l2(const Grid2D& grid, const SpeciesFields& c) {
    double s = 0.0;
    for (const CellField& cl : c) {
        const double n = l2_norm(grid, cl);
        s += n * n;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Gronwall envelopes
// ---------------------------------------------------------------------------

/// Constants of the entropy and energy envelopes, fixed by the data.
struct EnvelopeConstants {
    double initial_entropy = 0.0; ///< sum_l ||Lambda(c_l0)||_L1
    double initial_energy = 0.0;  ///< sum_l ||c_l0||^2_L2
    double alpha_d = 0.0;         ///< smallest diffusivity entry
    double b = 0.0;               ///< entropy growth rate
    double background_rate = 0.0; ///< additive entropy source from rho_b (zero when rho_b = 0)
    double a0 = 0.0;              ///< min(theta/2, alpha_D/2)
    double b0 = 0.0;              ///< energy growth rate
    double charge_gain = 0.0;     ///< multiplies C_L^2 in the energy exponent
    double thermal_ratio = 0.0;   ///< eps k_B T / e
};

struct Envelopes {
    double entropy = 0.0;
    double energy = 0.0;     ///< may overflow to +inf
    double log_energy = 0.0; ///< natural log of the energy envelope, always finite
    double charge_bound = 0.0; ///< C_L(t)
};

inline EnvelopeConstants envelope_constants(const Grid2D& grid, const ModelParams& params, const BoundaryData& bc,
                                            const ReactionSpec& reactions, const SpeciesFields& initial) {
    EnvelopeConstants k;
    k.initial_entropy = entropy_total(grid, initial);
    k.initial_energy = sum_squared_l2(grid, initial);
    k.alpha_d = params.min_diffusivity();

    const double e = params.elementary_charge;
    const double ekt = params.permittivity * params.thermal_energy;
    const double z = params.max_abs_valency();
    const double theta = params.porosity;
    double max_cr = 0.0;
    for (double c : reactions.lipschitz_constants(params.species_count)) max_cr = std::max(max_cr, c);
    const double f2 = bc.flux_bound * bc.flux_bound;
    const double s2 = bc.sigma_bound * bc.sigma_bound;
    const double drift = e * e * z * z / (k.alpha_d * ekt * ekt);

    // Entropy: boundary terms scale with 1/theta because the time derivative carries theta.
    k.b = (8.0 / k.alpha_d * f2 + 8.0 * drift * s2) / theta + max_cr;
    // Cross term <rho_b, rho_f> bounded by Young: adds (e / (2 eps kT kappa theta)) ||rho_b||^2 per unit time.
    const double kappa = params.charge_factor();
    k.background_rate =
        e / (2.0 * ekt * kappa * theta) * bc.background_bound * bc.background_bound * grid.domain_area();

    // Energy: the growth rate divides every term of the differential inequality by A0.
    k.a0 = std::min(theta / 2.0, k.alpha_d / 2.0);
    k.b0 = (12.0 * drift * (s2 + bc.background_bound) + 4.0 / k.alpha_d * f2 + 3.0 * theta * max_cr) / k.a0;
    k.charge_gain = 12.0 * drift / k.a0;
    k.thermal_ratio = ekt / e;
    return k;
}

/// Envelope values at time t.
inline Envelopes gronwall_envelopes(const EnvelopeConstants& k, double t) {
    Envelopes env;
    const double bt = k.b * t;
    const double growth = 1.0 + bt * std::exp(bt);
    const double s0 = k.initial_entropy + k.background_rate * t;
    env.entropy = growth * s0;
    // C_L,1 and C_L,2 use the envelope itself as the time-sup of the entropy.
    const double tail = (1.0 + k.b * env.entropy) * s0;
    const double cl1 = k.thermal_ratio * tail;
    const double cl2 = 2.0 / k.alpha_d * tail;
    env.charge_bound = 2.0 * std::max(cl1, cl2);
    env.log_energy = k.b0 * t + k.charge_gain * env.charge_bound * env.charge_bound +
                     std::log(std::max(k.initial_energy, std::numeric_limits<double>::min()));
    env.energy = std::exp(env.log_energy);
    return env;
}

inline Envelopes gronwall_envelopes(const Grid2D& grid, const ModelParams& params, const BoundaryData& bc,
                                    const ReactionSpec& reactions, const SpeciesFields& initial, double t) {
    return gronwall_envelopes(envelope_constants(grid, params, bc, reactions, initial), t);
}

// ---------------------------------------------------------------------------
// Per-step record
// ---------------------------------------------------------------------------

struct SpeciesStats {
    double mass = 0.0;   ///< theta * integral c_l
    double l2 = 0.0;
    double linf = 0.0;
    double grad_l2 = 0.0;
};

struct DiagnosticsRecord {
    double t = 0.0;
    int outer_iters = 0;
    int clamp_events = 0;
    double entropy = 0.0;
    double entropy_env = 0.0;
    double charge_l2 = 0.0;
    double energy = 0.0;       ///< sum_l ||c_l||^2_L2
    double energy_env = 0.0;
    double log_energy_env = 0.0;
    std::vector<SpeciesStats> species;
    double e_l2 = 0.0;
    double phi_l2 = 0.0;
    double q_l2 = 0.0;
    double p_l2 = 0.0;
    double linf_running_max = 0.0; ///< max over time so far of max_l ||c_l||_inf
    int poisson_cg_iters = 0;
    int darcy_cg_iters = 0;
    int compat_repairs = 0;
    int retries = 0;
    double min_before_clamp = 0.0;
    bool outer_monotone = true;

    bool entropy_within_envelope(double slack = 1e-10) const { return entropy <= entropy_env + slack; }
    bool energy_within_envelope() const {
        return energy <= 0.0 || std::log(energy) <= log_energy_env + 1e-12;
    }
};

/// Norms of a state; the caller fills the solver counters.
inline DiagnosticsRecord make_record(const Model& model, const SystemState& s, const EnvelopeConstants& env_k) {
    const Grid2D& g = model.grid;
    DiagnosticsRecord r;
    r.t = s.t;
    r.entropy = entropy_total(g, s.c);
    r.charge_l2 = l2_norm(g, s.rho_f);
    r.energy = sum_squared_l2(g, s.c);
    const Envelopes env = gronwall_envelopes(env_k, s.t);
    r.entropy_env = env.entropy;
    r.energy_env = env.energy;
    r.log_energy_env = env.log_energy;
    for (const CellField& c : s.c) {
        SpeciesStats st;
        st.mass = model.params.porosity * cell_integral(g, c);
        st.l2 = l2_norm(g, c);
        st.linf = c.max_abs();
        st.grad_l2 = gradient_l2_norm(g, c);
        r.linf_running_max = std::max(r.linf_running_max, st.linf);
        r.species.push_back(st);
    }
    r.e_l2 = l2_norm(g, s.E);
    r.phi_l2 = l2_norm(g, s.phi);
    r.q_l2 = l2_norm(g, s.q);
    r.p_l2 = l2_norm(g, s.p);
    return r;
}

} // namespace dpnp
