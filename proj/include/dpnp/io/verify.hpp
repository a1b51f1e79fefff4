#pragma once

/**
 * @file verify.hpp
 * @brief Invariant suite run by `dpnp verify` and by the acceptance checks.
 */

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "dpnp/coupling.hpp"
#include "dpnp/diagnostics.hpp"
#include "dpnp/io/config.hpp"
#include "dpnp/oracle.hpp"

namespace dpnp::io {

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    std::vector<DiagnosticsRecord> records;
    bool ok() const {
        for (const CheckResult& c : checks)
            if (!c.passed) return false;
        return true;
    }
    const CheckResult* find(const std::string& name) const {
        for (const CheckResult& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    double entropy_slack = 1e-10;
    double mass_tol = 1e-11;
    double oracle_tol = 1e-9;
    double growth_limit = 100.0;
    double elliptic_tol = 1e-9;
};

/// True when the data switch off every entropy source: f = sigma = rho_b = 0 and R = 0.
inline bool entropy_dissipative(const Model& m) {
    return m.bc.flux_bound == 0.0 && m.bc.sigma_bound == 0.0 && m.bc.background_bound == 0.0 &&
           m.reactions.is_trivial();
}

/// Largest cell residual of div E = rho_f + rho_b and div q = 0, plus the
/// boundary mismatches and gauge means, for a state at time s.t.
inline double elliptic_defect(const Model& m, const SystemState& s) {
    const Grid2D& g = m.grid;
    const CellField total = s.rho_f + m.bc.background_field(g, s.t);
    const CellField divE = divergence(g, s.E);
    const CellField divq = divergence(g, s.q);
    double scale = 1.0;
    for (double v : total.values()) scale = std::max(scale, std::abs(v));
    double d = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        d = std::max(d, std::abs(divE[c] - total[c]) / scale);
        d = std::max(d, std::abs(divq[c]));
    }
    const FaceField sigma = m.bc.sigma_field(g, s.t), f = m.bc.flux_field(g, s.t);
    for (std::size_t b : g.boundary_faces()) {
        d = std::max(d, std::abs(s.E[b] - sigma[b]));
        d = std::max(d, std::abs(s.q[b] - f[b]));
    }
    d = std::max(d, std::abs(mean(s.phi)));
    d = std::max(d, std::abs(mean(s.p)));
    return d;
}

/// Model copy with tight linear and outer tolerances, used for the oracle comparison.
inline Model tightened(const Model& m) {
    Model t = m;
    t.elliptic.cg_tol = 1e-14;
    return t;
}

/// Runs the scenario and checks every monitored invariant.
inline VerifyReport verify_scenario(const Scenario& sc, const VerifyOptions& opt = {}) {
    const Model& m = sc.model;
    const FixedPointConfig& fp = sc.fixed_point;
    VerifyReport rep;

    double min_before_clamp = 0.0;
    int clamp_events = 0;
    double max_defect = 0.0;
    RunOptions ro;
    ro.keep_states = false;
    ro.observer = [&](const SystemState& s, const DiagnosticsRecord& r) {
        min_before_clamp = std::min(min_before_clamp, r.min_before_clamp);
        clamp_events += r.clamp_events;
        max_defect = std::max(max_defect, elliptic_defect(m, s));
    };
    rep.records = run(m, sc.initial, fp, ro).records;
    const std::vector<DiagnosticsRecord>& recs = rep.records;

    auto add = [&](const std::string& name, bool ok, const std::string& detail) {
        rep.checks.push_back({name, ok, detail});
    };
    auto num = [](double v) {
        std::ostringstream os;
        os.precision(6);
        os << v;
        return os.str();
    };

    add("nonnegativity", min_before_clamp >= kClampThreshold,
        "min before clamp " + num(min_before_clamp) + ", clamp events " + std::to_string(clamp_events));

    {
        int violations = 0;
        double worst = -1e300;
        for (const DiagnosticsRecord& r : recs) {
            if (!r.entropy_within_envelope(opt.entropy_slack)) ++violations;
            worst = std::max(worst, r.entropy - r.entropy_env);
        }
        add("entropy_envelope", violations == 0,
            std::to_string(violations) + " violations, max(entropy - envelope) " + num(worst));
    }
    {
        int violations = 0;
        for (const DiagnosticsRecord& r : recs)
            if (!r.energy_within_envelope()) ++violations;
        add("energy_envelope", violations == 0,
            std::to_string(violations) + " violations, log envelope at t_end " + num(recs.back().log_energy_env));
    }

    if (entropy_dissipative(m)) {
        double worst = -1e300;
        for (std::size_t k = 1; k < recs.size(); ++k) worst = std::max(worst, recs[k].entropy - recs[k - 1].entropy);
        add("entropy_dissipation", worst <= opt.entropy_slack, "max step increase " + num(worst));
    }

    if (m.reactions.is_trivial()) {
        double worst = 0.0;
        for (std::size_t l = 0; l < m.params.species_count; ++l) {
            const double m0 = recs.front().species[l].mass;
            for (const DiagnosticsRecord& r : recs) {
                const double drift = std::abs(r.species[l].mass - m0) / std::max(std::abs(m0), 1e-300);
                if (m0 != 0.0) worst = std::max(worst, drift);
                else worst = std::max(worst, std::abs(r.species[l].mass));
            }
        }
        add("mass_conservation", worst <= opt.mass_tol, "max relative drift " + num(worst));
    }

    {
        double base = 0.0;
        for (const SpeciesStats& s : recs.front().species) base = std::max(base, s.linf);
        bool ok = true;
        double worst_ratio = 0.0;
        for (std::size_t l = 0; l < m.params.species_count; ++l) {
            const double own = recs.front().species[l].linf;
            const double ref = own > 0.0 ? own : base;
            for (const DiagnosticsRecord& r : recs) {
                const double v = r.species[l].linf;
                if (!std::isfinite(v) || v > opt.growth_limit * ref) ok = false;
                if (ref > 0.0) worst_ratio = std::max(worst_ratio, v / ref);
            }
        }
        add("boundedness", ok, "max ||c_l||_inf / initial " + num(worst_ratio));
    }

    add("elliptic_invariants", max_defect <= opt.elliptic_tol, "max defect " + num(max_defect));

    {
        const SystemState s0 = initial_state(m, sc.initial);
        double worst = 0.0;
        for (double scale : {1e-3, 1e-1}) {
            worst = std::max(worst, uniqueness_probe(m, s0, fp.dt, fp, scale, opt.seed));
        }
        add("uniqueness", worst <= 10.0 * fp.fp_tol, "max relative distance " + num(worst));
    }

    if (m.grid.cell_count() <= OracleOptions::max_cells) {
        const Model tm = tightened(m);
        FixedPointConfig tfp = fp;
        tfp.fp_tol = 1e-14;
        tfp.max_outer_iters = std::max(tfp.max_outer_iters, 500);
        SystemState s = initial_state(tm, sc.initial);
        double worst = 0.0;
        const int steps = std::min(step_count(fp), 5);
        for (int k = 0; k < steps; ++k) {
            const StepResult mod = fixed_point_step(tm, s, fp.dt, tfp);
            const OracleResult orc = monolithic_step(tm, s, fp.dt);
            worst = std::max(worst, max_abs_difference(mod.state, orc.state));
            s = mod.state;
        }
        add("oracle_equivalence", worst <= opt.oracle_tol,
            "max |modular - monolithic| " + num(worst) + " over " + std::to_string(steps) + " steps");
    }
    return rep;
}

} // namespace dpnp::io
