#pragma once

/**
 * @file coupling.hpp
 * @brief Per-step outer iteration F = F3 o F2 o F1 (Gauss, Darcy, transport),
 *        the time loop, and the uniqueness probe.
 */

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dpnp/darcy.hpp"
#include "dpnp/diagnostics.hpp"
#include "dpnp/poisson.hpp"
#include "dpnp/state.hpp"
#include "dpnp/transport.hpp"

namespace dpnp {

struct FixedPointConfig {
    int max_outer_iters = 50;
    double fp_tol = 1e-8;  ///< relative L2 change of c between outer iterates
    double omega = 1.0;    ///< relaxation in (0, 1]
    double dt = 0.0;
    double t_end = 0.0;
    int max_retries = 3;   ///< dt halvings tried after an outer non-convergence

    void validate() const {
        if (!(omega > 0.0 && omega <= 1.0)) throw InvalidArgument("fixed point: omega must lie in (0, 1]");
        if (!(fp_tol > 0.0)) throw InvalidArgument("fixed point: fp_tol must be > 0");
        if (!(dt > 0.0)) throw InvalidArgument("fixed point: dt must be > 0");
        if (!(t_end >= dt)) throw InvalidArgument("fixed point: t_end must be >= dt");
        if (max_outer_iters < 1) throw InvalidArgument("fixed point: max_outer_iters must be >= 1");
        if (max_retries < 0) throw InvalidArgument("fixed point: max_retries must be >= 0");
    }
    bool operator==(const FixedPointConfig&) const = default;
};

enum class SubOperator { gauss, darcy, transport };

inline const char* to_string(SubOperator op) {
    switch (op) {
    case SubOperator::gauss: return "gauss";
    case SubOperator::darcy: return "darcy";
    case SubOperator::transport: return "transport";
    }
    return "?";
}

/// One sub-solver call. `outer_iter` counts from 1; the field refresh after
/// convergence has `refresh` set.
struct TraceEvent {
    SubOperator op;
    int outer_iter = 0;
    bool refresh = false;
};
using TraceHook = std::function<void(const TraceEvent&)>;

struct StepReport {
    int outer_iters = 0;
    std::vector<double> residual_history;
    bool monotone = true;        ///< residual non-increasing after the first iterate
    int clamp_events = 0;
    double min_before_clamp = 0.0;
    int compat_repairs = 0;
    int poisson_cg_iters = 0;
    int darcy_cg_iters = 0;
    int retries = 0;             ///< dt halvings used
};

struct StepResult {
    SystemState state;
    StepReport report;
};

/// Relative L2 distance over all species jointly, denominator floored at 1e-14.
inline double relative_change(const Grid2D& grid, const SpeciesFields& a, const SpeciesFields& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        for (std::size_t i = 0; i < a[l].size(); ++i) {
            const double d = a[l][i] - b[l][i];
            num += d * d;
            den += a[l][i] * a[l][i];
        }
    }
    const double area = grid.cell_area();
    return std::sqrt(num * area) / std::max(std::sqrt(den * area), 1e-14);
}

namespace detail {

/// F1 then F2 for the concentrations c at time t, writing into `s`.
inline void solve_fields(const Model& m, const SpeciesFields& c, double t, SystemState& s, StepReport& rep,
                         const TraceHook& trace, int outer, bool refresh) {
    s.rho_f = charge_density(c, m.params);
    if (trace) trace({SubOperator::gauss, outer, refresh});
    const CellField* phi_guess = s.phi.size() == m.grid.cell_count() ? &s.phi : nullptr;
    PoissonSolution ps = solve_gauss(m.grid, s.rho_f, m.bc, m.params, t, m.elliptic, phi_guess);
    rep.poisson_cg_iters += ps.cg_iterations;
    rep.compat_repairs += ps.repaired;

    if (trace) trace({SubOperator::darcy, outer, refresh});
    const FaceField force = m.body_force(s.rho_f, ps.E);
    const CellField* p_guess = s.p.size() == m.grid.cell_count() ? &s.p : nullptr;
    DarcySolution ds = solve_darcy(m.grid, force, m.bc, m.params, t, m.elliptic, p_guess);
    rep.darcy_cg_iters += ds.cg_iterations;
    rep.compat_repairs += ds.repaired;

    s.E = std::move(ps.E);
    s.phi = std::move(ps.phi);
    s.q = std::move(ds.q);
    s.p = std::move(ds.p);
}

} // namespace detail

/// State at time t with fields solved from c0. Throws on negative data.
inline SystemState initial_state(const Model& m, const SpeciesFields& c0, double t = 0.0) {
    if (c0.size() != m.params.species_count) throw InvalidArgument("initial_state: species count mismatch");
    for (const CellField& c : c0) {
        if (c.size() != m.grid.cell_count()) throw InvalidArgument("initial_state: field size mismatch");
        if (c.min() < 0.0) throw InvalidArgument("initial_state: negative initial concentration");
    }
    SystemState s;
    s.t = t;
    s.c = c0;
    for (CellField& c : s.c) c.set_role(FieldRole::concentration);
    StepReport ignored;
    detail::solve_fields(m, s.c, t, s, ignored, {}, 0, true);
    return s;
}

/// One backward-Euler step from `start` to start.t + dt. The outer iteration
/// starts at `initial_iterate` when given (c_old is always start.c).
inline StepResult fixed_point_step(const Model& m, const SystemState& start, double dt, const FixedPointConfig& cfg,
                                   const SpeciesFields* initial_iterate = nullptr, const TraceHook& trace = {}) {
    if (!(dt > 0.0)) throw InvalidArgument("fixed_point_step: dt must be > 0");
    const double t = start.t + dt;
    const bool decoupled = m.decoupled();

    StepResult out;
    StepReport& rep = out.report;
    rep.min_before_clamp = 0.0;
    SystemState& s = out.state;
    s.t = t;
    s.phi = start.phi;
    s.p = start.p;

    SpeciesFields ck = initial_iterate ? *initial_iterate : start.c;
    bool converged = false;
    for (int k = 1; k <= cfg.max_outer_iters; ++k) {
        detail::solve_fields(m, ck, t, s, rep, trace, k, false);

        if (trace) trace({SubOperator::transport, k, false});
        TransportStepInput in{start.c, s.E, s.q, dt, t, ck};
        TransportResult tr = step_species(m.grid, in, m.reactions, m.params);
        rep.clamp_events += tr.clamp_events;
        rep.min_before_clamp = std::min(rep.min_before_clamp, tr.min_before_clamp);

        SpeciesFields next = std::move(tr.c);
        if (cfg.omega != 1.0) {
            for (std::size_t l = 0; l < next.size(); ++l)
                for (std::size_t i = 0; i < next[l].size(); ++i)
                    next[l][i] = cfg.omega * next[l][i] + (1.0 - cfg.omega) * ck[l][i];
        }
        const double res = relative_change(m.grid, next, ck);
        if (rep.residual_history.size() >= 2 && res > rep.residual_history.back()) rep.monotone = false;
        rep.residual_history.push_back(res);
        rep.outer_iters = k;
        ck = std::move(next);
        if (decoupled || res <= cfg.fp_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "fixed_point_step: no convergence at t = " << t << " after " << cfg.max_outer_iters
           << " outer iterations; residuals";
        for (double r : rep.residual_history) os << ' ' << r;
        throw OuterNonConvergence(os.str());
    }

    s.c = std::move(ck);
    // Fields consistent with the converged concentrations. In the decoupled
    // case they do not depend on c and are already final.
    if (!decoupled) detail::solve_fields(m, s.c, t, s, rep, trace, rep.outer_iters, true);
    else s.rho_f = charge_density(s.c, m.params);
    return out;
}

/// fixed_point_step with halve-and-retry: after an outer non-convergence the
/// step is redone as 2, 4, ... substeps, at most cfg.max_retries times.
inline StepResult advance(const Model& m, const SystemState& start, double dt, const FixedPointConfig& cfg,
                          const TraceHook& trace = {}) {
    for (int attempt = 0;; ++attempt) {
        try {
            const int sub = 1 << attempt;
            if (sub == 1) return fixed_point_step(m, start, dt, cfg, nullptr, trace);
            StepResult acc;
            SystemState cur = start;
            const double h = dt / sub;
            for (int k = 0; k < sub; ++k) {
                StepResult r = fixed_point_step(m, cur, h, cfg, nullptr, trace);
                StepReport& a = acc.report;
                a.outer_iters += r.report.outer_iters;
                a.residual_history.insert(a.residual_history.end(), r.report.residual_history.begin(),
                                          r.report.residual_history.end());
                a.monotone = a.monotone && r.report.monotone;
                a.clamp_events += r.report.clamp_events;
                a.min_before_clamp = std::min(a.min_before_clamp, r.report.min_before_clamp);
                a.compat_repairs += r.report.compat_repairs;
                a.poisson_cg_iters += r.report.poisson_cg_iters;
                a.darcy_cg_iters += r.report.darcy_cg_iters;
                cur = std::move(r.state);
            }
            cur.t = start.t + dt;
            acc.state = std::move(cur);
            acc.report.retries = attempt;
            return acc;
        } catch (const OuterNonConvergence&) {
            if (attempt >= cfg.max_retries) throw;
        }
    }
}

struct RunOptions {
    bool keep_states = true;
    /// Called once per record (including t = 0) with the matching state.
    std::function<void(const SystemState&, const DiagnosticsRecord&)> observer;
    TraceHook trace;
};

struct RunResult {
    std::vector<SystemState> states;       ///< empty unless keep_states
    std::vector<DiagnosticsRecord> records; ///< one per time level, t = 0 first
};

/// Number of steps: ceil(t_end / dt), ignoring rounding in the ratio.
inline int step_count(const FixedPointConfig& cfg) {
    return static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
}

inline RunResult run(const Model& m, const SpeciesFields& c0, const FixedPointConfig& cfg, const RunOptions& opt = {}) {
    cfg.validate();
    const EnvelopeConstants env = envelope_constants(m.grid, m.params, m.bc, m.reactions, c0);
    RunResult out;
    SystemState s = initial_state(m, c0);
    double running_max = 0.0;

    auto emit = [&](const SystemState& st, const StepReport* rep) {
        DiagnosticsRecord r = make_record(m, st, env);
        running_max = std::max(running_max, r.linf_running_max);
        r.linf_running_max = running_max;
        if (rep) {
            r.outer_iters = rep->outer_iters;
            r.clamp_events = rep->clamp_events;
            r.poisson_cg_iters = rep->poisson_cg_iters;
            r.darcy_cg_iters = rep->darcy_cg_iters;
            r.compat_repairs = rep->compat_repairs;
            r.retries = rep->retries;
            r.min_before_clamp = rep->min_before_clamp;
            r.outer_monotone = rep->monotone;
        }
        if (opt.observer) opt.observer(st, r);
        out.records.push_back(std::move(r));
        if (opt.keep_states) out.states.push_back(st);
    };

    emit(s, nullptr);
    const int n = step_count(cfg);
    for (int k = 1; k <= n; ++k) {
        const double t_next = k == n ? cfg.t_end : k * cfg.dt;
        StepResult r = advance(m, s, t_next - s.t, cfg, opt.trace);
        r.state.t = t_next;
        s = std::move(r.state);
        emit(s, &r.report);
    }
    return out;
}

/// Perturbs each species by zero-mean uniform noise of amplitude `scale`,
/// clips at zero and rescales to the original mass (so the total charge,
/// and with it Gauss compatibility, is unchanged).
inline SpeciesFields perturb_mass_preserving(const Grid2D& grid, const SpeciesFields& c, double scale,
                                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    SpeciesFields out = c;
    for (CellField& cl : out) {
        const double mass = cell_integral(grid, cl);
        std::vector<double> noise(cl.size());
        for (double& v : noise) v = u(rng);
        double avg = 0.0;
        for (double v : noise) avg += v;
        avg /= static_cast<double>(noise.size());
        for (std::size_t i = 0; i < cl.size(); ++i) cl[i] = std::max(cl[i] + noise[i] - avg, 0.0);
        const double now = cell_integral(grid, cl);
        if (now > 0.0) cl *= mass / now;
    }
    return out;
}

/// Solves the step from `start` twice, once from c_old and once from a
/// perturbed outer iterate, and returns the relative L2 distance between the
/// converged concentrations.
inline double uniqueness_probe(const Model& m, const SystemState& start, double dt, const FixedPointConfig& cfg,
                               double scale, std::uint64_t seed = 1) {
    const StepResult ref = fixed_point_step(m, start, dt, cfg);
    if (scale == 0.0) {
        const StepResult again = fixed_point_step(m, start, dt, cfg);
        return relative_change(m.grid, ref.state.c, again.state.c);
    }
    const SpeciesFields c_pert = perturb_mass_preserving(m.grid, start.c, scale, seed);
    const StepResult pert = fixed_point_step(m, start, dt, cfg, &c_pert);
    return relative_change(m.grid, ref.state.c, pert.state.c);
}

} // namespace dpnp
