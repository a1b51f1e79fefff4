#pragma once

/**
 * @file config.hpp
 * @brief YAML scenario files: parsing with line-anchored errors, serialisation,
 *        and translation into a validated Model.
 *
 * Units: lengths in m, times in s, viscosity in Pa s, permittivity in F/m,
 * elementary charge in C, thermal energy k_B T in J, diffusivities and
 * permeability in m^2, concentrations in mol/m^3, sigma in C/m^2, fluid flux
 * in m/s, rho_b in C/m^3. Any consistent nondimensional set works as well.
 */

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "dpnp/coupling.hpp"
#include "dpnp/errors.hpp"
#include "dpnp/model.hpp"

namespace dpnp::io {

enum class ProfileKind { constant, gaussian_bump, checkerboard, cosine, tabulated };

inline const char* to_string(ProfileKind k) {
    switch (k) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::gaussian_bump: return "gaussian_bump";
    case ProfileKind::checkerboard: return "checkerboard";
    case ProfileKind::cosine: return "cosine";
    case ProfileKind::tabulated: return "tabulated";
    }
    return "?";
}

/// Named analytic profile, evaluated at a point; `tabulated` indexes by
/// cell (row-major) or by position along a boundary side.
struct Profile {
    ProfileKind kind = ProfileKind::constant;
    double value = 0.0;                        ///< constant
    double amplitude = 0.0;                    ///< gaussian_bump, cosine
    double offset = 0.0;                       ///< gaussian_bump, cosine
    std::array<double, 2> center{0.5, 0.5};    ///< gaussian_bump
    double width = 0.1;                        ///< gaussian_bump
    double low = 0.0;                          ///< checkerboard
    double high = 1.0;                         ///< checkerboard
    std::array<double, 2> period{0.25, 0.25};  ///< checkerboard tile size
    std::array<double, 2> wavenumber{1.0, 1.0};///< cosine, in units of pi / length
    std::vector<double> values;                ///< tabulated

    static Profile constant_value(double v) {
        Profile p;
        p.value = v;
        return p;
    }

    double operator()(double x, double y, std::size_t index) const {
        switch (kind) {
        case ProfileKind::constant: return value;
        case ProfileKind::gaussian_bump: {
            const double dx = x - center[0], dy = y - center[1];
            return offset + amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
        }
        case ProfileKind::checkerboard: {
            const long a = static_cast<long>(std::floor(x / period[0]));
            const long b = static_cast<long>(std::floor(y / period[1]));
            return ((a + b) % 2 == 0) ? low : high;
        }
        case ProfileKind::cosine:
            return offset + amplitude * std::cos(wavenumber[0] * std::numbers::pi * x) *
                                std::cos(wavenumber[1] * std::numbers::pi * y);
        case ProfileKind::tabulated:
            if (index >= values.size()) throw InvalidArgument("tabulated profile: index out of range");
            return values[index];
        }
        return 0.0;
    }

    /// Upper bound of |profile| over the domain.
    double bound() const {
        switch (kind) {
        case ProfileKind::constant: return std::abs(value);
        case ProfileKind::gaussian_bump:
        case ProfileKind::cosine: return std::abs(offset) + std::abs(amplitude);
        case ProfileKind::checkerboard: return std::max(std::abs(low), std::abs(high));
        case ProfileKind::tabulated: {
            double m = 0.0;
            for (double v : values) m = std::max(m, std::abs(v));
            return m;
        }
        }
        return 0.0;
    }

    bool operator==(const Profile&) const = default;
};

struct SideProfiles {
    Profile left, right, bottom, top;

    const Profile& on(BoundarySide s) const {
        switch (s) {
        case BoundarySide::left: return left;
        case BoundarySide::right: return right;
        case BoundarySide::bottom: return bottom;
        default: return top;
        }
    }
    double bound() const { return std::max({left.bound(), right.bound(), bottom.bound(), top.bound()}); }
    bool operator==(const SideProfiles&) const = default;
};

struct GridConfig {
    int nx = 16, ny = 16;
    double lx = 1.0, ly = 1.0;
    bool operator==(const GridConfig&) const = default;
};

struct TimeConfig {
    double dt = 0.01;
    double t_end = 1.0;
    bool operator==(const TimeConfig&) const = default;
};

struct ParamsConfig {
    double porosity = 1.0;
    double viscosity = 1.0;
    double permittivity = 1.0;
    double elementary_charge = 1.0;
    double thermal_energy = 1.0;
    double charge_prefactor = 1.0;
    bool charge_prefactor_set = false; ///< false: defaults to elementary_charge
    std::array<double, 2> permeability{1.0, 1.0};
    bool operator==(const ParamsConfig&) const = default;
};

struct SpeciesConfig {
    std::string name;
    int valency = 0;
    std::array<double, 2> diffusivity{1.0, 1.0};
    Profile initial;
    bool operator==(const SpeciesConfig&) const = default;
};

struct BoundaryConfig {
    SideProfiles sigma;
    SideProfiles fluid_flux;
    Profile rho_b;
    bool operator==(const BoundaryConfig&) const = default;
};

struct SolverConfig {
    double cg_tol = 1e-10;
    double fp_tol = 1e-8;
    int max_outer_iters = 50;
    double omega = 1.0;
    bool jacobi = false;
    double compat_tol = 0.0; ///< 0: 1e-10 * domain area
    bool repair_compatibility = true;
    int max_cg_iters = 10000;
    int max_retries = 3;
    bool operator==(const SolverConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    int vtk_every = 0; ///< 0: no snapshots
    std::string csv_path = "diagnostics.csv";
    bool operator==(const OutputConfig&) const = default;
};

/// Line of each top-level section in the source (1-based); ignored by ==.
struct SourceLines {
    std::string file;
    std::map<std::string, int> lines;
    int line(const std::string& key) const {
        const auto it = lines.find(key);
        return it == lines.end() ? 1 : it->second;
    }
    bool operator==(const SourceLines&) const { return true; }
};

struct ScenarioConfig {
    std::string name;
    std::string description;
    GridConfig grid;
    TimeConfig time;
    ParamsConfig params;
    std::vector<SpeciesConfig> species;
    ReactionSpec reactions;
    BoundaryConfig boundary;
    SolverConfig solver;
    OutputConfig output;
    SourceLines source;
    bool operator==(const ScenarioConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

class Reader {
public:
    explicit Reader(std::string file) : file_(std::move(file)) {}

    [[noreturn]] void fail(const YAML::Mark& mark, const std::string& msg) const {
        throw ConfigError(file_ + ":" + std::to_string(mark.line + 1) + ": " + msg);
    }
    [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const { fail(n.Mark(), msg); }

    void expect_map(const YAML::Node& n, const std::string& what) const {
        if (!n.IsMap()) fail(n, what + " must be a mapping");
    }

    /// Rejects keys outside `allowed`.
    void check_keys(const YAML::Node& n, const std::string& what, std::initializer_list<const char*> allowed) const {
        expect_map(n, what);
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = n.begin(); it != n.end(); ++it) {
            const std::string key = it->first.as<std::string>();
            if (!ok.count(key)) fail(it->first, "unknown key '" + key + "' in " + what);
        }
    }

    template <class T>
    T scalar(const YAML::Node& n, const std::string& what) const {
        if (!n.IsScalar()) fail(n, what + " must be a scalar");
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, "cannot read " + what + " from '" + n.Scalar() + "'");
        }
    }

    template <class T>
    void opt(const YAML::Node& parent, const char* key, T& out, const std::string& what) const {
        const YAML::Node n = parent[key];
        if (n) out = scalar<T>(n, what + "." + key);
    }

    template <class T>
    T req(const YAML::Node& parent, const char* key, const std::string& what) const {
        const YAML::Node n = parent[key];
        if (!n) fail(parent, "missing key '" + std::string(key) + "' in " + what);
        return scalar<T>(n, what + "." + key);
    }

    template <class T>
    std::vector<T> list(const YAML::Node& n, const std::string& what) const {
        if (!n.IsSequence()) fail(n, what + " must be a list");
        std::vector<T> out;
        for (const YAML::Node& e : n) out.push_back(scalar<T>(e, what + " entry"));
        return out;
    }

    std::array<double, 2> pair(const YAML::Node& n, const std::string& what) const {
        if (n.IsScalar()) {
            const double v = scalar<double>(n, what);
            return {v, v};
        }
        const std::vector<double> v = list<double>(n, what);
        if (v.size() != 2) fail(n, what + " needs two entries [x, y]");
        return {v[0], v[1]};
    }

    Profile profile(const YAML::Node& n, const std::string& what) const {
        if (n.IsScalar()) return Profile::constant_value(scalar<double>(n, what));
        expect_map(n, what);
        Profile p;
        const std::string kind = req<std::string>(n, "profile", what);
        if (kind == "constant") {
            check_keys(n, what, {"profile", "value"});
            p.value = req<double>(n, "value", what);
        } else if (kind == "gaussian_bump") {
            check_keys(n, what, {"profile", "amplitude", "offset", "center", "width"});
            p.kind = ProfileKind::gaussian_bump;
            p.amplitude = req<double>(n, "amplitude", what);
            opt(n, "offset", p.offset, what);
            if (n["center"]) p.center = pair(n["center"], what + ".center");
            opt(n, "width", p.width, what);
            if (!(p.width > 0.0)) fail(n, what + ".width must be > 0");
        } else if (kind == "checkerboard") {
            check_keys(n, what, {"profile", "low", "high", "period"});
            p.kind = ProfileKind::checkerboard;
            p.low = req<double>(n, "low", what);
            p.high = req<double>(n, "high", what);
            if (n["period"]) p.period = pair(n["period"], what + ".period");
            if (!(p.period[0] > 0.0 && p.period[1] > 0.0)) fail(n, what + ".period must be > 0");
        } else if (kind == "cosine") {
            check_keys(n, what, {"profile", "amplitude", "offset", "wavenumber"});
            p.kind = ProfileKind::cosine;
            p.amplitude = req<double>(n, "amplitude", what);
            opt(n, "offset", p.offset, what);
            if (n["wavenumber"]) p.wavenumber = pair(n["wavenumber"], what + ".wavenumber");
        } else if (kind == "tabulated") {
            check_keys(n, what, {"profile", "values"});
            p.kind = ProfileKind::tabulated;
            if (!n["values"]) fail(n, "missing key 'values' in " + what);
            p.values = list<double>(n["values"], what + ".values");
        } else {
            fail(n["profile"], "unknown profile '" + kind +
                                   "' (expected constant, gaussian_bump, checkerboard, cosine or tabulated)");
        }
        return p;
    }

    SideProfiles sides(const YAML::Node& n, const std::string& what) const {
        if (n.IsScalar() || (n.IsMap() && n["profile"])) {
            const Profile p = profile(n, what);
            return {p, p, p, p};
        }
        check_keys(n, what, {"left", "right", "bottom", "top"});
        SideProfiles s;
        if (n["left"]) s.left = profile(n["left"], what + ".left");
        if (n["right"]) s.right = profile(n["right"], what + ".right");
        if (n["bottom"]) s.bottom = profile(n["bottom"], what + ".bottom");
        if (n["top"]) s.top = profile(n["top"], what + ".top");
        return s;
    }

    ReactionSpec reactions(const YAML::Node& n) const {
        ReactionSpec r;
        const std::string kind = req<std::string>(n, "kind", "reactions");
        if (kind == "none") {
            check_keys(n, "reactions", {"kind"});
        } else if (kind == "linear_decay") {
            check_keys(n, "reactions", {"kind", "rates"});
            r.kind = ReactionKind::linear_decay;
            if (!n["rates"]) fail(n, "missing key 'rates' in reactions");
            r.decay_rates = list<double>(n["rates"], "reactions.rates");
        } else if (kind == "mass_action") {
            check_keys(n, "reactions", {"kind", "reactions", "lipschitz_box"});
            r.kind = ReactionKind::mass_action;
            opt(n, "lipschitz_box", r.lipschitz_box, "reactions");
            if (!n["reactions"] || !n["reactions"].IsSequence()) fail(n, "reactions.reactions must be a list");
            for (const YAML::Node& e : n["reactions"]) {
                check_keys(e, "mass-action reaction", {"reactants", "products", "rate"});
                MassActionReaction m;
                if (!e["reactants"] || !e["products"]) fail(e, "mass-action reaction needs reactants and products");
                m.reactants = list<int>(e["reactants"], "reactants");
                m.products = list<int>(e["products"], "products");
                m.rate = req<double>(e, "rate", "mass-action reaction");
                for (int v : m.reactants)
                    if (v < 0) fail(e["reactants"], "stoichiometric coefficients must be >= 0");
                for (int v : m.products)
                    if (v < 0) fail(e["products"], "stoichiometric coefficients must be >= 0");
                r.reactions.push_back(std::move(m));
            }
        } else if (kind == "custom_lipschitz") {
            check_keys(n, "reactions", {"kind", "terms", "lipschitz", "lipschitz_box"});
            r.kind = ReactionKind::custom_lipschitz;
            opt(n, "lipschitz_box", r.lipschitz_box, "reactions");
            if (!n["lipschitz"]) fail(n, "missing key 'lipschitz' in reactions");
            r.declared_lipschitz = list<double>(n["lipschitz"], "reactions.lipschitz");
            if (!n["terms"] || !n["terms"].IsSequence()) fail(n, "reactions.terms must be a list");
            for (const YAML::Node& e : n["terms"]) {
                check_keys(e, "reaction term", {"target", "source", "x", "y"});
                CustomReactionTerm t;
                t.target = req<std::size_t>(e, "target", "reaction term");
                t.source = req<std::size_t>(e, "source", "reaction term");
                if (!e["x"] || !e["y"]) fail(e, "reaction term needs x and y tables");
                t.table.x = list<double>(e["x"], "x");
                t.table.y = list<double>(e["y"], "y");
                if (t.table.x.size() != t.table.y.size() || t.table.x.size() < 2)
                    fail(e, "reaction term tables need equal lengths >= 2");
                for (std::size_t k = 1; k < t.table.x.size(); ++k)
                    if (!(t.table.x[k] > t.table.x[k - 1])) fail(e["x"], "table abscissae must increase");
                r.custom_terms.push_back(std::move(t));
            }
        } else {
            fail(n["kind"], "unknown reaction kind '" + kind + "'");
        }
        return r;
    }

    const std::string& file() const { return file_; }

private:
    std::string file_;
};

} // namespace detail

/// Parses a scenario. Errors carry `name:line:`.
inline ScenarioConfig parse_config(const std::string& text, const std::string& name = "<config>") {
    const detail::Reader rd(name);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        rd.fail(e.mark, e.msg);
    }
    if (!root || root.IsNull()) throw ConfigError(name + ":1: empty configuration");
    rd.check_keys(root, "scenario",
                  {"name", "description", "grid", "time", "params", "species", "reactions", "boundary", "solver",
                   "output"});

    ScenarioConfig cfg;
    cfg.source.file = name;
    for (auto it = root.begin(); it != root.end(); ++it)
        cfg.source.lines[it->first.as<std::string>()] = it->first.Mark().line + 1;

    rd.opt(root, "name", cfg.name, "scenario");
    rd.opt(root, "description", cfg.description, "scenario");

    if (!root["grid"]) rd.fail(root, "missing section 'grid'");
    {
        const YAML::Node g = root["grid"];
        rd.check_keys(g, "grid", {"nx", "ny", "lx", "ly"});
        cfg.grid.nx = rd.req<int>(g, "nx", "grid");
        cfg.grid.ny = rd.req<int>(g, "ny", "grid");
        rd.opt(g, "lx", cfg.grid.lx, "grid");
        rd.opt(g, "ly", cfg.grid.ly, "grid");
        if (cfg.grid.nx < 1 || cfg.grid.ny < 1) rd.fail(g, "grid.nx and grid.ny must be >= 1");
        if (!(cfg.grid.lx > 0.0 && cfg.grid.ly > 0.0)) rd.fail(g, "grid.lx and grid.ly must be > 0");
    }

    if (!root["time"]) rd.fail(root, "missing section 'time'");
    {
        const YAML::Node t = root["time"];
        rd.check_keys(t, "time", {"dt", "t_end"});
        cfg.time.dt = rd.req<double>(t, "dt", "time");
        cfg.time.t_end = rd.req<double>(t, "t_end", "time");
        if (!(cfg.time.dt > 0.0)) rd.fail(t, "time.dt must be > 0");
        if (!(cfg.time.t_end >= cfg.time.dt)) rd.fail(t, "time.t_end must be >= time.dt");
    }

    if (const YAML::Node p = root["params"]) {
        rd.check_keys(p, "params",
                      {"porosity", "viscosity", "permittivity", "elementary_charge", "thermal_energy",
                       "charge_prefactor", "permeability"});
        ParamsConfig& pc = cfg.params;
        rd.opt(p, "porosity", pc.porosity, "params");
        rd.opt(p, "viscosity", pc.viscosity, "params");
        rd.opt(p, "permittivity", pc.permittivity, "params");
        rd.opt(p, "elementary_charge", pc.elementary_charge, "params");
        rd.opt(p, "thermal_energy", pc.thermal_energy, "params");
        if (p["charge_prefactor"]) {
            pc.charge_prefactor = rd.scalar<double>(p["charge_prefactor"], "params.charge_prefactor");
            pc.charge_prefactor_set = true;
        }
        if (p["permeability"]) pc.permeability = rd.pair(p["permeability"], "params.permeability");
    }
    if (!cfg.params.charge_prefactor_set) cfg.params.charge_prefactor = cfg.params.elementary_charge;

    if (!root["species"] || !root["species"].IsSequence() || root["species"].size() == 0)
        rd.fail(root["species"] ? root["species"] : root, "species must be a non-empty list");
    for (const YAML::Node& s : root["species"]) {
        rd.check_keys(s, "species entry", {"name", "valency", "diffusivity", "initial"});
        SpeciesConfig sc;
        sc.name = rd.req<std::string>(s, "name", "species entry");
        sc.valency = rd.req<int>(s, "valency", "species entry");
        if (s["diffusivity"]) sc.diffusivity = rd.pair(s["diffusivity"], "species." + sc.name + ".diffusivity");
        if (!s["initial"]) rd.fail(s, "species '" + sc.name + "' needs an initial profile");
        sc.initial = rd.profile(s["initial"], "species." + sc.name + ".initial");
        if (sc.initial.kind == ProfileKind::tabulated &&
            sc.initial.values.size() != static_cast<std::size_t>(cfg.grid.nx) * cfg.grid.ny)
            rd.fail(s["initial"], "tabulated initial data needs nx*ny values");
        for (const SpeciesConfig& other : cfg.species)
            if (other.name == sc.name) rd.fail(s, "duplicate species name '" + sc.name + "'");
        cfg.species.push_back(std::move(sc));
    }

    if (const YAML::Node r = root["reactions"]) cfg.reactions = rd.reactions(r);

    if (const YAML::Node b = root["boundary"]) {
        rd.check_keys(b, "boundary", {"sigma", "fluid_flux", "rho_b"});
        if (b["sigma"]) cfg.boundary.sigma = rd.sides(b["sigma"], "boundary.sigma");
        if (b["fluid_flux"]) cfg.boundary.fluid_flux = rd.sides(b["fluid_flux"], "boundary.fluid_flux");
        if (b["rho_b"]) cfg.boundary.rho_b = rd.profile(b["rho_b"], "boundary.rho_b");
        auto check_side_table = [&](const SideProfiles& sp, const YAML::Node& n, const char* what) {
            const std::pair<const Profile*, int> sides[] = {
                {&sp.left, cfg.grid.ny}, {&sp.right, cfg.grid.ny}, {&sp.bottom, cfg.grid.nx}, {&sp.top, cfg.grid.nx}};
            for (const auto& [p, count] : sides)
                if (p->kind == ProfileKind::tabulated && p->values.size() != static_cast<std::size_t>(count))
                    rd.fail(n, std::string(what) + ": tabulated side needs one value per boundary face");
        };
        if (b["sigma"]) check_side_table(cfg.boundary.sigma, b["sigma"], "boundary.sigma");
        if (b["fluid_flux"]) check_side_table(cfg.boundary.fluid_flux, b["fluid_flux"], "boundary.fluid_flux");
        if (cfg.boundary.rho_b.kind == ProfileKind::tabulated &&
            cfg.boundary.rho_b.values.size() != static_cast<std::size_t>(cfg.grid.nx) * cfg.grid.ny)
            rd.fail(b["rho_b"], "tabulated rho_b needs nx*ny values");
    }

    if (const YAML::Node s = root["solver"]) {
        rd.check_keys(s, "solver",
                      {"cg_tol", "fp_tol", "max_outer_iters", "omega", "jacobi", "compat_tol",
                       "repair_compatibility", "max_cg_iters", "max_retries"});
        SolverConfig& sc = cfg.solver;
        rd.opt(s, "cg_tol", sc.cg_tol, "solver");
        rd.opt(s, "fp_tol", sc.fp_tol, "solver");
        rd.opt(s, "max_outer_iters", sc.max_outer_iters, "solver");
        rd.opt(s, "omega", sc.omega, "solver");
        rd.opt(s, "jacobi", sc.jacobi, "solver");
        rd.opt(s, "compat_tol", sc.compat_tol, "solver");
        rd.opt(s, "repair_compatibility", sc.repair_compatibility, "solver");
        rd.opt(s, "max_cg_iters", sc.max_cg_iters, "solver");
        rd.opt(s, "max_retries", sc.max_retries, "solver");
        if (!(sc.omega > 0.0 && sc.omega <= 1.0)) rd.fail(s, "solver.omega must lie in (0, 1]");
        if (!(sc.fp_tol > 0.0) || !(sc.cg_tol > 0.0)) rd.fail(s, "solver tolerances must be > 0");
        if (sc.max_outer_iters < 1 || sc.max_cg_iters < 1) rd.fail(s, "solver iteration caps must be >= 1");
        if (sc.max_retries < 0) rd.fail(s, "solver.max_retries must be >= 0");
    }

    if (const YAML::Node o = root["output"]) {
        rd.check_keys(o, "output", {"directory", "vtk_every", "csv_path"});
        rd.opt(o, "directory", cfg.output.directory, "output");
        rd.opt(o, "vtk_every", cfg.output.vtk_every, "output");
        rd.opt(o, "csv_path", cfg.output.csv_path, "output");
        if (cfg.output.vtk_every < 0) rd.fail(o, "output.vtk_every must be >= 0");
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ":1: cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Serialisation
// ---------------------------------------------------------------------------

namespace detail {

inline void emit_pair(YAML::Emitter& out, const std::array<double, 2>& v) {
    out << YAML::Flow << YAML::BeginSeq << v[0] << v[1] << YAML::EndSeq;
}

inline void emit_profile(YAML::Emitter& out, const Profile& p) {
    out << YAML::BeginMap << YAML::Key << "profile" << YAML::Value << to_string(p.kind);
    switch (p.kind) {
    case ProfileKind::constant: out << YAML::Key << "value" << YAML::Value << p.value; break;
    case ProfileKind::gaussian_bump:
        out << YAML::Key << "amplitude" << YAML::Value << p.amplitude;
        out << YAML::Key << "offset" << YAML::Value << p.offset;
        out << YAML::Key << "center" << YAML::Value;
        emit_pair(out, p.center);
        out << YAML::Key << "width" << YAML::Value << p.width;
        break;
    case ProfileKind::checkerboard:
        out << YAML::Key << "low" << YAML::Value << p.low;
        out << YAML::Key << "high" << YAML::Value << p.high;
        out << YAML::Key << "period" << YAML::Value;
        emit_pair(out, p.period);
        break;
    case ProfileKind::cosine:
        out << YAML::Key << "amplitude" << YAML::Value << p.amplitude;
        out << YAML::Key << "offset" << YAML::Value << p.offset;
        out << YAML::Key << "wavenumber" << YAML::Value;
        emit_pair(out, p.wavenumber);
        break;
    case ProfileKind::tabulated:
        out << YAML::Key << "values" << YAML::Value << YAML::Flow << p.values;
        break;
    }
    out << YAML::EndMap;
}

inline void emit_sides(YAML::Emitter& out, const SideProfiles& s) {
    out << YAML::BeginMap;
    out << YAML::Key << "left" << YAML::Value;
    emit_profile(out, s.left);
    out << YAML::Key << "right" << YAML::Value;
    emit_profile(out, s.right);
    out << YAML::Key << "bottom" << YAML::Value;
    emit_profile(out, s.bottom);
    out << YAML::Key << "top" << YAML::Value;
    emit_profile(out, s.top);
    out << YAML::EndMap;
}

} // namespace detail

/// YAML text that parses back to an equal ScenarioConfig.
inline std::string serialize_config(const ScenarioConfig& c) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << c.name;
    out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted << c.description;

    out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "nx" << YAML::Value << c.grid.nx << YAML::Key << "ny" << YAML::Value << c.grid.ny;
    out << YAML::Key << "lx" << YAML::Value << c.grid.lx << YAML::Key << "ly" << YAML::Value << c.grid.ly;
    out << YAML::EndMap;

    out << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dt" << YAML::Value << c.time.dt << YAML::Key << "t_end" << YAML::Value << c.time.t_end;
    out << YAML::EndMap;

    out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "porosity" << YAML::Value << c.params.porosity;
    out << YAML::Key << "viscosity" << YAML::Value << c.params.viscosity;
    out << YAML::Key << "permittivity" << YAML::Value << c.params.permittivity;
    out << YAML::Key << "elementary_charge" << YAML::Value << c.params.elementary_charge;
    out << YAML::Key << "thermal_energy" << YAML::Value << c.params.thermal_energy;
    if (c.params.charge_prefactor_set)
        out << YAML::Key << "charge_prefactor" << YAML::Value << c.params.charge_prefactor;
    out << YAML::Key << "permeability" << YAML::Value;
    detail::emit_pair(out, c.params.permeability);
    out << YAML::EndMap;

    out << YAML::Key << "species" << YAML::Value << YAML::BeginSeq;
    for (const SpeciesConfig& s : c.species) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << s.name;
        out << YAML::Key << "valency" << YAML::Value << s.valency;
        out << YAML::Key << "diffusivity" << YAML::Value;
        detail::emit_pair(out, s.diffusivity);
        out << YAML::Key << "initial" << YAML::Value;
        detail::emit_profile(out, s.initial);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    const ReactionSpec& r = c.reactions;
    out << YAML::Key << "reactions" << YAML::Value << YAML::BeginMap;
    switch (r.kind) {
    case ReactionKind::none: out << YAML::Key << "kind" << YAML::Value << "none"; break;
    case ReactionKind::linear_decay:
        out << YAML::Key << "kind" << YAML::Value << "linear_decay";
        out << YAML::Key << "rates" << YAML::Value << YAML::Flow << r.decay_rates;
        break;
    case ReactionKind::mass_action:
        out << YAML::Key << "kind" << YAML::Value << "mass_action";
        out << YAML::Key << "lipschitz_box" << YAML::Value << r.lipschitz_box;
        out << YAML::Key << "reactions" << YAML::Value << YAML::BeginSeq;
        for (const MassActionReaction& m : r.reactions) {
            out << YAML::BeginMap;
            out << YAML::Key << "reactants" << YAML::Value << YAML::Flow << m.reactants;
            out << YAML::Key << "products" << YAML::Value << YAML::Flow << m.products;
            out << YAML::Key << "rate" << YAML::Value << m.rate;
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
        break;
    case ReactionKind::custom_lipschitz:
        out << YAML::Key << "kind" << YAML::Value << "custom_lipschitz";
        out << YAML::Key << "lipschitz_box" << YAML::Value << r.lipschitz_box;
        out << YAML::Key << "lipschitz" << YAML::Value << YAML::Flow << r.declared_lipschitz;
        out << YAML::Key << "terms" << YAML::Value << YAML::BeginSeq;
        for (const CustomReactionTerm& t : r.custom_terms) {
            out << YAML::BeginMap;
            out << YAML::Key << "target" << YAML::Value << t.target;
            out << YAML::Key << "source" << YAML::Value << t.source;
            out << YAML::Key << "x" << YAML::Value << YAML::Flow << t.table.x;
            out << YAML::Key << "y" << YAML::Value << YAML::Flow << t.table.y;
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
        break;
    }
    out << YAML::EndMap;

    out << YAML::Key << "boundary" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "sigma" << YAML::Value;
    detail::emit_sides(out, c.boundary.sigma);
    out << YAML::Key << "fluid_flux" << YAML::Value;
    detail::emit_sides(out, c.boundary.fluid_flux);
    out << YAML::Key << "rho_b" << YAML::Value;
    detail::emit_profile(out, c.boundary.rho_b);
    out << YAML::EndMap;

    const SolverConfig& s = c.solver;
    out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "cg_tol" << YAML::Value << s.cg_tol;
    out << YAML::Key << "fp_tol" << YAML::Value << s.fp_tol;
    out << YAML::Key << "max_outer_iters" << YAML::Value << s.max_outer_iters;
    out << YAML::Key << "omega" << YAML::Value << s.omega;
    out << YAML::Key << "jacobi" << YAML::Value << s.jacobi;
    out << YAML::Key << "compat_tol" << YAML::Value << s.compat_tol;
    out << YAML::Key << "repair_compatibility" << YAML::Value << s.repair_compatibility;
    out << YAML::Key << "max_cg_iters" << YAML::Value << s.max_cg_iters;
    out << YAML::Key << "max_retries" << YAML::Value << s.max_retries;
    out << YAML::EndMap;

    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "directory" << YAML::Value << YAML::DoubleQuoted << c.output.directory;
    out << YAML::Key << "vtk_every" << YAML::Value << c.output.vtk_every;
    out << YAML::Key << "csv_path" << YAML::Value << YAML::DoubleQuoted << c.output.csv_path;
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Model construction
// ---------------------------------------------------------------------------

struct Scenario {
    std::string name;
    Model model;
    SpeciesFields initial;
    FixedPointConfig fixed_point;
    OutputConfig output;
    std::vector<std::string> species_names;
    ValidationReport report;
};

inline CellField sample_cells(const Grid2D& g, const Profile& p) {
    CellField out = g.make_cell_field();
    for (std::size_t c = 0; c < g.cell_count(); ++c) out[c] = p(g.cell_x(c), g.cell_y(c), c);
    return out;
}

/// Builds and validates the model; a failed assumption is a ConfigError
/// anchored at the responsible section.
inline Scenario build_scenario(const ScenarioConfig& cfg) {
    const Grid2D grid(cfg.grid.nx, cfg.grid.ny, cfg.grid.lx, cfg.grid.ly);

    ModelParams p;
    p.porosity = cfg.params.porosity;
    p.viscosity = cfg.params.viscosity;
    p.permittivity = cfg.params.permittivity;
    p.elementary_charge = cfg.params.elementary_charge;
    p.thermal_energy = cfg.params.thermal_energy;
    p.charge_prefactor = cfg.params.charge_prefactor;
    p.permeability = DiagTensor{cfg.params.permeability[0], cfg.params.permeability[1]};
    p.species_count = cfg.species.size();
    std::vector<std::string> names;
    SpeciesFields initial;
    for (const SpeciesConfig& s : cfg.species) {
        p.valencies.push_back(s.valency);
        p.diffusivities.push_back(DiagTensor{s.diffusivity[0], s.diffusivity[1]});
        names.push_back(s.name);
        CellField c0 = sample_cells(grid, s.initial);
        c0.set_role(FieldRole::concentration);
        initial.push_back(std::move(c0));
    }

    BoundaryData bc;
    const SideProfiles sigma = cfg.boundary.sigma, flux = cfg.boundary.fluid_flux;
    const Profile rho_b = cfg.boundary.rho_b;
    bc.sigma = [sigma](const BoundaryPoint& bp, double) { return sigma.on(bp.side)(bp.x, bp.y, bp.along); };
    bc.fluid_flux = [flux](const BoundaryPoint& bp, double) { return flux.on(bp.side)(bp.x, bp.y, bp.along); };
    bc.background_charge = [rho_b](const CellPoint& cp, double) { return rho_b(cp.x, cp.y, cp.index); };
    bc.sigma_bound = sigma.bound();
    bc.flux_bound = flux.bound();
    bc.background_bound = rho_b.bound();

    EllipticOptions el;
    el.cg_tol = cfg.solver.cg_tol;
    el.max_cg_iters = cfg.solver.max_cg_iters;
    el.jacobi = cfg.solver.jacobi;
    el.compat_tol = cfg.solver.compat_tol;
    el.repair_compatibility = cfg.solver.repair_compatibility;

    Scenario sc{cfg.name, Model{grid, p, cfg.reactions, bc, el, {}}, std::move(initial), {}, cfg.output,
                std::move(names), {}};
    sc.fixed_point.max_outer_iters = cfg.solver.max_outer_iters;
    sc.fixed_point.fp_tol = cfg.solver.fp_tol;
    sc.fixed_point.omega = cfg.solver.omega;
    sc.fixed_point.dt = cfg.time.dt;
    sc.fixed_point.t_end = cfg.time.t_end;
    sc.fixed_point.max_retries = cfg.solver.max_retries;
    sc.report = validate(grid, p, cfg.reactions, bc, sc.initial);
    // Gauss compatibility of the initial charge, checked up front.
    AssumptionCheck gauss{"gauss_compatibility", true, ""};
    if (sc.report.ok()) {
        const CellField total = charge_density(sc.initial, p) + bc.background_field(grid, 0.0);
        const double imbalance = cell_integral(grid, total) - boundary_integral(grid, bc.sigma_field(grid, 0.0));
        const double tol = el.effective_compat_tol(grid);
        if (std::abs(imbalance) > (el.repair_compatibility ? 10.0 * tol : tol)) {
            gauss.passed = false;
            std::ostringstream os;
            os << "integral of rho_f + rho_b minus boundary integral of sigma = " << imbalance
               << " (tolerance " << tol << ")";
            gauss.detail = os.str();
        }
    }
    sc.report.checks.push_back(gauss);

    static const std::map<std::string, std::string> section = {
        {"species", "species"},      {"A1", "grid"},     {"A2", "species"},  {"A3", "species"},
        {"A4", "params"},            {"A5", "reactions"}, {"A6", "boundary"}, {"A7", "boundary"},
        {"compatibility", "boundary"}, {"gauss_compatibility", "boundary"}};
    for (const AssumptionCheck& c : sc.report.checks) {
        if (c.passed) continue;
        const auto it = section.find(c.id);
        const int line = cfg.source.line(it == section.end() ? "" : it->second);
        const std::string file = cfg.source.file.empty() ? "<config>" : cfg.source.file;
        throw ConfigError(file + ":" + std::to_string(line) + ": assumption " + c.id + " fails: " + c.detail);
    }
    return sc;
}

} // namespace dpnp::io
