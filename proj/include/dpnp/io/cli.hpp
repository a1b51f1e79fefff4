#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end: run, verify, convergence, demo-sign-condition.
 *
 * Exit codes: 0 success, 1 usage error, 2 configuration error,
 * 3 solver non-convergence, 4 invariant violation.
 */

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dpnp/coupling.hpp"
#include "dpnp/diagnostics.hpp"
#include "dpnp/io/config.hpp"
#include "dpnp/io/output.hpp"
#include "dpnp/io/verify.hpp"
#include "dpnp/oracle.hpp"

namespace dpnp::io {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_nonconvergence = 3, exit_invariant = 4 };

struct SignDemo {
    double three_ion_value = 0.0;     ///< drift term for z = (1, 1, -1), c = (1, 1, sqrt 3)
    double two_species_min = 0.0;    ///< smallest value over the random two-species probe
    int samples = 0;
    int negative_samples = 0;
};

/// Evaluates the three-ion example and `samples` random non-negative pairs
/// with valencies (1, -1).
inline SignDemo sign_condition_demo(std::uint64_t seed, int samples = 1000) {
    SignDemo d;
    const std::vector<int> z3{1, 1, -1};
    const std::vector<double> c3{1.0, 1.0, std::sqrt(3.0)};
    d.three_ion_value = drift_sign_term(z3, c3);
    const std::vector<int> z2{1, -1};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    d.two_species_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        const std::vector<double> c2{u(rng), u(rng)};
        const double v = drift_sign_term(z2, c2);
        d.two_species_min = std::min(d.two_species_min, v);
        d.negative_samples += v < 0.0;
    }
    d.samples = samples;
    return d;
}

namespace detail {

inline int run_command(const std::string& config_path, const std::string& out_override, bool quiet,
                       std::ostream& out) {
    const Scenario sc = build_scenario(load_config(config_path));
    const std::filesystem::path dir = out_override.empty() ? sc.output.directory : out_override;
    std::filesystem::create_directories(dir);
    CsvWriter csv((dir / sc.output.csv_path).string(), sc.species_names);
    int level = 0;
    RunOptions ro;
    ro.keep_states = false;
    ro.observer = [&](const SystemState& s, const DiagnosticsRecord& r) {
        csv.write(r);
        if (sc.output.vtk_every > 0 && level % sc.output.vtk_every == 0) {
            std::ostringstream name;
            name << "snapshot_" << std::setw(5) << std::setfill('0') << level << ".vtk";
            write_vtk((dir / name.str()).string(), sc.model.grid, s, sc.species_names);
        }
        if (!quiet) {
            out << "t=" << format_number(r.t) << " outer=" << r.outer_iters << " entropy=" << format_number(r.entropy)
                << '\n';
        }
        ++level;
    };
    run(sc.model, sc.initial, sc.fixed_point, ro);
    if (!quiet) out << "wrote " << (dir / sc.output.csv_path).string() << '\n';
    return exit_ok;
}

inline int verify_command(const std::string& config_path, std::uint64_t seed, bool quiet, std::ostream& out) {
    const Scenario sc = build_scenario(load_config(config_path));
    VerifyOptions opt;
    opt.seed = seed;
    const VerifyReport rep = verify_scenario(sc, opt);
    for (const CheckResult& c : rep.checks) {
        if (!quiet || !c.passed) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    return rep.ok() ? exit_ok : exit_invariant;
}

inline int convergence_command(const std::string& name, std::ostream& out) {
    const ManufacturedCase which = parse_manufactured_case(name);
    const ErrorTable t = manufactured_errors(which);
    out << "case " << to_string(which) << '\n';
    out << "n,error,ratio,order\n";
    for (std::size_t k = 0; k < t.levels.size(); ++k) {
        out << t.levels[k] << ',' << format_number(t.errors[k]);
        if (k > 0) out << ',' << format_number(t.ratios[k - 1]) << ',' << format_number(t.orders[k - 1]);
        out << '\n';
    }
    return exit_ok;
}

inline int sign_command(std::uint64_t seed, std::ostream& out) {
    const SignDemo d = sign_condition_demo(seed);
    out << std::setprecision(17);
    out << "z = (1, 1, -1), c = (1, 1, sqrt(3)): (sum z c)(sum sign(z)(|z| c)^2) = " << d.three_ion_value << '\n';
    out << "-(2 - sqrt(3)) = " << -(2.0 - std::sqrt(3.0)) << '\n';
    out << "z = (1, -1), " << d.samples << " random samples in [0, 10]^2: min = " << d.two_species_min
        << ", negative samples = " << d.negative_samples << '\n';
    return exit_ok;
}

} // namespace detail

/// Entry point; all output goes to `out` / `err`.
inline int cli_run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Darcy-Poisson-Nernst-Planck finite-volume simulator"};
    app.require_subcommand(1);
    std::string config_flag, out_dir;
    std::uint64_t seed = 1;
    bool quiet = false;
    app.add_option("--config", config_flag, "scenario file (alternative to the positional argument)");
    app.add_option("--out", out_dir, "output directory (overrides output.directory)");
    app.add_option("--seed", seed, "seed for the random probes of verify and demo-sign-condition");
    app.add_flag("--quiet", quiet, "print only failures and errors");

    std::string run_cfg, verify_cfg, case_name;
    CLI::App* run_cmd = app.add_subcommand("run", "run a scenario and write the diagnostics CSV");
    run_cmd->add_option("config", run_cfg, "scenario file");
    CLI::App* verify_cmd = app.add_subcommand("verify", "run a scenario and check every invariant");
    verify_cmd->add_option("config", verify_cfg, "scenario file");
    CLI::App* conv_cmd = app.add_subcommand("convergence", "manufactured-solution error table");
    conv_cmd->add_option("case", case_name, "poisson_cos | darcy_gradient_force | transport_translate")->required();
    CLI::App* sign_cmd = app.add_subcommand("demo-sign-condition", "evaluate the electric drift sign term");
    for (CLI::App* sub : {run_cmd, verify_cmd, conv_cmd, sign_cmd}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
    }

    auto config_of = [&](const std::string& positional) {
        const std::string path = positional.empty() ? config_flag : positional;
        if (path.empty()) throw ConfigError("<cli>:1: no scenario file given");
        return path;
    };

    try {
        if (*run_cmd) return detail::run_command(config_of(run_cfg), out_dir, quiet, out);
        if (*verify_cmd) return detail::verify_command(config_of(verify_cfg), seed, quiet, out);
        if (*conv_cmd) return detail::convergence_command(case_name, out);
        if (*sign_cmd) return detail::sign_command(seed, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const NonConvergence& e) {
        err << "non-convergence: " << e.what() << '\n';
        return exit_nonconvergence;
    } catch (const NegativeConcentration& e) {
        err << "invariant violation: " << e.what() << '\n';
        return exit_invariant;
    } catch (const CompatibilityViolation& e) {
        err << "invariant violation: " << e.what() << '\n';
        return exit_invariant;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

} // namespace dpnp::io
