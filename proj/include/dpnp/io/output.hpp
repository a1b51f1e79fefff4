#pragma once

/**
 * @file output.hpp
 * @brief Diagnostics CSV (one row per time level) and legacy-VTK cell snapshots.
 */

#include <charconv>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "dpnp/diagnostics.hpp"
#include "dpnp/errors.hpp"
#include "dpnp/state.hpp"

namespace dpnp::io {

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::vector<std::string> csv_columns(const std::vector<std::string>& species) {
    std::vector<std::string> cols{"t", "outer_iters", "clamp_events", "entropy", "entropy_env", "charge_l2", "energy_env"};
    for (const std::string& s : species) {
        cols.push_back(s + "_mass");
        cols.push_back(s + "_l2");
        cols.push_back(s + "_linf");
        cols.push_back(s + "_grad_l2");
    }
    for (const char* c : {"energy", "E_l2", "phi_l2", "q_l2", "p_l2", "linf_running_max", "poisson_cg_iters",
                          "darcy_cg_iters", "compat_repairs"})
        cols.emplace_back(c);
    return cols;
}

inline std::string csv_header(const std::vector<std::string>& species) {
    std::string line;
    for (const std::string& c : csv_columns(species)) {
        if (!line.empty()) line += ',';
        line += c;
    }
    return line;
}

inline std::string csv_row(const DiagnosticsRecord& r) {
    std::vector<std::string> cells{format_number(r.t),          std::to_string(r.outer_iters),
                                   std::to_string(r.clamp_events), format_number(r.entropy),
                                   format_number(r.entropy_env),  format_number(r.charge_l2),
                                   format_number(r.energy_env)};
    for (const SpeciesStats& s : r.species) {
        cells.push_back(format_number(s.mass));
        cells.push_back(format_number(s.l2));
        cells.push_back(format_number(s.linf));
        cells.push_back(format_number(s.grad_l2));
    }
    cells.push_back(format_number(r.energy));
    cells.push_back(format_number(r.e_l2));
    cells.push_back(format_number(r.phi_l2));
    cells.push_back(format_number(r.q_l2));
    cells.push_back(format_number(r.p_l2));
    cells.push_back(format_number(r.linf_running_max));
    cells.push_back(std::to_string(r.poisson_cg_iters));
    cells.push_back(std::to_string(r.darcy_cg_iters));
    cells.push_back(std::to_string(r.compat_repairs));
    std::string line;
    for (const std::string& c : cells) {
        if (!line.empty()) line += ',';
        line += c;
    }
    return line;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& species)
        : out_(path, std::ios::binary), width_(species.size()) {
        if (!out_) throw Error("cannot open " + path + " for writing");
        out_ << csv_header(species) << '\n';
    }

    void write(const DiagnosticsRecord& r) {
        if (r.species.size() != width_) throw InvalidArgument("csv: species count differs from header");
        out_ << csv_row(r) << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
    std::size_t width_;
};

// ---------------------------------------------------------------------------
// VTK
// ---------------------------------------------------------------------------

namespace detail {

inline void vtk_scalars(std::ostream& os, const std::string& name, const CellField& u) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : u.values()) os << format_number(v) << '\n';
}

/// Cell-centred vector from the four face normal components.
inline void vtk_vectors(std::ostream& os, const std::string& name, const Grid2D& g, const FaceField& u) {
    os << "VECTORS " << name << " double\n";
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const auto f = g.cell_faces(c);
        auto normal = [&](std::size_t face, double toward_plus) {
            // boundary entries are outward; convert to the +x / +y convention
            return g.face(face).is_boundary() ? toward_plus * u[face] : u[face];
        };
        const double vx = 0.5 * (normal(f[0], -1.0) + normal(f[1], 1.0));
        const double vy = 0.5 * (normal(f[2], -1.0) + normal(f[3], 1.0));
        os << format_number(vx) << ' ' << format_number(vy) << " 0\n";
    }
}

} // namespace detail

/// Legacy VTK 3.0 ASCII structured-points file with cell data.
inline void write_vtk(std::ostream& os, const Grid2D& g, const SystemState& s, const std::vector<std::string>& species) {
    os << "# vtk DataFile Version 3.0\n";
    os << "dpnp snapshot t=" << format_number(s.t) << '\n';
    os << "ASCII\nDATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << g.nx() + 1 << ' ' << g.ny() + 1 << " 1\n";
    os << "ORIGIN 0 0 0\n";
    os << "SPACING " << format_number(g.hx()) << ' ' << format_number(g.hy()) << " 1\n";
    os << "CELL_DATA " << g.cell_count() << '\n';
    for (std::size_t l = 0; l < s.c.size(); ++l)
        detail::vtk_scalars(os, l < species.size() ? species[l] : "c" + std::to_string(l), s.c[l]);
    detail::vtk_scalars(os, "phi", s.phi);
    detail::vtk_scalars(os, "p", s.p);
    detail::vtk_scalars(os, "rho_f", s.rho_f);
    detail::vtk_vectors(os, "E", g, s.E);
    detail::vtk_vectors(os, "q", g, s.q);
}

inline void write_vtk(const std::string& path, const Grid2D& g, const SystemState& s,
                      const std::vector<std::string>& species) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_vtk(out, g, s, species);
}

} // namespace dpnp::io
