#pragma once

/**
 * @file grid.hpp
 * @brief Uniform rectangular 2D grid, cell/face fields and the discrete
 *        operators (divergence, two-point flux, upwinding) shared by the
 *        Gauss, Darcy and transport solvers.
 *
 * Face numbering: x-faces (normal along x) come first, `i + (nx+1)*j` with
 * `i = 0..nx`; y-faces follow, `nx_faces + i + nx*j` with `j = 0..ny`.
 * A face value is the normal component of a vector field. On interior faces
 * it is positive toward the cell with the larger index; on boundary faces it
 * is positive along the outward normal.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dpnp/errors.hpp"

namespace dpnp {

enum class Orientation { x, y };

enum class BoundarySide { none, left, right, bottom, top };

inline const char* to_string(BoundarySide side) {
    switch (side) {
    case BoundarySide::left: return "left";
    case BoundarySide::right: return "right";
    case BoundarySide::bottom: return "bottom";
    case BoundarySide::top: return "top";
    case BoundarySide::none: break;
    }
    return "none";
}

/// Diagonal 2x2 tensor (diffusivity, permeability).
struct DiagTensor {
    double xx = 1.0;
    double yy = 1.0;

    double along(Orientation o) const { return o == Orientation::x ? xx : yy; }
    double min_entry() const { return std::min(xx, yy); }
    bool operator==(const DiagTensor&) const = default;
};

enum class FieldRole { generic, concentration, potential, pressure, charge };

namespace detail {

template <class Tag>
class Field {
public:
    Field() = default;
    explicit Field(std::size_t n, double value = 0.0, FieldRole role = FieldRole::generic)
        : values_(n, value), role_(role) {}
    Field(std::vector<double> values, FieldRole role = FieldRole::generic)
        : values_(std::move(values)), role_(role) {}

    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<double> values() & { return values_; }
    std::span<const double> values() const& { return values_; }
    /// Temporaries hand over their storage so range-for stays valid.
    std::vector<double> values() && { return std::move(values_); }
    std::vector<double>& data() & { return values_; }
    const std::vector<double>& data() const& { return values_; }
    std::vector<double> data() && { return std::move(values_); }
    FieldRole role() const { return role_; }
    void set_role(FieldRole r) { role_ = r; }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }
    double min() const { return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end()); }
    double max() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }
    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    Field& operator+=(const Field& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    Field& operator*=(double a) {
        for (double& v : values_) v *= a;
        return *this;
    }
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }

    bool operator==(const Field& o) const { return values_ == o.values_; }

private:
    std::vector<double> values_;
    FieldRole role_ = FieldRole::generic;
};

struct CellTag {};
struct FaceTag {};

} // namespace detail

/// One value per cell.
using CellField = detail::Field<detail::CellTag>;
/// One normal component per face.
using FaceField = detail::Field<detail::FaceTag>;

/// Per-species cell fields, index = species.
using SpeciesFields = std::vector<CellField>;

struct Face {
    Orientation orientation = Orientation::x;
    int lo = -1; ///< cell on the low-index side, -1 on the left/bottom boundary
    int hi = -1; ///< cell on the high-index side, -1 on the right/top boundary
    BoundarySide side = BoundarySide::none;
    double x = 0.0; ///< face centre
    double y = 0.0;
    double length = 0.0;
    double spacing = 0.0; ///< distance between the two adjacent cell centres

    bool is_boundary() const { return side != BoundarySide::none; }
    int inside() const { return lo >= 0 ? lo : hi; }
};

/// Location data handed to boundary-data callbacks.
struct BoundaryPoint {
    std::size_t ordinal = 0;  ///< position in Grid2D::boundary_faces()
    std::size_t face = 0;     ///< global face id
    std::size_t along = 0;    ///< position along its side (j on left/right, i on bottom/top)
    BoundarySide side = BoundarySide::none;
    double x = 0.0;
    double y = 0.0;
};

struct CellPoint {
    std::size_t index = 0;
    double x = 0.0;
    double y = 0.0;
};

class Grid2D {
public:
    Grid2D(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
        if (nx < 1 || ny < 1) throw InvalidArgument("grid: nx and ny must be >= 1");
        if (!(lx > 0.0) || !(ly > 0.0)) throw InvalidArgument("grid: lx and ly must be > 0");
        hx_ = lx / nx;
        hy_ = ly / ny;
        build_faces();
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double cell_area() const { return hx_ * hy_; }
    double domain_area() const { return lx_ * ly_; }

    std::size_t cell_count() const { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t face_count() const { return faces_.size(); }
    std::size_t x_face_count() const { return static_cast<std::size_t>(nx_ + 1) * ny_; }

    std::size_t cell(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_) * j; }
    int cell_i(std::size_t c) const { return static_cast<int>(c % nx_); }
    int cell_j(std::size_t c) const { return static_cast<int>(c / nx_); }
    double cell_x(std::size_t c) const { return (cell_i(c) + 0.5) * hx_; }
    double cell_y(std::size_t c) const { return (cell_j(c) + 0.5) * hy_; }
    CellPoint cell_point(std::size_t c) const { return {c, cell_x(c), cell_y(c)}; }

    std::size_t x_face(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_ + 1) * j; }
    std::size_t y_face(int i, int j) const { return x_face_count() + static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_) * j; }

    const Face& face(std::size_t f) const { return faces_[f]; }
    const std::vector<Face>& faces() const { return faces_; }
    const std::vector<std::size_t>& interior_faces() const { return interior_; }
    /// Boundary faces ordered left (j up), right, bottom (i up), top.
    const std::vector<std::size_t>& boundary_faces() const { return boundary_; }
    const BoundaryPoint& boundary_point(std::size_t ordinal) const { return boundary_points_[ordinal]; }

    /// The four faces of a cell: left, right, bottom, top.
    std::array<std::size_t, 4> cell_faces(std::size_t c) const {
        const int i = cell_i(c), j = cell_j(c);
        return {x_face(i, j), x_face(i + 1, j), y_face(i, j), y_face(i, j + 1)};
    }

    /// +1 when a positive face value leaves cell `c`, -1 when it enters.
    double outward_sign(std::size_t f, std::size_t c) const {
        const Face& fc = faces_[f];
        if (fc.is_boundary()) return 1.0;
        return static_cast<int>(c) == fc.lo ? 1.0 : -1.0;
    }

    CellField make_cell_field(double v = 0.0, FieldRole role = FieldRole::generic) const {
        return CellField(cell_count(), v, role);
    }
    FaceField make_face_field(double v = 0.0) const { return FaceField(face_count(), v); }

    bool operator==(const Grid2D& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
    }

private:
    void build_faces() {
        faces_.reserve(x_face_count() + static_cast<std::size_t>(nx_) * (ny_ + 1));
        for (int j = 0; j < ny_; ++j) {
            for (int i = 0; i <= nx_; ++i) {
                Face f;
                f.orientation = Orientation::x;
                f.lo = i > 0 ? static_cast<int>(cell(i - 1, j)) : -1;
                f.hi = i < nx_ ? static_cast<int>(cell(i, j)) : -1;
                f.side = i == 0 ? BoundarySide::left : (i == nx_ ? BoundarySide::right : BoundarySide::none);
                f.x = i * hx_;
                f.y = (j + 0.5) * hy_;
                f.length = hy_;
                f.spacing = hx_;
                faces_.push_back(f);
            }
        }
        for (int j = 0; j <= ny_; ++j) {
            for (int i = 0; i < nx_; ++i) {
                Face f;
                f.orientation = Orientation::y;
                f.lo = j > 0 ? static_cast<int>(cell(i, j - 1)) : -1;
                f.hi = j < ny_ ? static_cast<int>(cell(i, j)) : -1;
                f.side = j == 0 ? BoundarySide::bottom : (j == ny_ ? BoundarySide::top : BoundarySide::none);
                f.x = (i + 0.5) * hx_;
                f.y = j * hy_;
                f.length = hx_;
                f.spacing = hy_;
                faces_.push_back(f);
            }
        }
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            if (!faces_[f].is_boundary()) interior_.push_back(f);
        }
        auto add = [&](std::size_t f, std::size_t along) {
            BoundaryPoint bp;
            bp.ordinal = boundary_.size();
            bp.face = f;
            bp.along = along;
            bp.side = faces_[f].side;
            bp.x = faces_[f].x;
            bp.y = faces_[f].y;
            boundary_.push_back(f);
            boundary_points_.push_back(bp);
        };
        for (int j = 0; j < ny_; ++j) add(x_face(0, j), j);
        for (int j = 0; j < ny_; ++j) add(x_face(nx_, j), j);
        for (int i = 0; i < nx_; ++i) add(y_face(i, 0), i);
        for (int i = 0; i < nx_; ++i) add(y_face(i, ny_), i);
    }

    int nx_, ny_;
    double lx_, ly_, hx_ = 0.0, hy_ = 0.0;
    std::vector<Face> faces_;
    std::vector<std::size_t> interior_;
    std::vector<std::size_t> boundary_;
    std::vector<BoundaryPoint> boundary_points_;
};

// ---------------------------------------------------------------------------
// Discrete operators
// ---------------------------------------------------------------------------

/// Cell-wise (sum of outgoing face flux times face length) / cell area.
inline CellField divergence(const Grid2D& grid, const FaceField& u) {
    if (u.size() != grid.face_count()) throw InvalidArgument("divergence: face field size mismatch");
    CellField div = grid.make_cell_field();
    for (std::size_t f = 0; f < grid.face_count(); ++f) {
        const Face& fc = grid.face(f);
        const double flux = u[f] * fc.length;
        if (fc.is_boundary()) {
            div[fc.inside()] += flux;
        } else {
            div[fc.lo] += flux;
            div[fc.hi] -= flux;
        }
    }
    div *= 1.0 / grid.cell_area();
    return div;
}

/// Harmonic mean of two positive coefficients.
inline double harmonic_mean(double a, double b) { return 2.0 / (1.0 / a + 1.0 / b); }

/// Face-normal coefficient for two-point fluxes; harmonic average across interior faces.
inline double face_coefficient(const Grid2D& grid, std::span<const DiagTensor> coeff, std::size_t f) {
    const Face& fc = grid.face(f);
    auto normal = [&](int c) {
        const DiagTensor& k = coeff.size() == 1 ? coeff[0] : coeff[static_cast<std::size_t>(c)];
        return k.along(fc.orientation);
    };
    if (fc.is_boundary()) return normal(fc.inside());
    return harmonic_mean(normal(fc.lo), normal(fc.hi));
}

/// Two-point flux approximation of -coeff * grad(phi).
///
/// `coeff` holds one tensor per cell, or a single tensor for a constant
/// coefficient. Boundary faces take the Neumann data from `boundary_flux`.
inline FaceField tpfa_gradient_flux(const Grid2D& grid, const CellField& phi, std::span<const DiagTensor> coeff,
                                    const FaceField& boundary_flux) {
    if (phi.size() != grid.cell_count()) throw InvalidArgument("tpfa_gradient_flux: cell field size mismatch");
    if (coeff.size() != 1 && coeff.size() != grid.cell_count())
        throw InvalidArgument("tpfa_gradient_flux: coefficient count mismatch");
    for (const DiagTensor& k : coeff) {
        if (!(k.xx > 0.0) || !(k.yy > 0.0)) throw InvalidArgument("tpfa_gradient_flux: nonpositive coefficient");
    }
    FaceField out = grid.make_face_field();
    for (std::size_t f = 0; f < grid.face_count(); ++f) {
        const Face& fc = grid.face(f);
        if (fc.is_boundary()) {
            out[f] = boundary_flux[f];
        } else {
            out[f] = -face_coefficient(grid, coeff, f) * (phi[fc.hi] - phi[fc.lo]) / fc.spacing;
        }
    }
    return out;
}

inline FaceField tpfa_gradient_flux(const Grid2D& grid, const CellField& phi, const DiagTensor& coeff,
                                    const FaceField& boundary_flux) {
    return tpfa_gradient_flux(grid, phi, std::span<const DiagTensor>(&coeff, 1), boundary_flux);
}

/// Upwind value of `c` on every face for the velocity `v`.
///
/// Zero velocity on an interior face takes the arithmetic mean. Boundary
/// faces use the interior value on outflow and `inflow_value` (defaulting to
/// the interior value) on inflow.
inline FaceField upwind_face_value(const Grid2D& grid, const CellField& c, const FaceField& v,
                                   const FaceField* inflow_value = nullptr) {
    FaceField out = grid.make_face_field();
    for (std::size_t f = 0; f < grid.face_count(); ++f) {
        const Face& fc = grid.face(f);
        if (fc.is_boundary()) {
            const double interior = c[fc.inside()];
            out[f] = (v[f] < 0.0 && inflow_value) ? (*inflow_value)[f] : interior;
        } else if (v[f] > 0.0) {
            out[f] = c[fc.lo];
        } else if (v[f] < 0.0) {
            out[f] = c[fc.hi];
        } else {
            out[f] = 0.5 * (c[fc.lo] + c[fc.hi]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Discrete norms: L2 = sqrt(sum v^2 * measure), Linf = max |v|.
// ---------------------------------------------------------------------------

inline double l2_norm(const Grid2D& grid, const CellField& u) {
    double s = 0.0;
    for (double v : u.values()) s += v * v;
    return std::sqrt(s * grid.cell_area());
}

inline double mean(const CellField& u) {
    if (u.size() == 0) return 0.0;
    double s = 0.0;
    for (double v : u.values()) s += v;
    return s / static_cast<double>(u.size());
}

/// Face fields are weighted by the dual volume |face| * spacing, halved on the boundary.
inline double l2_norm(const Grid2D& grid, const FaceField& u) {
    double s = 0.0;
    for (std::size_t f = 0; f < grid.face_count(); ++f) {
        const Face& fc = grid.face(f);
        const double w = fc.length * fc.spacing * (fc.is_boundary() ? 0.5 : 1.0);
        s += u[f] * u[f] * w;
    }
    return std::sqrt(s);
}

/// L2 norm of the two-point face gradient over interior faces.
inline double gradient_l2_norm(const Grid2D& grid, const CellField& u) {
    double s = 0.0;
    for (std::size_t f : grid.interior_faces()) {
        const Face& fc = grid.face(f);
        const double g = (u[fc.hi] - u[fc.lo]) / fc.spacing;
        s += g * g * fc.length * fc.spacing;
    }
    return std::sqrt(s);
}

} // namespace dpnp
