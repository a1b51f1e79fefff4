#pragma once

/**
 * @file elliptic.hpp
 * @brief Cell-centred TPFA Laplacian with pure Neumann data, shared by the
 *        Gauss and Darcy sub-solvers.
 */

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "dpnp/errors.hpp"
#include "dpnp/grid.hpp"
#include "dpnp/linear_algebra.hpp"

namespace dpnp {

struct EllipticOptions {
    double cg_tol = 1e-10;
    int max_cg_iters = 10000;
    bool jacobi = false;
    /// Absolute tolerance on the Neumann balance; <= 0 means 1e-10 * domain area.
    double compat_tol = 0.0;
    /// Imbalances in (compat_tol, 10 compat_tol] are spread uniformly over the
    /// background charge (Gauss) or source (Darcy) and flagged.
    bool repair_compatibility = true;

    double effective_compat_tol(const Grid2D& g) const { return compat_tol > 0.0 ? compat_tol : 1e-10 * g.domain_area(); }
    bool operator==(const EllipticOptions&) const = default;
};

/// Symmetric operator x -> sum_faces T_f (x_i - x_nb) with T_f = k_f |f| / h_f.
class TpfaLaplacian {
public:
    TpfaLaplacian(const Grid2D& grid, const DiagTensor& coeff) : grid_(&grid), trans_(grid.face_count(), 0.0) {
        if (!(coeff.xx > 0.0) || !(coeff.yy > 0.0)) throw InvalidArgument("TpfaLaplacian: nonpositive coefficient");
        for (std::size_t f : grid.interior_faces()) {
            const Face& fc = grid.face(f);
            trans_[f] = coeff.along(fc.orientation) * fc.length / fc.spacing;
        }
    }

    double transmissibility(std::size_t f) const { return trans_[f]; }

    void apply(std::span<const double> x, std::span<double> y) const {
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t f : grid_->interior_faces()) {
            const Face& fc = grid_->face(f);
            const double flux = trans_[f] * (x[fc.lo] - x[fc.hi]);
            y[fc.lo] += flux;
            y[fc.hi] -= flux;
        }
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(grid_->cell_count(), 0.0);
        for (std::size_t f : grid_->interior_faces()) {
            const Face& fc = grid_->face(f);
            d[fc.lo] += trans_[f];
            d[fc.hi] += trans_[f];
        }
        return d;
    }

    /// Dense copy, row-major (oracle use).
    std::vector<double> dense() const {
        const std::size_t n = grid_->cell_count();
        std::vector<double> a(n * n, 0.0);
        for (std::size_t f : grid_->interior_faces()) {
            const Face& fc = grid_->face(f);
            const std::size_t lo = fc.lo, hi = fc.hi;
            a[lo * n + lo] += trans_[f];
            a[hi * n + hi] += trans_[f];
            a[lo * n + hi] -= trans_[f];
            a[hi * n + lo] -= trans_[f];
        }
        return a;
    }

private:
    const Grid2D* grid_;
    std::vector<double> trans_;
};

struct NeumannSolve {
    CellField x;
    int iterations = 0;
    double relative_residual = 0.0;
    double imbalance = 0.0; ///< sum of the cell-integrated right-hand side
    bool repaired = false;
};

/// Solves L x = rhs (cell-integrated) with zero-mean x. `what` names the
/// problem in error messages.
inline NeumannSolve solve_neumann(const Grid2D& grid, const TpfaLaplacian& op, std::vector<double> rhs,
                                  const EllipticOptions& opt, const CellField* guess, const char* what) {
    NeumannSolve out;
    double imbalance = 0.0;
    for (double v : rhs) imbalance += v;
    out.imbalance = imbalance;
    const double tol = opt.effective_compat_tol(grid);
    if (std::abs(imbalance) > tol) {
        if (opt.repair_compatibility && std::abs(imbalance) <= 10.0 * tol) {
            out.repaired = true;
        } else {
            std::ostringstream os;
            os << what << ": incompatible Neumann data, imbalance " << imbalance << " exceeds tolerance " << tol;
            throw CompatibilityViolation(os.str(), imbalance);
        }
    }
    project_zero_mean(rhs);
    out.x = grid.make_cell_field();
    if (guess) out.x.data() = guess->data();
    const CgResult r = cg_zero_mean(op, rhs, out.x.values(), CgOptions{opt.cg_tol, opt.max_cg_iters, opt.jacobi});
    project_zero_mean(out.x.values());
    out.iterations = r.iterations;
    out.relative_residual = r.relative_residual;
    return out;
}

} // namespace dpnp
