#pragma once

/**
 * @file linear_algebra.hpp
 * @brief Conjugate gradient on the zero-mean subspace (pure-Neumann
 *        problems) and banded LU without pivoting for the transport
 *        M-matrices.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dpnp/errors.hpp"

namespace dpnp {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Removes the mean of `v` in place.
inline void project_zero_mean(std::span<double> v) {
    if (v.empty()) return;
    double s = 0.0;
    for (double x : v) s += x;
    const double m = s / static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

struct CgOptions {
    double rel_tol = 1e-10;
    int max_iters = 10000;
    bool jacobi = false; ///< diagonal preconditioner
};

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Solves A x = b for a symmetric positive semidefinite A whose null space is
/// the constants. `b` must have zero mean; iterates are kept at zero mean.
///
/// `Op` provides `apply(std::span<const double>, std::span<double>)` and
/// `diagonal() -> std::vector<double>`. `x` holds the initial guess on entry.
template <class Op>
CgResult cg_zero_mean(const Op& op, std::span<const double> b, std::span<double> x, const CgOptions& opt) {
    const std::size_t n = b.size();
    CgResult res;
    project_zero_mean(x);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return res;
    }
    std::vector<double> r(n), z(n), p(n), ap(n), inv_diag;
    if (opt.jacobi) {
        inv_diag = op.diagonal();
        for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;
    }
    auto precondition = [&](std::span<const double> in, std::span<double> out) {
        if (opt.jacobi) {
            for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
            project_zero_mean(out);
        } else {
            std::copy(in.begin(), in.end(), out.begin());
        }
    };

    op.apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    project_zero_mean(r);
    res.relative_residual = norm2(r) / bnorm;
    if (res.relative_residual <= opt.rel_tol) return res;

    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= opt.max_iters; ++it) {
        op.apply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) {
            throw NonConvergence("cg: operator not positive on the search direction (p^T A p = " +
                                 std::to_string(pap) + ")");
        }
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        project_zero_mean(r);
        res.iterations = it;
        res.relative_residual = norm2(r) / bnorm;
        if (res.relative_residual <= opt.rel_tol) {
            project_zero_mean(x);
            return res;
        }
        precondition(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw NonConvergence("cg: no convergence after " + std::to_string(opt.max_iters) +
                         " iterations (relative residual " + std::to_string(res.relative_residual) + ")");
}

/// Square banded matrix with equal lower and upper half-bandwidth.
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t half_bandwidth)
        : n_(n), w_(half_bandwidth), width_(2 * half_bandwidth + 1), a_(n * width_, 0.0) {}

    std::size_t size() const { return n_; }
    std::size_t half_bandwidth() const { return w_; }

    bool in_band(std::size_t i, std::size_t j) const { return (i > j ? i - j : j - i) <= w_; }

    double& at(std::size_t i, std::size_t j) {
        if (!in_band(i, j)) throw InvalidArgument("BandedMatrix: entry outside band");
        return a_[i * width_ + (j + w_ - i)];
    }
    double at(std::size_t i, std::size_t j) const {
        if (!in_band(i, j)) return 0.0;
        return a_[i * width_ + (j + w_ - i)];
    }
    void add(std::size_t i, std::size_t j, double v) { at(i, j) += v; }

    void multiply(std::span<const double> x, std::span<double> y) const {
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t j0 = i > w_ ? i - w_ : 0;
            const std::size_t j1 = std::min(n_ - 1, i + w_);
            double s = 0.0;
            for (std::size_t j = j0; j <= j1; ++j) s += at(i, j) * x[j];
            y[i] = s;
        }
    }

    /// In-place LU factorisation without pivoting. Stable for matrices that
    /// are diagonally dominant by columns; for M-matrices every substitution
    /// step adds non-negative terms, so non-negative data give non-negative
    /// solutions in floating point.
    void factorize() {
        for (std::size_t k = 0; k < n_; ++k) {
            const double pivot = at(k, k);
            if (!(pivot > 0.0) && !(pivot < 0.0)) {
                throw NonConvergence("banded LU: zero pivot at row " + std::to_string(k));
            }
            const std::size_t i1 = std::min(n_ - 1, k + w_);
            for (std::size_t i = k + 1; i <= i1; ++i) {
                double& lik = at(i, k);
                if (lik == 0.0) continue;
                lik /= pivot;
                for (std::size_t j = k + 1; j <= std::min(n_ - 1, k + w_); ++j) at(i, j) -= lik * at(k, j);
            }
        }
        factored_ = true;
    }

    void solve_in_place(std::span<double> b) const {
        if (!factored_) throw InvalidArgument("BandedMatrix: solve before factorize");
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t j0 = i > w_ ? i - w_ : 0;
            double s = b[i];
            for (std::size_t j = j0; j < i; ++j) s -= at(i, j) * b[j];
            b[i] = s;
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            const std::size_t j1 = std::min(n_ - 1, ii + w_);
            double s = b[ii];
            for (std::size_t j = ii + 1; j <= j1; ++j) s -= at(ii, j) * b[j];
            b[ii] = s / at(ii, ii);
        }
    }

private:
    std::size_t n_, w_, width_;
    std::vector<double> a_;
    bool factored_ = false;
};

} // namespace dpnp
