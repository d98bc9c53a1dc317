#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "dense.hpp"
#include "hierarchy.hpp"
#include "sparse.hpp"
#include "types.hpp"
#include "vector_ops.hpp"

namespace amgeig {

struct SolveParams {
    index_t pre_smooth = 2;
    index_t post_smooth = 2;
};

struct SmoothResult {
    Vector x;
    bool breakdown = false; // smoother met a non-positive curvature direction
};

/// Runs exactly `steps` conjugate-gradient iterations on A x = b from x0,
/// restarting from scratch (no state carries over between calls). Stops
/// early when the residual vanishes, or flags breakdown and returns the
/// current iterate when p^T A p <= 0.
inline SmoothResult cg_smooth(const SparseMatrix& a, std::span<const double> b,
                              std::span<const double> x0, index_t steps) {
    if (a.nrows != a.ncols)
        throw std::invalid_argument("cg_smooth: matrix must be square");
    if (static_cast<index_t>(b.size()) != a.nrows ||
        static_cast<index_t>(x0.size()) != a.nrows)
        throw std::invalid_argument("cg_smooth: vector length mismatch");
    if (steps < 0) throw std::invalid_argument("cg_smooth: negative step count");

    SmoothResult out;
    out.x.assign(x0.begin(), x0.end());
    Vector r = subtract(b, multiply(a, out.x));
    Vector p, w;
    double rho_prev = 0.0;
    for (index_t s = 0; s < steps; ++s) {
        const double rho = dot(r, r);
        if (rho == 0.0) break;
        if (s == 0) {
            p = r;
        } else {
            const double beta = rho / rho_prev;
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
        }
        w = multiply(a, p);
        const double pap = dot(p, w);
        if (pap <= 0.0) {
            out.breakdown = true;
            break;
        }
        const double alpha = rho / pap;
        axpy(alpha, p, out.x);
        axpy(-alpha, w, r);
        rho_prev = rho;
    }
    return out;
}

/// One-off dense direct solve of A x = b (factorization is not reused).
inline Vector coarse_direct_solve(const SparseMatrix& a, std::span<const double> b) {
    if (a.nrows != a.ncols)
        throw std::invalid_argument("coarse_direct_solve: matrix must be square");
    return CholeskyFactor(to_dense(a)).solve(b);
}

/// One V-cycle on level `level`: pre-smooth, restrict the residual through
/// the prolongation transpose, recurse, prolongate the correction back, and
/// post-smooth. On the coarsest level this is the cached direct solve.
inline Vector vcycle(const Hierarchy& h, index_t level, std::span<const double> b,
                     std::span<const double> x0, const SolveParams& params = {}) {
    if (level < 0 || level >= h.num_levels())
        throw std::invalid_argument("vcycle: level " + std::to_string(level) + " out of range");
    if (static_cast<index_t>(b.size()) != h.dim(level) ||
        static_cast<index_t>(x0.size()) != h.dim(level))
        throw std::invalid_argument("vcycle: vector length mismatch on level " +
                                    std::to_string(level));
    if (params.pre_smooth < 0 || params.post_smooth < 0)
        throw std::invalid_argument("vcycle: negative smoothing step count");

    if (level == h.coarsest()) {
        if (h.coarse_factor.empty())
            throw std::runtime_error("vcycle: coarsest level has no cached factorization");
        return h.coarse_factor.solve(b);
    }

    const SparseMatrix& a = h.levels[level].a;
    const SparseMatrix& p = h.prolongations[level];

    Vector x = cg_smooth(a, b, x0, params.pre_smooth).x;
    const Vector r = subtract(b, multiply(a, x));
    const Vector rc = multiply_transpose(p, r);
    const Vector zero(static_cast<std::size_t>(h.dim(level + 1)), 0.0);
    const Vector ec = vcycle(h, level + 1, rc, zero, params);
    axpy(1.0, multiply(p, ec), x);
    return cg_smooth(a, b, x, params.post_smooth).x;
}

/// `iters` successive V-cycles from x0 (zero iterations returns x0).
inline Vector amg_iterate(const Hierarchy& h, index_t level, std::span<const double> b,
                          std::span<const double> x0, index_t iters,
                          const SolveParams& params = {}) {
    if (iters < 0) throw std::invalid_argument("amg_iterate: negative iteration count");
    Vector x(x0.begin(), x0.end());
    for (index_t i = 0; i < iters; ++i) x = vcycle(h, level, b, x, params);
    return x;
}

} // namespace amgeig
