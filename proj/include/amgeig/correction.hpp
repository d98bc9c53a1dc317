#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "eig.hpp"
#include "hierarchy.hpp"
#include "solve.hpp"
#include "sparse.hpp"
#include "types.hpp"
#include "vector_ops.hpp"

namespace amgeig {

struct CorrectionParams {
    index_t num_pairs = 1;                 // eigenpairs tracked through the levels
    index_t amg_iters = 2;                 // V-cycles applied to each basis vector
    std::vector<index_t> sweeps_per_level; // correction sweeps per level; empty = uniform
    index_t uniform_sweeps = 1;
    std::optional<index_t> start_level;    // default: next-to-coarsest level
    SolveParams solve;

    index_t sweeps_for(index_t level) const {
        if (level < static_cast<index_t>(sweeps_per_level.size()))
            return sweeps_per_level[level];
        return uniform_sweeps;
    }
};

/// Applies `amg_iters` V-cycles to A_k v = lambda_j M_k u_j starting from
/// u_j, for every tracked pair; the results form the columns of the
/// returned matrix, in pair order.
inline DenseMatrix smoothed_basis(const Hierarchy& h, index_t level, const EigenpairSet& pairs,
                                  index_t amg_iters, const SolveParams& solve = {}) {
    if (level < 0 || level >= h.num_levels())
        throw std::invalid_argument("smoothed_basis: level out of range");
    if (pairs.dim() != h.dim(level))
        throw std::invalid_argument("smoothed_basis: pairs live on dimension " +
                                    std::to_string(pairs.dim()) + ", level has " +
                                    std::to_string(h.dim(level)));
    if (pairs.count() < 1)
        throw std::invalid_argument("smoothed_basis: no pairs given");

    const SparseMatrix& m = h.levels[level].m;
    DenseMatrix v(h.dim(level), pairs.count());
    for (index_t j = 0; j < pairs.count(); ++j) {
        Vector rhs = multiply(m, pairs.vectors.col(j));
        scale(pairs.values[j], rhs);
        const Vector x = amg_iterate(h, level, rhs, pairs.vectors.col(j), amg_iters, solve);
        std::copy(x.begin(), x.end(), v.col(j).begin());
    }
    return v;
}

namespace detail {

/// Symmetric augmented pencil over the basis [transfer, v]: the coarsest
/// operators in the leading block, Galerkin couplings against the level-k
/// columns elsewhere. Both blocksets are mirrored entry-for-entry so the
/// result is exactly symmetric.
inline DenseSymPair augmented_pair_blocks(const DenseMatrix& coarse_a, const DenseMatrix& coarse_m,
                                          const SparseMatrix& a, const SparseMatrix& m,
                                          const SparseMatrix& transfer, const DenseMatrix& v) {
    const index_t dn = coarse_a.nrows;
    const index_t dk = a.nrows;
    const index_t q = v.ncols;
    if (transfer.nrows != dk || transfer.ncols != dn)
        throw std::invalid_argument("augmented pencil: transfer shape mismatch");
    if (v.nrows != dk)
        throw std::invalid_argument("augmented pencil: basis rows do not match level dimension");

    DenseMatrix aug_a(dn + q, dn + q), aug_m(dn + q, dn + q);
    for (index_t j = 0; j < dn; ++j) {
        std::copy(coarse_a.col(j).begin(), coarse_a.col(j).end(), aug_a.col(j).begin());
        std::copy(coarse_m.col(j).begin(), coarse_m.col(j).end(), aug_m.col(j).begin());
    }
    std::vector<Vector> av(static_cast<std::size_t>(q)), mv(static_cast<std::size_t>(q));
    for (index_t j = 0; j < q; ++j) {
        av[j] = multiply(a, v.col(j));
        mv[j] = multiply(m, v.col(j));
        const Vector ca = multiply_transpose(transfer, av[j]);
        const Vector cm = multiply_transpose(transfer, mv[j]);
        for (index_t i = 0; i < dn; ++i) {
            aug_a(i, dn + j) = ca[i];
            aug_a(dn + j, i) = ca[i];
            aug_m(i, dn + j) = cm[i];
            aug_m(dn + j, i) = cm[i];
        }
        for (index_t l = 0; l <= j; ++l) {
            const double aa = dot(v.col(l), av[j]);
            const double mm = dot(v.col(l), mv[j]);
            aug_a(dn + l, dn + j) = aa;
            aug_a(dn + j, dn + l) = aa;
            aug_m(dn + l, dn + j) = mm;
            aug_m(dn + j, dn + l) = mm;
        }
    }
    return {std::move(aug_a), std::move(aug_m)};
}

/// Conditions the basis before augmentation: removes the part of every
/// column already representable through the transfer (which changes nothing
/// about the augmented subspace but keeps the mass block from degenerating),
/// then M-orthonormalizes by modified Gram-Schmidt and drops columns whose
/// remaining M-norm falls below 1e-10.
inline DenseMatrix condition_basis(const SparseMatrix& m, const SparseMatrix& transfer,
                                   const CholeskyFactor& coarse_m_factor, const DenseMatrix& v) {
    const index_t dk = v.nrows;
    std::vector<Vector> cols, mcols;
    for (index_t j = 0; j < v.ncols; ++j) {
        Vector c(v.col(j).begin(), v.col(j).end());
        Vector mc = multiply(m, c);
        const Vector coef = coarse_m_factor.solve(multiply_transpose(transfer, mc));
        axpy(-1.0, multiply(transfer, coef), c);
        mc = multiply(m, c);
        for (std::size_t l = 0; l < cols.size(); ++l) {
            const double proj = dot(mcols[l], c);
            axpy(-proj, cols[l], c);
            axpy(-proj, mcols[l], mc);
        }
        const double norm = std::sqrt(std::max(dot(mc, c), 0.0));
        if (norm < 1e-10) continue;
        scale(1.0 / norm, c);
        scale(1.0 / norm, mc);
        cols.push_back(std::move(c));
        mcols.push_back(std::move(mc));
    }
    DenseMatrix out(dk, static_cast<index_t>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        std::copy(cols[j].begin(), cols[j].end(), out.col(static_cast<index_t>(j)).begin());
    return out;
}

inline EigenpairSet correction_step_impl(const Hierarchy& h, index_t level,
                                         const EigenpairSet& pairs, index_t amg_iters,
                                         const SolveParams& solve, const DenseMatrix& coarse_a,
                                         const DenseMatrix& coarse_m,
                                         const CholeskyFactor& coarse_m_factor,
                                         const SparseMatrix& transfer) {
    const index_t q = pairs.count();
    const SparseMatrix& a = h.levels[level].a;
    const SparseMatrix& m = h.levels[level].m;

    const DenseMatrix raw = smoothed_basis(h, level, pairs, amg_iters, solve);
    const DenseMatrix v = condition_basis(m, transfer, coarse_m_factor, raw);
    const DenseSymPair aug = augmented_pair_blocks(coarse_a, coarse_m, a, m, transfer, v);
    if (q > aug.dim())
        throw std::runtime_error("correction step: augmented space of dimension " +
                                 std::to_string(aug.dim()) + " cannot yield " +
                                 std::to_string(q) + " pairs");
    const EigenpairSet small = generalized_eig(aug, q);

    const index_t dn = coarse_a.nrows;
    EigenpairSet out;
    out.values = small.values;
    out.vectors = DenseMatrix(h.dim(level), q);
    for (index_t j = 0; j < q; ++j) {
        const auto x = small.vectors.col(j);
        Vector u = multiply(transfer, x.subspan(0, static_cast<std::size_t>(dn)));
        for (index_t l = 0; l < v.ncols; ++l) axpy(x[dn + l], v.col(l), u);
        const double norm = std::sqrt(dot(u, multiply(m, u)));
        if (!(norm > 0.0))
            throw std::runtime_error("correction step: lifted vector has vanishing mass norm");
        scale(1.0 / norm, u);
        fix_sign(u);
        std::copy(u.begin(), u.end(), out.vectors.col(j).begin());
    }
    return out;
}

} // namespace detail

/// Augmented pencil combining the coarsest-level operators with the given
/// level-k columns, exactly as used inside the correction step (the columns
/// are taken as-is; no conditioning is applied).
inline DenseSymPair assemble_augmented(const Hierarchy& h, index_t level, const DenseMatrix& v) {
    if (level < 0 || level >= h.num_levels())
        throw std::invalid_argument("assemble_augmented: level out of range");
    const index_t n = h.coarsest();
    return detail::augmented_pair_blocks(to_dense(h.levels[n].a), to_dense(h.levels[n].m),
                                         h.levels[level].a, h.levels[level].m,
                                         composite_transfer(h, level, n), v);
}

/// One correction sweep on level `level`: smooth each pair by V-cycles,
/// solve the small augmented problem spanned by the coarsest space plus the
/// smoothed columns, and lift the q smallest pairs back, M-normalized with
/// a deterministic sign.
inline EigenpairSet correction_step(const Hierarchy& h, index_t level, const EigenpairSet& pairs,
                                    const CorrectionParams& params) {
    if (level < 0 || level >= h.num_levels())
        throw std::invalid_argument("correction_step: level out of range");
    const index_t n = h.coarsest();
    const DenseMatrix coarse_m = to_dense(h.levels[n].m);
    return detail::correction_step_impl(h, level, pairs, params.amg_iters, params.solve,
                                        to_dense(h.levels[n].a), coarse_m,
                                        CholeskyFactor(coarse_m),
                                        composite_transfer(h, level, n));
}

/// Eigenvalue trace of one correction sweep: `sweep` counts from 1 on each
/// level, with sweep 0 for the starting-level direct solve.
struct SweepRecord {
    index_t level = 0;
    index_t sweep = 0;
    Vector values;
};

struct EigensolveResult {
    EigenpairSet pairs;
    std::vector<SweepRecord> history;
};

/// Nested multilevel eigensolve: a dense solve on the starting level,
/// then from there to the finest level prolongate the current pairs and run
/// the per-level number of correction sweeps.
inline EigensolveResult amg_eigensolve(const Hierarchy& h, const CorrectionParams& params) {
    const index_t levels = h.num_levels();
    const index_t n = h.coarsest();
    const index_t start = params.start_level.value_or(std::max<index_t>(n - 1, 0));
    if (start < 0 || start >= levels)
        throw std::invalid_argument("amg_eigensolve: start level " + std::to_string(start) +
                                    " out of range");
    const index_t q = params.num_pairs;
    if (q < 1) throw std::invalid_argument("amg_eigensolve: need at least one pair");
    if (q > h.dim(start))
        throw std::invalid_argument("amg_eigensolve: " + std::to_string(q) +
                                    " pairs exceed starting dimension " +
                                    std::to_string(h.dim(start)));
    if (params.amg_iters < 0)
        throw std::invalid_argument("amg_eigensolve: negative V-cycle count");
    for (index_t k = 0; k < start; ++k)
        if (params.sweeps_for(k) < 1)
            throw std::invalid_argument("amg_eigensolve: level " + std::to_string(k) +
                                        " needs at least one sweep");

    EigensolveResult result;
    result.pairs = generalized_eig(
        DenseSymPair(to_dense(h.levels[start].a), to_dense(h.levels[start].m)), q);
    result.history.push_back({start, 0, result.pairs.values});

    const DenseMatrix coarse_a = to_dense(h.levels[n].a);
    const DenseMatrix coarse_m = to_dense(h.levels[n].m);
    const CholeskyFactor coarse_m_factor(coarse_m);

    for (index_t k = start - 1; k >= 0; --k) {
        const SparseMatrix& m = h.levels[k].m;
        DenseMatrix up(h.dim(k), q);
        for (index_t j = 0; j < q; ++j) {
            Vector u = multiply(h.prolongations[k], result.pairs.vectors.col(j));
            const double norm = std::sqrt(dot(u, multiply(m, u)));
            if (!(norm > 0.0))
                throw std::runtime_error("amg_eigensolve: prolongated pair lost its mass norm");
            scale(1.0 / norm, u);
            fix_sign(u);
            std::copy(u.begin(), u.end(), up.col(j).begin());
        }
        result.pairs.vectors = std::move(up);

        const SparseMatrix transfer = composite_transfer(h, k, n);
        for (index_t s = 1; s <= params.sweeps_for(k); ++s) {
            result.pairs = detail::correction_step_impl(h, k, result.pairs, params.amg_iters,
                                                        params.solve, coarse_a, coarse_m,
                                                        coarse_m_factor, transfer);
            result.history.push_back({k, s, result.pairs.values});
        }
    }
    return result;
}

} // namespace amgeig
