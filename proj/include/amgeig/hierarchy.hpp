#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coarsening.hpp"
#include "dense.hpp"
#include "sparse.hpp"
#include "types.hpp"

namespace amgeig {

struct SetupParams {
    double theta = 0.25;              // strength threshold
    index_t max_coarse_dim = 500;     // stop once a level is at most this small
    index_t max_levels = 25;
    double min_coarsening_ratio = 0.9; // stop when coarse/fine dimension exceeds this
};

/// Byproducts of coarsening one level, exposed so tests and diagnostics can
/// re-derive every intermediate object.
struct LevelSetup {
    StrengthGraph graph;
    CfSplit split;
    Interpolation interp;
    SparseMatrix prolongation;
};

inline LevelSetup setup_level(const SparseMatrix& a, double theta) {
    LevelSetup s;
    s.graph = strength_sets(a, theta);
    auto [split, interp] = finalize_interpolation(a, s.graph, coarsen_preliminary(s.graph));
    s.split = std::move(split);
    s.interp = std::move(interp);
    s.prolongation = assemble_prolongation(s.split, s.interp);
    return s;
}

struct Level {
    SparseMatrix a;
    SparseMatrix m;
};

/// Galerkin hierarchy for a symmetric pencil. Level 0 is the finest;
/// prolongations[k] maps level-(k+1) vectors to level k. The coarsest
/// operator keeps a dense Cholesky factorization for direct solves when it
/// is small enough.
struct Hierarchy {
    std::vector<Level> levels;
    std::vector<SparseMatrix> prolongations;
    SetupParams params;
    CholeskyFactor coarse_factor;

    index_t num_levels() const { return static_cast<index_t>(levels.size()); }
    index_t coarsest() const { return num_levels() - 1; }
    index_t dim(index_t level) const { return levels[level].a.nrows; }
};

namespace detail {
constexpr index_t max_direct_dim = 4096;
}

/// Coarsens the pencil until the level is small, the level budget is spent,
/// or coarsening stalls. Both inputs must be symmetric; both are coarsened
/// through the same prolongations.
inline Hierarchy build_hierarchy(const SparseMatrix& a, const SparseMatrix& m,
                                 const SetupParams& params = {}) {
    if (a.nrows != a.ncols || m.nrows != m.ncols || a.nrows != m.nrows)
        throw std::invalid_argument("build_hierarchy: matrices must be square and same size");
    if (!is_symmetric(a))
        throw std::invalid_argument("build_hierarchy: first matrix is not symmetric");
    if (!is_symmetric(m))
        throw std::invalid_argument("build_hierarchy: second matrix is not symmetric");
    if (!(params.theta > 0.0 && params.theta < 1.0))
        throw std::invalid_argument(
            "build_hierarchy: strength threshold must lie strictly between 0 and 1");
    if (params.max_coarse_dim < 1 || params.max_levels < 1)
        throw std::invalid_argument("build_hierarchy: level limits must be positive");
    if (!(params.min_coarsening_ratio > 0.0 && params.min_coarsening_ratio <= 1.0))
        throw std::invalid_argument("build_hierarchy: coarsening ratio must lie in (0, 1]");

    Hierarchy h;
    h.params = params;
    h.levels.push_back({a, m});
    while (h.num_levels() < params.max_levels) {
        const Level& fine = h.levels.back();
        if (fine.a.nrows <= params.max_coarse_dim) break;
        LevelSetup s = setup_level(fine.a, params.theta);
        const double coarse_dim = static_cast<double>(s.prolongation.ncols);
        if (coarse_dim > params.min_coarsening_ratio * static_cast<double>(fine.a.nrows))
            break; // stalled: the coarse level is barely smaller
        SparseMatrix ac = rap(s.prolongation, fine.a);
        SparseMatrix mc = rap(s.prolongation, fine.m);
        h.prolongations.push_back(std::move(s.prolongation));
        h.levels.push_back({std::move(ac), std::move(mc)});
    }
    if (h.levels.back().a.nrows <= detail::max_direct_dim)
        h.coarse_factor = CholeskyFactor(to_dense(h.levels.back().a));
    return h;
}

/// Product of prolongations carrying level-`coarse` vectors up to level
/// `fine`; the identity when the levels coincide.
inline SparseMatrix composite_transfer(const Hierarchy& h, index_t fine, index_t coarse) {
    if (fine < 0 || coarse >= h.num_levels() || fine > coarse)
        throw std::invalid_argument("composite_transfer: need 0 <= fine <= coarse < levels, got " +
                                    std::to_string(fine) + ", " + std::to_string(coarse));
    if (fine == coarse) return identity(h.dim(fine));
    SparseMatrix t = h.prolongations[fine];
    for (index_t k = fine + 1; k < coarse; ++k) t = matmul(t, h.prolongations[k]);
    return t;
}

} // namespace amgeig
