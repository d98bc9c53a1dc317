#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sparse.hpp"
#include "types.hpp"

namespace amgeig {

/// Strong-dependence structure of a square matrix. Point i depends strongly
/// on j when |a_ij| >= theta * max_{l != i} |a_il| and a_ij != 0.
struct StrengthGraph {
    double theta = 0.25;
    std::vector<std::vector<index_t>> strong;    // dependencies of i, ascending
    std::vector<std::vector<index_t>> influence; // points that depend on i, ascending
    std::vector<std::vector<index_t>> neighbors; // nonzero off-diagonal pattern, ascending

    index_t size() const { return static_cast<index_t>(strong.size()); }
};

inline StrengthGraph strength_sets(const SparseMatrix& a, double theta) {
    if (a.nrows != a.ncols)
        throw std::invalid_argument("strength_sets: matrix must be square");
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("strength_sets: threshold must lie strictly between 0 and 1");

    StrengthGraph g;
    g.theta = theta;
    g.strong.resize(a.nrows);
    g.influence.resize(a.nrows);
    g.neighbors.resize(a.nrows);

    for (index_t i = 0; i < a.nrows; ++i) {
        double max_off = 0.0;
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            if (a.col_indices[p] != i)
                max_off = std::max(max_off, std::abs(a.values[p]));
        const double cut = theta * max_off;
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            const index_t j = a.col_indices[p];
            const double v = a.values[p];
            if (j == i || v == 0.0) continue;
            g.neighbors[i].push_back(j);
            if (max_off > 0.0 && std::abs(v) >= cut) g.strong[i].push_back(j);
        }
    }
    for (index_t j = 0; j < a.nrows; ++j)
        for (index_t i : g.strong[j]) g.influence[i].push_back(j);
    return g;
}

enum class PointLabel : unsigned char { coarse, fine, undecided };

/// Coarse/fine splitting of one level's points.
struct CfSplit {
    std::vector<PointLabel> label;
    std::vector<index_t> weight; // final greedy weights, kept for inspection

    index_t size() const { return static_cast<index_t>(label.size()); }
    index_t num_coarse() const {
        return static_cast<index_t>(
            std::count(label.begin(), label.end(), PointLabel::coarse));
    }
};

/// Greedy first pass: repeatedly turn the most influential undecided point
/// into a coarse point and its undecided dependents into fine points.
/// Weights start as influence counts; marking j fine rewards the remaining
/// dependencies of j, and picking i penalizes the dependencies of i.
/// Ties break toward the lowest index, so the pass is deterministic.
inline CfSplit coarsen_preliminary(const StrengthGraph& g) {
    const index_t n = g.size();
    CfSplit split;
    split.label.assign(n, PointLabel::undecided);
    split.weight.resize(n);
    for (index_t i = 0; i < n; ++i)
        split.weight[i] = static_cast<index_t>(g.influence[i].size());

    // Ordered by (weight descending, index ascending) via the (-weight, index) key.
    std::set<std::pair<index_t, index_t>> queue;
    for (index_t i = 0; i < n; ++i) queue.insert({-split.weight[i], i});
    auto requeue = [&](index_t j, index_t delta) {
        queue.erase({-split.weight[j], j});
        split.weight[j] += delta;
        queue.insert({-split.weight[j], j});
    };

    while (!queue.empty()) {
        const index_t i = queue.begin()->second;
        queue.erase(queue.begin());
        split.label[i] = PointLabel::coarse;
        for (index_t j : g.influence[i]) {
            if (split.label[j] != PointLabel::undecided) continue;
            split.label[j] = PointLabel::fine;
            queue.erase({-split.weight[j], j});
            for (index_t l : g.strong[j])
                if (split.label[l] == PointLabel::undecided) requeue(l, +1);
        }
        for (index_t j : g.strong[i])
            if (split.label[j] == PointLabel::undecided) requeue(j, -1);
    }
    return split;
}

/// Interpolation stencils per point; coarse points keep empty stencils and
/// later become unit rows of the prolongation.
struct Interpolation {
    std::vector<std::vector<index_t>> sets;    // interpolatory coarse points (fine-level ids)
    std::vector<std::vector<double>> weights;  // aligned with sets

    index_t size() const { return static_cast<index_t>(sets.size()); }
};

namespace detail {

struct RowStencil {
    std::vector<index_t> coarse;
    std::vector<double> weight;
};

/// Outcome of one attempt at building the stencil of fine point i.
struct RowAttempt {
    std::optional<RowStencil> stencil; // success
    index_t failed = -1;               // strong F-neighbor with no common coarse point
    bool degenerate = false;           // vanishing distribution denominator
};

inline bool sorted_intersects(const std::vector<index_t>& a, const std::vector<index_t>& b) {
    std::size_t p = 0, q = 0;
    while (p < a.size() && q < b.size()) {
        if (a[p] < b[q]) ++p;
        else if (b[q] < a[p]) ++q;
        else return true;
    }
    return false;
}

inline RowAttempt try_row_stencil(const SparseMatrix& a, const StrengthGraph& g,
                                  const std::vector<PointLabel>& label, index_t i,
                                  index_t tentative) {
    const auto is_coarse = [&](index_t j) {
        return label[j] == PointLabel::coarse || j == tentative;
    };

    RowAttempt out;
    std::vector<index_t> coarse_set, strong_fine;
    for (index_t j : g.strong[i])
        (is_coarse(j) ? coarse_set : strong_fine).push_back(j);

    // Weak couplings fold into the diagonal.
    double diag = a(i, i);
    {
        std::size_t p = 0;
        for (index_t j : g.neighbors[i]) {
            while (p < g.strong[i].size() && g.strong[i][p] < j) ++p;
            if (p < g.strong[i].size() && g.strong[i][p] == j) continue;
            diag += a(i, j);
        }
    }

    std::vector<double> num(coarse_set.size());
    for (std::size_t k = 0; k < coarse_set.size(); ++k) num[k] = a(i, coarse_set[k]);

    // Each strong fine neighbor distributes its coupling over the coarse set,
    // weighted by its own connections there.
    for (index_t j : strong_fine) {
        if (!sorted_intersects(g.strong[j], coarse_set)) {
            out.failed = j;
            return out;
        }
        double denom = 0.0;
        for (index_t l : coarse_set) denom += a(j, l);
        if (std::abs(denom) < 1e-12 * a.row_magnitude(j)) {
            out.degenerate = true;
            return out;
        }
        const double aij = a(i, j);
        for (std::size_t k = 0; k < coarse_set.size(); ++k)
            num[k] += aij * a(j, coarse_set[k]) / denom;
    }

    if (std::abs(diag) < 1e-12 * a.row_magnitude(i))
        throw degenerate_row_error(i, "interpolation denominator of row " + std::to_string(i) +
                                          " vanished against its row magnitude");

    RowStencil st;
    st.coarse = std::move(coarse_set);
    st.weight.resize(st.coarse.size());
    for (std::size_t k = 0; k < st.coarse.size(); ++k) st.weight[k] = -num[k] / diag;
    out.stencil = std::move(st);
    return out;
}

} // namespace detail

/// Second pass: walks fine points in ascending order and builds direct
/// interpolation stencils from strong coarse neighbors, folding weak
/// couplings into the diagonal and distributing strong fine couplings.
/// A strong fine neighbor sharing no coarse point with i is promoted
/// tentatively; a second such neighbor promotes i itself instead, and the
/// tentative candidate stays fine. Promoted points lose any stencil stored
/// for them earlier.
inline std::pair<CfSplit, Interpolation> finalize_interpolation(const SparseMatrix& a,
                                                                const StrengthGraph& g,
                                                                CfSplit split) {
    const index_t n = g.size();
    if (a.nrows != n || static_cast<index_t>(split.label.size()) != n)
        throw std::invalid_argument("finalize_interpolation: size mismatch");
    for (PointLabel l : split.label)
        if (l == PointLabel::undecided)
            throw std::invalid_argument("finalize_interpolation: undecided point");

    Interpolation interp;
    interp.sets.resize(n);
    interp.weights.resize(n);

    auto promote = [&](index_t j) {
        split.label[j] = PointLabel::coarse;
        interp.sets[j].clear();
        interp.weights[j].clear();
    };

    for (index_t i = 0; i < n; ++i) {
        if (split.label[i] != PointLabel::fine) continue;
        index_t tentative = -1;
        for (;;) {
            detail::RowAttempt attempt = detail::try_row_stencil(a, g, split.label, i, tentative);
            if (attempt.stencil) {
                if (tentative >= 0) promote(tentative);
                interp.sets[i] = std::move(attempt.stencil->coarse);
                interp.weights[i] = std::move(attempt.stencil->weight);
                break;
            }
            if (attempt.degenerate || tentative >= 0) {
                promote(i); // tentative candidate, if any, stays fine
                break;
            }
            tentative = attempt.failed;
        }
    }
    return {std::move(split), std::move(interp)};
}

/// Prolongation over a completed splitting: unit rows for coarse points,
/// stencil rows for fine points. Coarse points are numbered by ascending
/// fine-level index.
inline SparseMatrix assemble_prolongation(const CfSplit& split, const Interpolation& interp) {
    const index_t n = split.size();
    if (interp.size() != n)
        throw std::invalid_argument("assemble_prolongation: size mismatch");

    std::vector<index_t> coarse_id(n, -1);
    index_t nc = 0;
    for (index_t i = 0; i < n; ++i) {
        if (split.label[i] == PointLabel::undecided)
            throw std::invalid_argument("assemble_prolongation: undecided point " +
                                        std::to_string(i));
        if (split.label[i] == PointLabel::coarse) coarse_id[i] = nc++;
    }

    SparseMatrix p;
    p.nrows = n;
    p.ncols = nc;
    p.row_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    for (index_t i = 0; i < n; ++i) {
        if (split.label[i] == PointLabel::coarse) {
            p.col_indices.push_back(coarse_id[i]);
            p.values.push_back(1.0);
        } else {
            if (interp.sets[i].empty())
                throw std::invalid_argument("assemble_prolongation: fine point " +
                                            std::to_string(i) + " has no interpolation points");
            if (interp.sets[i].size() != interp.weights[i].size())
                throw std::invalid_argument("assemble_prolongation: stencil arrays misaligned");
            for (std::size_t k = 0; k < interp.sets[i].size(); ++k) {
                const index_t f = interp.sets[i][k];
                if (coarse_id[f] < 0)
                    throw std::invalid_argument("assemble_prolongation: stencil of " +
                                                std::to_string(i) +
                                                " references non-coarse point " +
                                                std::to_string(f));
                p.col_indices.push_back(coarse_id[f]);
                p.values.push_back(interp.weights[i][k]);
            }
        }
        p.row_offsets[i + 1] = p.nnz();
    }
    return p;
}

} // namespace amgeig
