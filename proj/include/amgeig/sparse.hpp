#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "types.hpp"
#include "vector_ops.hpp"

namespace amgeig {

/// Compressed-row sparse matrix with owned storage.
///
/// Invariants: row_offsets holds nrows+1 non-decreasing values starting at 0;
/// inside each row the column indices are strictly increasing and lie in
/// [0, ncols). Stored values may be zero.
struct SparseMatrix {
    index_t nrows = 0;
    index_t ncols = 0;
    std::vector<index_t> row_offsets{0};
    std::vector<index_t> col_indices;
    std::vector<double> values;

    index_t nnz() const { return static_cast<index_t>(values.size()); }

    /// Entry lookup by binary search; absent entries read as zero.
    double operator()(index_t i, index_t j) const {
        const auto* first = col_indices.data() + row_offsets[i];
        const auto* last = col_indices.data() + row_offsets[i + 1];
        const auto* it = std::lower_bound(first, last, j);
        if (it == last || *it != j) return 0.0;
        return values[static_cast<std::size_t>(it - col_indices.data())];
    }

    /// Largest entry magnitude in row i (0 for an empty row).
    double row_magnitude(index_t i) const {
        double s = 0.0;
        for (index_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p)
            s = std::max(s, std::abs(values[p]));
        return s;
    }

    /// Validates the structural invariants; throws std::invalid_argument.
    void check_structure() const {
        if (nrows < 0 || ncols < 0)
            throw std::invalid_argument("sparse matrix with negative dimension");
        if (static_cast<index_t>(row_offsets.size()) != nrows + 1)
            throw std::invalid_argument("row_offsets size must be nrows+1");
        if (row_offsets.front() != 0 || row_offsets.back() != nnz())
            throw std::invalid_argument("row_offsets must start at 0 and end at nnz");
        if (col_indices.size() != values.size())
            throw std::invalid_argument("col_indices and values length mismatch");
        for (index_t i = 0; i < nrows; ++i) {
            if (row_offsets[i] > row_offsets[i + 1])
                throw std::invalid_argument("row_offsets must be non-decreasing");
            for (index_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
                if (col_indices[p] < 0 || col_indices[p] >= ncols)
                    throw std::invalid_argument("column index out of range in row " +
                                                std::to_string(i));
                if (p > row_offsets[i] && col_indices[p - 1] >= col_indices[p])
                    throw std::invalid_argument("columns not strictly increasing in row " +
                                                std::to_string(i));
            }
        }
    }
};

struct Triplet {
    index_t row = 0;
    index_t col = 0;
    double value = 0.0;
};

/// Builds CSR from (row, col, value) entries; duplicates are summed.
inline SparseMatrix from_triplets(index_t nrows, index_t ncols,
                                  std::vector<Triplet> entries) {
    if (nrows < 0 || ncols < 0)
        throw std::invalid_argument("from_triplets: negative dimension");
    for (const Triplet& t : entries)
        if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
            throw std::invalid_argument("from_triplets: entry (" + std::to_string(t.row) +
                                        ", " + std::to_string(t.col) + ") out of range");
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.nrows = nrows;
    m.ncols = ncols;
    m.row_offsets.assign(static_cast<std::size_t>(nrows) + 1, 0);
    for (std::size_t s = 0; s < entries.size();) {
        std::size_t e = s;
        double sum = 0.0;
        while (e < entries.size() && entries[e].row == entries[s].row &&
               entries[e].col == entries[s].col)
            sum += entries[e++].value;
        m.col_indices.push_back(entries[s].col);
        m.values.push_back(sum);
        m.row_offsets[entries[s].row + 1] += 1;
        s = e;
    }
    for (index_t i = 0; i < nrows; ++i) m.row_offsets[i + 1] += m.row_offsets[i];
    return m;
}

inline SparseMatrix identity(index_t n) {
    SparseMatrix m;
    m.nrows = m.ncols = n;
    m.row_offsets.resize(static_cast<std::size_t>(n) + 1);
    m.col_indices.resize(static_cast<std::size_t>(n));
    m.values.assign(static_cast<std::size_t>(n), 1.0);
    for (index_t i = 0; i <= n; ++i) m.row_offsets[i] = i;
    for (index_t i = 0; i < n; ++i) m.col_indices[i] = i;
    return m;
}

/// y = A x
inline Vector multiply(const SparseMatrix& a, std::span<const double> x) {
    if (static_cast<index_t>(x.size()) != a.ncols)
        throw std::invalid_argument("multiply: vector length " + std::to_string(x.size()) +
                                    " does not match " + std::to_string(a.ncols) + " columns");
    Vector y(static_cast<std::size_t>(a.nrows), 0.0);
    for (index_t i = 0; i < a.nrows; ++i) {
        double s = 0.0;
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            s += a.values[p] * x[a.col_indices[p]];
        y[i] = s;
    }
    return y;
}

/// y = A^T x, computed by scattering rows (no explicit transpose).
inline Vector multiply_transpose(const SparseMatrix& a, std::span<const double> x) {
    if (static_cast<index_t>(x.size()) != a.nrows)
        throw std::invalid_argument("multiply_transpose: vector length " +
                                    std::to_string(x.size()) + " does not match " +
                                    std::to_string(a.nrows) + " rows");
    Vector y(static_cast<std::size_t>(a.ncols), 0.0);
    for (index_t i = 0; i < a.nrows; ++i)
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            y[a.col_indices[p]] += a.values[p] * x[i];
    return y;
}

inline SparseMatrix transpose(const SparseMatrix& a) {
    SparseMatrix t;
    t.nrows = a.ncols;
    t.ncols = a.nrows;
    t.row_offsets.assign(static_cast<std::size_t>(a.ncols) + 1, 0);
    t.col_indices.resize(a.values.size());
    t.values.resize(a.values.size());
    for (index_t p = 0; p < a.nnz(); ++p) t.row_offsets[a.col_indices[p] + 1] += 1;
    for (index_t j = 0; j < a.ncols; ++j) t.row_offsets[j + 1] += t.row_offsets[j];
    std::vector<index_t> next(t.row_offsets.begin(), t.row_offsets.end() - 1);
    for (index_t i = 0; i < a.nrows; ++i)
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            index_t q = next[a.col_indices[p]]++;
            t.col_indices[q] = i;
            t.values[q] = a.values[p];
        }
    return t;
}

/// C = A B via row-wise accumulation with a marker array.
inline SparseMatrix matmul(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.ncols != b.nrows)
        throw std::invalid_argument("matmul: inner dimensions " + std::to_string(a.ncols) +
                                    " and " + std::to_string(b.nrows) + " differ");
    SparseMatrix c;
    c.nrows = a.nrows;
    c.ncols = b.ncols;
    c.row_offsets.assign(static_cast<std::size_t>(a.nrows) + 1, 0);

    std::vector<index_t> marker(static_cast<std::size_t>(b.ncols), -1);
    std::vector<double> scratch(static_cast<std::size_t>(b.ncols), 0.0);
    std::vector<index_t> touched;
    for (index_t i = 0; i < a.nrows; ++i) {
        touched.clear();
        for (index_t pa = a.row_offsets[i]; pa < a.row_offsets[i + 1]; ++pa) {
            const index_t k = a.col_indices[pa];
            const double av = a.values[pa];
            for (index_t pb = b.row_offsets[k]; pb < b.row_offsets[k + 1]; ++pb) {
                const index_t j = b.col_indices[pb];
                if (marker[j] != i) {
                    marker[j] = i;
                    scratch[j] = av * b.values[pb];
                    touched.push_back(j);
                } else {
                    scratch[j] += av * b.values[pb];
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        for (index_t j : touched) {
            c.col_indices.push_back(j);
            c.values.push_back(scratch[j]);
        }
        c.row_offsets[i + 1] = c.nnz();
    }
    return c;
}

/// C = alpha A + beta B (pattern union).
inline SparseMatrix add_scaled(const SparseMatrix& a, const SparseMatrix& b,
                               double alpha, double beta) {
    if (a.nrows != b.nrows || a.ncols != b.ncols)
        throw std::invalid_argument("add_scaled: shape mismatch");
    SparseMatrix c;
    c.nrows = a.nrows;
    c.ncols = a.ncols;
    c.row_offsets.assign(static_cast<std::size_t>(a.nrows) + 1, 0);
    for (index_t i = 0; i < a.nrows; ++i) {
        index_t pa = a.row_offsets[i], pb = b.row_offsets[i];
        const index_t ea = a.row_offsets[i + 1], eb = b.row_offsets[i + 1];
        while (pa < ea || pb < eb) {
            index_t ja = pa < ea ? a.col_indices[pa] : c.ncols;
            index_t jb = pb < eb ? b.col_indices[pb] : c.ncols;
            if (ja < jb) {
                c.col_indices.push_back(ja);
                c.values.push_back(alpha * a.values[pa++]);
            } else if (jb < ja) {
                c.col_indices.push_back(jb);
                c.values.push_back(beta * b.values[pb++]);
            } else {
                c.col_indices.push_back(ja);
                c.values.push_back(alpha * a.values[pa++] + beta * b.values[pb++]);
            }
        }
        c.row_offsets[i + 1] = c.nnz();
    }
    return c;
}

/// (A + A^T)/2
inline SparseMatrix symmetrize(const SparseMatrix& a) {
    if (a.nrows != a.ncols)
        throw std::invalid_argument("symmetrize: matrix must be square");
    return add_scaled(a, transpose(a), 0.5, 0.5);
}

/// Largest entry magnitude (0 for an empty matrix).
inline double max_abs(const SparseMatrix& a) {
    double s = 0.0;
    for (double v : a.values) s = std::max(s, std::abs(v));
    return s;
}

/// max_{ij} |a_ij - a_ji| <= tol * max_abs(a)?
inline bool is_symmetric(const SparseMatrix& a, double rel_tol = 1e-12) {
    if (a.nrows != a.ncols) return false;
    const SparseMatrix d = add_scaled(a, transpose(a), 1.0, -1.0);
    return max_abs(d) <= rel_tol * std::max(max_abs(a), 1e-300);
}

/// Galerkin triple product P^T A P, symmetrized to kill round-off drift.
inline SparseMatrix rap(const SparseMatrix& p, const SparseMatrix& a) {
    if (a.nrows != a.ncols)
        throw std::invalid_argument("rap: A must be square");
    if (a.ncols != p.nrows)
        throw std::invalid_argument("rap: A is " + std::to_string(a.nrows) + "x" +
                                    std::to_string(a.ncols) + " but P has " +
                                    std::to_string(p.nrows) + " rows");
    return symmetrize(matmul(transpose(p), matmul(a, p)));
}

} // namespace amgeig
