#pragma once

#include <cassert>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparse.hpp"
#include "types.hpp"
#include "vector_ops.hpp"

namespace amgeig {

/// Column-major dense matrix (LAPACK layout).
struct DenseMatrix {
    index_t nrows = 0;
    index_t ncols = 0;
    std::vector<double> data; // data[i + j*nrows]

    DenseMatrix() = default;
    DenseMatrix(index_t r, index_t c)
        : nrows(r), ncols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {
        if (r < 0 || c < 0) throw std::invalid_argument("DenseMatrix: negative dimension");
    }

    double& operator()(index_t i, index_t j) {
        assert(i >= 0 && i < nrows && j >= 0 && j < ncols);
        return data[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * nrows];
    }
    double operator()(index_t i, index_t j) const {
        assert(i >= 0 && i < nrows && j >= 0 && j < ncols);
        return data[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * nrows];
    }

    std::span<double> col(index_t j) {
        return {data.data() + static_cast<std::size_t>(j) * nrows, static_cast<std::size_t>(nrows)};
    }
    std::span<const double> col(index_t j) const {
        return {data.data() + static_cast<std::size_t>(j) * nrows, static_cast<std::size_t>(nrows)};
    }

    static DenseMatrix eye(index_t n) {
        DenseMatrix m(n, n);
        for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline DenseMatrix to_dense(const SparseMatrix& a) {
    DenseMatrix d(a.nrows, a.ncols);
    for (index_t i = 0; i < a.nrows; ++i)
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            d(i, a.col_indices[p]) = a.values[p];
    return d;
}

inline Vector multiply(const DenseMatrix& a, std::span<const double> x) {
    if (static_cast<index_t>(x.size()) != a.ncols)
        throw std::invalid_argument("dense multiply: length mismatch");
    Vector y(static_cast<std::size_t>(a.nrows), 0.0);
    for (index_t j = 0; j < a.ncols; ++j) axpy(x[j], a.col(j), y);
    return y;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.ncols, a.nrows);
    for (index_t j = 0; j < a.ncols; ++j)
        for (index_t i = 0; i < a.nrows; ++i) t(j, i) = a(i, j);
    return t;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.ncols != b.nrows)
        throw std::invalid_argument("dense matmul: inner dimensions differ");
    DenseMatrix c(a.nrows, b.ncols);
    for (index_t j = 0; j < b.ncols; ++j)
        for (index_t k = 0; k < a.ncols; ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            axpy(bkj, a.col(k), c.col(j));
        }
    return c;
}

inline double max_abs(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data) s = std::max(s, std::abs(v));
    return s;
}

/// Dense Cholesky factorization A = L L^T, retained for repeated solves.
class CholeskyFactor {
public:
    CholeskyFactor() = default;

    /// Factors a symmetric positive definite matrix; throws not_spd_error
    /// with the 1-based pivot index when a pivot is not positive.
    explicit CholeskyFactor(const DenseMatrix& a) : n_(a.nrows), l_(a.data) {
        if (a.nrows != a.ncols)
            throw std::invalid_argument("CholeskyFactor: matrix must be square");
        for (index_t j = 0; j < n_; ++j) {
            double d = at(j, j);
            for (index_t k = 0; k < j; ++k) d -= at(j, k) * at(j, k);
            if (!(d > 0.0))
                throw not_spd_error(j + 1, "matrix is not positive definite: pivot " +
                                               std::to_string(j + 1) + " is " +
                                               std::to_string(d));
            const double ljj = std::sqrt(d);
            at(j, j) = ljj;
            for (index_t i = j + 1; i < n_; ++i) {
                double s = at(i, j);
                for (index_t k = 0; k < j; ++k) s -= at(i, k) * at(j, k);
                at(i, j) = s / ljj;
            }
        }
    }

    index_t dim() const { return n_; }
    bool empty() const { return n_ == 0; }

    /// Solves A x = b by forward/back substitution.
    Vector solve(std::span<const double> b) const {
        if (static_cast<index_t>(b.size()) != n_)
            throw std::invalid_argument("CholeskyFactor::solve: length mismatch");
        Vector x(b.begin(), b.end());
        for (index_t i = 0; i < n_; ++i) { // L y = b
            double s = x[i];
            for (index_t k = 0; k < i; ++k) s -= at(i, k) * x[k];
            x[i] = s / at(i, i);
        }
        for (index_t i = n_ - 1; i >= 0; --i) { // L^T x = y
            double s = x[i];
            for (index_t k = i + 1; k < n_; ++k) s -= at(k, i) * x[k];
            x[i] = s / at(i, i);
        }
        return x;
    }

private:
    double& at(index_t i, index_t j) {
        return l_[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * n_];
    }
    double at(index_t i, index_t j) const {
        return l_[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * n_];
    }

    index_t n_ = 0;
    std::vector<double> l_;
};

} // namespace amgeig
