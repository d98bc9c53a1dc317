#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dense.hpp"
#include "types.hpp"
#include "vector_ops.hpp"

extern "C" {
void dsygvx_(const int* itype, const char* jobz, const char* range, const char* uplo,
             const int* n, double* a, const int* lda, double* b, const int* ldb,
             const double* vl, const double* vu, const int* il, const int* iu,
             const double* abstol, int* m, double* w, double* z, const int* ldz,
             double* work, const int* lwork, int* iwork, int* ifail, int* info);
double dlamch_(const char* cmach);
}

namespace amgeig {

/// A symmetric matrix pencil (A, M). Symmetry of both matrices is validated
/// on construction; positive definiteness of M surfaces during factorization.
struct DenseSymPair {
    DenseMatrix a;
    DenseMatrix m;

    DenseSymPair() = default;
    DenseSymPair(DenseMatrix a_in, DenseMatrix m_in) : a(std::move(a_in)), m(std::move(m_in)) {
        if (a.nrows != a.ncols || m.nrows != m.ncols || a.nrows != m.nrows)
            throw std::invalid_argument("DenseSymPair: matrices must be square and same size");
        check_symmetric(a, "stiffness");
        check_symmetric(m, "mass");
    }

    index_t dim() const { return a.nrows; }

private:
    static void check_symmetric(const DenseMatrix& x, const char* which) {
        const double scale = std::max(max_abs(x), 1e-300);
        for (index_t j = 0; j < x.ncols; ++j)
            for (index_t i = 0; i < j; ++i)
                if (std::abs(x(i, j) - x(j, i)) > 1e-12 * scale)
                    throw std::invalid_argument(std::string("DenseSymPair: ") + which +
                                                " matrix is not symmetric at (" +
                                                std::to_string(i) + ", " + std::to_string(j) +
                                                ")");
    }
};

/// Eigenvalues in ascending order paired with M-orthonormal column vectors.
struct EigenpairSet {
    Vector values;
    DenseMatrix vectors;

    index_t count() const { return static_cast<index_t>(values.size()); }
    index_t dim() const { return vectors.nrows; }
};

/// Flips the vector so its first component of magnitude above the threshold
/// is positive; leaves vectors with no such component untouched.
inline void fix_sign(std::span<double> v, double threshold = 1e-8) {
    for (double x : v) {
        if (std::abs(x) > threshold) {
            if (x < 0.0) scale(-1.0, v);
            return;
        }
    }
}

/// Computes the q smallest eigenpairs of A x = lambda M x for a symmetric
/// pair with M positive definite. Vectors come back M-orthonormal with the
/// sign convention of fix_sign.
inline EigenpairSet generalized_eig(const DenseSymPair& pair, index_t q) {
    const index_t dim = pair.dim();
    if (q < 1)
        throw std::invalid_argument("generalized_eig: need at least one eigenpair");
    if (q > dim)
        throw std::invalid_argument("generalized_eig: requested " + std::to_string(q) +
                                    " pairs from dimension " + std::to_string(dim));

    const int n = static_cast<int>(dim);
    std::vector<double> a(pair.a.data);
    std::vector<double> b(pair.m.data);
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) * static_cast<std::size_t>(q));
    std::vector<int> iwork(static_cast<std::size_t>(5 * n));
    std::vector<int> ifail(static_cast<std::size_t>(n));

    const int itype = 1, il = 1, iu = static_cast<int>(q);
    const char jobz = 'V', range = 'I', uplo = 'L';
    const double vl = 0.0, vu = 0.0;
    const char safe_min = 'S';
    const double abstol = 2.0 * dlamch_(&safe_min);
    int m = 0, info = 0;

    int lwork = -1;
    double work_size = 0.0;
    dsygvx_(&itype, &jobz, &range, &uplo, &n, a.data(), &n, b.data(), &n, &vl, &vu, &il, &iu,
            &abstol, &m, w.data(), z.data(), &n, &work_size, &lwork, iwork.data(), ifail.data(),
            &info);
    lwork = std::max(static_cast<int>(work_size), 8 * n);
    std::vector<double> work(static_cast<std::size_t>(lwork));
    dsygvx_(&itype, &jobz, &range, &uplo, &n, a.data(), &n, b.data(), &n, &vl, &vu, &il, &iu,
            &abstol, &m, w.data(), z.data(), &n, work.data(), &lwork, iwork.data(), ifail.data(),
            &info);

    if (info > n)
        throw not_spd_error(info - n, "mass matrix is not positive definite: leading minor of "
                                      "order " + std::to_string(info - n) +
                                      " has a non-positive pivot");
    if (info != 0)
        throw std::runtime_error("generalized eigensolver did not converge (info=" +
                                 std::to_string(info) + ")");
    if (m != static_cast<int>(q))
        throw std::runtime_error("generalized eigensolver returned " + std::to_string(m) +
                                 " of " + std::to_string(q) + " requested pairs");

    EigenpairSet out;
    out.values.assign(w.begin(), w.begin() + q);
    out.vectors = DenseMatrix(dim, q);
    std::copy(z.begin(), z.end(), out.vectors.data.begin());
    for (index_t j = 0; j < q; ++j) fix_sign(out.vectors.col(j));
    return out;
}

} // namespace amgeig
