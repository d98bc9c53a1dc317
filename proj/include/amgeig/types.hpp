#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace amgeig {

using index_t = std::int64_t;

/// Dense vector of doubles.
using Vector = std::vector<double>;

/// Thrown when a text input (matrix file, mesh file) cannot be parsed.
/// The message carries "<source>:<line>: <reason>".
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& source, long line, const std::string& reason)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + reason),
          line_(line) {}

    /// 1-based line number of the offending input line.
    long line() const { return line_; }

private:
    long line_;
};

/// Thrown when a Cholesky-type factorization hits a non-positive pivot,
/// i.e. the matrix is not (numerically) symmetric positive definite.
class not_spd_error : public std::runtime_error {
public:
    not_spd_error(index_t pivot, const std::string& reason)
        : std::runtime_error(reason), pivot_(pivot) {}

    /// 1-based index of the pivot that failed.
    index_t pivot() const { return pivot_; }

private:
    index_t pivot_;
};

/// Thrown when an interpolation row collapses: the weight denominator of a
/// fine point vanishes relative to its row magnitude.
class degenerate_row_error : public std::runtime_error {
public:
    degenerate_row_error(index_t row, const std::string& reason)
        : std::runtime_error(reason), row_(row) {}

    /// Index of the fine-grid row whose denominator degenerated.
    index_t row() const { return row_; }

private:
    index_t row_;
};

} // namespace amgeig
