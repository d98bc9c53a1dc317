#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sparse.hpp"
#include "types.hpp"

namespace amgeig {

namespace detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// Reads a Matrix Market coordinate stream (real, general or symmetric).
/// Symmetric files store the lower triangle; off-diagonal entries are
/// mirrored. Duplicate coordinates are summed. `source` names the stream in
/// error messages.
inline SparseMatrix read_matrix_market(std::istream& in,
                                       const std::string& source = "<stream>") {
    std::string line;
    long lineno = 0;
    bool mirror = false;

    if (!std::getline(in, line))
        throw parse_error(source, 1, "empty input, expected Matrix Market banner");
    ++lineno;
    {
        std::istringstream hs(line);
        std::string banner, object, format, field, symmetry;
        hs >> banner >> object >> format >> field >> symmetry;
        if (detail::lower(banner) != "%%matrixmarket")
            throw parse_error(source, lineno, "missing %%MatrixMarket banner");
        object = detail::lower(object);
        format = detail::lower(format);
        field = detail::lower(field);
        symmetry = detail::lower(symmetry);
        if (object != "matrix" || format != "coordinate")
            throw parse_error(source, lineno, "only 'matrix coordinate' inputs are supported");
        if (field != "real")
            throw parse_error(source, lineno, "only real-valued matrices are supported");
        if (symmetry != "general" && symmetry != "symmetric")
            throw parse_error(source, lineno,
                              "symmetry must be 'general' or 'symmetric', got '" + symmetry + "'");
        mirror = (symmetry == "symmetric");
    }

    auto next_content_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            ++lineno;
            const auto pos = out.find_first_not_of(" \t\r\n");
            if (pos == std::string::npos) continue; // blank
            if (out[pos] == '%') continue;          // comment
            return true;
        }
        return false;
    };

    index_t nrows = 0, ncols = 0;
    long declared = 0;
    if (!next_content_line(line))
        throw parse_error(source, lineno + 1, "missing size line");
    {
        std::istringstream ss(line);
        if (!(ss >> nrows >> ncols >> declared) || nrows < 0 || ncols < 0 || declared < 0)
            throw parse_error(source, lineno, "malformed size line '" + line + "'");
        std::string rest;
        if (ss >> rest)
            throw parse_error(source, lineno, "trailing tokens on size line");
    }

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(mirror ? 2 * declared : declared));
    for (long k = 0; k < declared; ++k) {
        if (!next_content_line(line))
            throw parse_error(source, lineno + 1,
                              "expected " + std::to_string(declared) + " entries, got " +
                                  std::to_string(k));
        std::istringstream ss(line);
        index_t i = 0, j = 0;
        double v = 0.0;
        if (!(ss >> i >> j >> v))
            throw parse_error(source, lineno, "malformed entry '" + line + "'");
        std::string rest;
        if (ss >> rest)
            throw parse_error(source, lineno, "trailing tokens on entry line");
        if (i < 1 || i > nrows || j < 1 || j > ncols)
            throw parse_error(source, lineno,
                              "index (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") outside " + std::to_string(nrows) + "x" +
                                  std::to_string(ncols));
        if (mirror && j > i)
            throw parse_error(source, lineno,
                              "symmetric storage must list only the lower triangle, got (" +
                                  std::to_string(i) + ", " + std::to_string(j) + ")");
        entries.push_back({i - 1, j - 1, v});
        if (mirror && i != j) entries.push_back({j - 1, i - 1, v});
    }
    return from_triplets(nrows, ncols, std::move(entries));
}

inline SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_matrix_market(in, path);
}

/// Writes coordinate format (real general), 1-based, %.17g values.
inline void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.nrows << " " << a.ncols << " " << a.nnz() << "\n";
    for (index_t i = 0; i < a.nrows; ++i)
        for (index_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            out << (i + 1) << " " << (a.col_indices[p] + 1) << " "
                << detail::format_g17(a.values[p]) << "\n";
}

inline void write_matrix_market(const SparseMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_matrix_market(a, out);
    if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace amgeig
