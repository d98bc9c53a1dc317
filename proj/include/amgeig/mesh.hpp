#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "matrix_market.hpp" // detail::format_g17
#include "types.hpp"

namespace amgeig {

/// Conforming triangulation of the closed unit square. Triangles are
/// counter-clockwise; the boundary flag marks vertices on the square's edge.
struct TriMesh {
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::uint8_t> boundary;
    std::vector<std::array<index_t, 3>> triangles;

    index_t num_vertices() const { return static_cast<index_t>(vertices.size()); }
    index_t num_triangles() const { return static_cast<index_t>(triangles.size()); }
};

inline double signed_area(const TriMesh& mesh, index_t t) {
    const auto& [i, j, k] = mesh.triangles[t];
    const auto& p0 = mesh.vertices[i];
    const auto& p1 = mesh.vertices[j];
    const auto& p2 = mesh.vertices[k];
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

/// Uniform n-by-n grid of squares, each split along the same diagonal into
/// two counter-clockwise triangles.
inline TriMesh structured_mesh(index_t n) {
    if (n < 1) throw std::invalid_argument("structured_mesh: need at least one cell per side");
    TriMesh mesh;
    const index_t s = n + 1;
    mesh.vertices.reserve(static_cast<std::size_t>(s * s));
    mesh.boundary.reserve(static_cast<std::size_t>(s * s));
    for (index_t iy = 0; iy <= n; ++iy)
        for (index_t ix = 0; ix <= n; ++ix) {
            mesh.vertices.push_back({static_cast<double>(ix) / static_cast<double>(n),
                                     static_cast<double>(iy) / static_cast<double>(n)});
            mesh.boundary.push_back(ix == 0 || ix == n || iy == 0 || iy == n ? 1 : 0);
        }
    mesh.triangles.reserve(static_cast<std::size_t>(2 * n * n));
    for (index_t iy = 0; iy < n; ++iy)
        for (index_t ix = 0; ix < n; ++ix) {
            const index_t a = iy * s + ix;
            const index_t b = a + 1;
            const index_t c = a + s + 1;
            const index_t d = a + s;
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }
    return mesh;
}

struct MeshLoadResult {
    TriMesh mesh;
    index_t reoriented = 0; // clockwise triangles flipped during the load
};

/// Reads the plain-text mesh format: a `nv nt` count line, nv vertex lines
/// `x y b`, and nt triangle lines with 1-based vertex indices. `#` starts a
/// comment; blank lines are skipped. Clockwise triangles are reoriented and
/// counted; degenerate triangles, dangling indices, inconsistent boundary
/// flags, and a total area away from 1 are errors.
inline MeshLoadResult load_mesh(std::istream& in, const std::string& source = "<stream>") {
    long lineno = 0;
    std::string line;
    auto next_content_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            ++lineno;
            const auto hash = out.find('#');
            if (hash != std::string::npos) out.erase(hash);
            if (out.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };

    if (!next_content_line(line))
        throw parse_error(source, lineno + 1, "missing count line");
    index_t nv = 0, nt = 0;
    {
        std::istringstream ss(line);
        std::string rest;
        if (!(ss >> nv >> nt) || (ss >> rest) || nv < 3 || nt < 1)
            throw parse_error(source, lineno, "count line must be 'nv nt' with nv >= 3, nt >= 1");
    }

    MeshLoadResult out;
    out.mesh.vertices.resize(static_cast<std::size_t>(nv));
    out.mesh.boundary.resize(static_cast<std::size_t>(nv));
    for (index_t v = 0; v < nv; ++v) {
        if (!next_content_line(line))
            throw parse_error(source, lineno + 1, "expected " + std::to_string(nv) +
                                                      " vertex lines, got " + std::to_string(v));
        std::istringstream ss(line);
        double x = 0.0, y = 0.0;
        int b = 0;
        std::string rest;
        if (!(ss >> x >> y >> b) || (ss >> rest) || (b != 0 && b != 1))
            throw parse_error(source, lineno, "vertex line must be 'x y b' with b in {0, 1}");
        out.mesh.vertices[v] = {x, y};
        out.mesh.boundary[v] = static_cast<std::uint8_t>(b);
    }
    for (index_t t = 0; t < nt; ++t) {
        if (!next_content_line(line))
            throw parse_error(source, lineno + 1, "expected " + std::to_string(nt) +
                                                      " triangle lines, got " + std::to_string(t));
        std::istringstream ss(line);
        index_t i = 0, j = 0, k = 0;
        std::string rest;
        if (!(ss >> i >> j >> k) || (ss >> rest))
            throw parse_error(source, lineno, "triangle line must be three vertex indices");
        for (index_t v : {i, j, k})
            if (v < 1 || v > nv)
                throw parse_error(source, lineno, "vertex index " + std::to_string(v) +
                                                      " outside 1.." + std::to_string(nv));
        if (i == j || j == k || i == k)
            throw parse_error(source, lineno, "triangle with repeated vertices");
        out.mesh.triangles.push_back({i - 1, j - 1, k - 1});
        const double area = signed_area(out.mesh, t);
        if (area == 0.0)
            throw parse_error(source, lineno, "degenerate triangle with zero area");
        if (area < 0.0) {
            std::swap(out.mesh.triangles[t][1], out.mesh.triangles[t][2]);
            ++out.reoriented;
        }
    }

    double total = 0.0, comp = 0.0; // Kahan summation
    for (index_t t = 0; t < nt; ++t) {
        const double y = signed_area(out.mesh, t) - comp;
        const double s = total + y;
        comp = (s - total) - y;
        total = s;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::runtime_error(source + ": triangle areas sum to " + std::to_string(total) +
                                 ", expected the unit square");
    for (index_t v = 0; v < nv; ++v) {
        if (!out.mesh.boundary[v]) continue;
        const auto& p = out.mesh.vertices[v];
        const double edge_dist =
            std::min(std::min(std::abs(p[0]), std::abs(1.0 - p[0])),
                     std::min(std::abs(p[1]), std::abs(1.0 - p[1])));
        if (edge_dist > 1e-12)
            throw std::runtime_error(source + ": vertex " + std::to_string(v + 1) +
                                     " is flagged as boundary but lies off the square's edge");
    }
    return out;
}

inline MeshLoadResult load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return load_mesh(in, path);
}

inline void save_mesh(const TriMesh& mesh, std::ostream& out) {
    out << mesh.num_vertices() << " " << mesh.num_triangles() << "\n";
    for (index_t v = 0; v < mesh.num_vertices(); ++v)
        out << detail::format_g17(mesh.vertices[v][0]) << " "
            << detail::format_g17(mesh.vertices[v][1]) << " "
            << static_cast<int>(mesh.boundary[v]) << "\n";
    for (const auto& t : mesh.triangles)
        out << (t[0] + 1) << " " << (t[1] + 1) << " " << (t[2] + 1) << "\n";
}

inline void save_mesh(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    save_mesh(mesh, out);
    if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace amgeig
