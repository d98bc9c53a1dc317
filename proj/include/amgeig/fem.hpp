#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mesh.hpp"
#include "sparse.hpp"
#include "types.hpp"

namespace amgeig {

/// Model problem selector: pure Laplace, or Laplace plus an attractive
/// Coulomb well -1/|x - center| clamped near the singularity.
struct ProblemSpec {
    enum class Kind { laplace, coulomb };
    Kind kind = Kind::laplace;
    std::array<double, 2> center{0.5, 0.5};
    double clamp_radius = 1e-10;
};

namespace detail {

struct ElementGeometry {
    std::array<std::array<double, 2>, 3> p;
    double area;
};

inline ElementGeometry element_geometry(const TriMesh& mesh, index_t t) {
    ElementGeometry g;
    for (int v = 0; v < 3; ++v) g.p[v] = mesh.vertices[mesh.triangles[t][v]];
    g.area = signed_area(mesh, t);
    if (!(g.area > 0.0))
        throw std::invalid_argument("element " + std::to_string(t) +
                                    " is degenerate or clockwise");
    return g;
}

} // namespace detail

/// Piecewise-linear stiffness matrix of the Dirichlet form grad u . grad v.
inline SparseMatrix assemble_stiffness(const TriMesh& mesh) {
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(9 * mesh.num_triangles()));
    for (index_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = detail::element_geometry(mesh, t);
        // Gradient of hat function v is (b_v, c_v) / (2 area).
        const std::array<double, 3> b{g.p[1][1] - g.p[2][1], g.p[2][1] - g.p[0][1],
                                      g.p[0][1] - g.p[1][1]};
        const std::array<double, 3> c{g.p[2][0] - g.p[1][0], g.p[0][0] - g.p[2][0],
                                      g.p[1][0] - g.p[0][0]};
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s)
                entries.push_back({mesh.triangles[t][r], mesh.triangles[t][s],
                                   (b[r] * b[s] + c[r] * c[s]) / (4.0 * g.area)});
    }
    return from_triplets(mesh.num_vertices(), mesh.num_vertices(), std::move(entries));
}

/// Piecewise-linear mass matrix (exact integration of hat-function products).
inline SparseMatrix assemble_mass(const TriMesh& mesh) {
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(9 * mesh.num_triangles()));
    for (index_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = detail::element_geometry(mesh, t);
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s)
                entries.push_back({mesh.triangles[t][r], mesh.triangles[t][s],
                                   g.area / 12.0 * (r == s ? 2.0 : 1.0)});
    }
    return from_triplets(mesh.num_vertices(), mesh.num_vertices(), std::move(entries));
}

/// Mass matrix weighted by a scalar field, integrated with the three-point
/// edge-midpoint rule (exact for quadratic integrands, so a constant weight
/// reproduces assemble_mass exactly).
template <class Weight>
inline SparseMatrix assemble_weighted_mass(const TriMesh& mesh, Weight&& weight) {
    // Hat-function values at the edge midpoints opposite each vertex.
    static constexpr std::array<std::array<double, 3>, 3> phi{
        {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(9 * mesh.num_triangles()));
    for (index_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = detail::element_geometry(mesh, t);
        std::array<std::array<double, 3>, 3> local{};
        for (int mp = 0; mp < 3; ++mp) {
            const int u = mp, v = (mp + 1) % 3;
            const std::array<double, 2> mid{0.5 * (g.p[u][0] + g.p[v][0]),
                                            0.5 * (g.p[u][1] + g.p[v][1])};
            const double w = weight(mid) * g.area / 3.0;
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) local[r][s] += w * phi[mp][r] * phi[mp][s];
        }
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s)
                entries.push_back({mesh.triangles[t][r], mesh.triangles[t][s], local[r][s]});
    }
    return from_triplets(mesh.num_vertices(), mesh.num_vertices(), std::move(entries));
}

/// Coulomb-well contribution -1/max(|x - center|, clamp) as a weighted mass
/// matrix. The center must lie strictly inside the unit square.
inline SparseMatrix assemble_potential(const TriMesh& mesh, const ProblemSpec& spec) {
    const auto& z = spec.center;
    if (!(z[0] > 0.0 && z[0] < 1.0 && z[1] > 0.0 && z[1] < 1.0))
        throw std::invalid_argument("potential center must lie strictly inside the unit square");
    if (!(spec.clamp_radius > 0.0))
        throw std::invalid_argument("potential clamp radius must be positive");
    return assemble_weighted_mass(mesh, [&](const std::array<double, 2>& x) {
        const double r = std::hypot(x[0] - z[0], x[1] - z[1]);
        return -1.0 / std::max(r, spec.clamp_radius);
    });
}

/// Matrices restricted to interior vertices, with the index map back to the
/// full vertex numbering.
struct DirichletReduction {
    SparseMatrix a;
    SparseMatrix m;
    std::vector<index_t> interior_to_global;
};

/// Eliminates boundary rows and columns from both matrices.
inline DirichletReduction apply_dirichlet(const SparseMatrix& a, const SparseMatrix& m,
                                          const TriMesh& mesh) {
    const index_t nv = mesh.num_vertices();
    if (a.nrows != nv || a.ncols != nv || m.nrows != nv || m.ncols != nv)
        throw std::invalid_argument("apply_dirichlet: matrix size does not match vertex count");

    DirichletReduction red;
    std::vector<index_t> to_interior(static_cast<std::size_t>(nv), -1);
    for (index_t v = 0; v < nv; ++v)
        if (!mesh.boundary[v]) {
            to_interior[v] = static_cast<index_t>(red.interior_to_global.size());
            red.interior_to_global.push_back(v);
        }
    const index_t ni = static_cast<index_t>(red.interior_to_global.size());

    auto reduce = [&](const SparseMatrix& x) {
        std::vector<Triplet> entries;
        for (index_t i = 0; i < nv; ++i) {
            if (to_interior[i] < 0) continue;
            for (index_t p = x.row_offsets[i]; p < x.row_offsets[i + 1]; ++p) {
                const index_t j = x.col_indices[p];
                if (to_interior[j] < 0) continue;
                entries.push_back({to_interior[i], to_interior[j], x.values[p]});
            }
        }
        return from_triplets(ni, ni, std::move(entries));
    };
    red.a = reduce(a);
    red.m = reduce(m);
    return red;
}

/// Assembles the selected model problem and applies the homogeneous
/// Dirichlet reduction in one step.
inline DirichletReduction assemble_problem(const TriMesh& mesh, const ProblemSpec& spec) {
    SparseMatrix a = assemble_stiffness(mesh);
    if (spec.kind == ProblemSpec::Kind::coulomb)
        a = add_scaled(a, assemble_potential(mesh, spec), 1.0, 1.0);
    DirichletReduction red = apply_dirichlet(a, assemble_mass(mesh), mesh);
    if (red.a.nrows == 0)
        throw std::invalid_argument("assemble_problem: mesh has no interior vertices");
    return red;
}

} // namespace amgeig
