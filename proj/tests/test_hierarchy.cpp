#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include <amgeig/fem.hpp>
#include <amgeig/hierarchy.hpp>
#include <amgeig/mesh.hpp>
#include <amgeig/sparse.hpp>

#include "support/invariants.hpp"
#include "support/reference.hpp"

using amgeig::Hierarchy;
using amgeig::SetupParams;
using amgeig::SparseMatrix;
using amgeig::index_t;

namespace {

bool same_matrix(const SparseMatrix& a, const SparseMatrix& b) {
    return a.nrows == b.nrows && a.ncols == b.ncols && a.row_offsets == b.row_offsets &&
           a.col_indices == b.col_indices && a.values == b.values;
}

double rel_diff(const SparseMatrix& a, const SparseMatrix& b) {
    const SparseMatrix d = amgeig::add_scaled(a, b, 1.0, -1.0);
    return amgeig::max_abs(d) / std::max(amgeig::max_abs(a), 1e-300);
}

} // namespace

TEST_CASE("small inputs produce a single-level hierarchy", "[hierarchy]") {
    const SparseMatrix a = testsupport::laplacian_1d(10);
    const SparseMatrix m = amgeig::identity(10);
    const Hierarchy h = amgeig::build_hierarchy(a, m);
    REQUIRE(h.num_levels() == 1);
    REQUIRE(h.prolongations.empty());
    REQUIRE(h.coarse_factor.dim() == 10);
    REQUIRE(same_matrix(h.levels[0].a, a));
    REQUIRE(same_matrix(h.levels[0].m, m));
}

TEST_CASE("finite element pair at mesh size 16 coarsens consistently",
          "[hierarchy]") {
    const amgeig::TriMesh mesh = amgeig::structured_mesh(16);
    const amgeig::DirichletReduction prob =
        amgeig::assemble_problem(mesh, amgeig::ProblemSpec{});
    REQUIRE(prob.a.nrows == 225);

    SECTION("default parameters stop immediately below the coarse cap") {
        const Hierarchy h = amgeig::build_hierarchy(prob.a, prob.m);
        REQUIRE(h.num_levels() == 1);
    }

    SECTION("a small coarse cap yields a strictly decreasing multilevel hierarchy") {
        SetupParams params;
        params.max_coarse_dim = 30;
        const Hierarchy h = amgeig::build_hierarchy(prob.a, prob.m, params);
        REQUIRE(h.num_levels() >= 3);
        REQUIRE(h.dim(h.coarsest()) <= 30);
        REQUIRE(static_cast<index_t>(h.prolongations.size()) == h.num_levels() - 1);
        for (index_t k = 0; k + 1 < h.num_levels(); ++k) {
            REQUIRE(h.dim(k + 1) < h.dim(k));
            // Stored coarse pairs are exactly the Galerkin products as built.
            REQUIRE(same_matrix(h.levels[k + 1].a, amgeig::rap(h.prolongations[k], h.levels[k].a)));
            REQUIRE(same_matrix(h.levels[k + 1].m, amgeig::rap(h.prolongations[k], h.levels[k].m)));
        }
        const auto bad = testsupport::hierarchy_violations(h);
        CAPTURE(bad);
        REQUIRE(bad.empty());
    }
}

TEST_CASE("stored coarse pairs match a dense triple product", "[hierarchy]") {
    const SparseMatrix a = testsupport::laplacian_1d(25);
    std::vector<amgeig::Triplet> mt;
    for (index_t i = 0; i < 25; ++i) mt.push_back({i, i, 1.0 + 0.01 * static_cast<double>(i)});
    const SparseMatrix m = amgeig::from_triplets(25, 25, std::move(mt));

    SetupParams params;
    params.max_coarse_dim = 5;
    const Hierarchy h = amgeig::build_hierarchy(a, m, params);
    REQUIRE(h.num_levels() >= 3);
    for (index_t k = 0; k + 1 < h.num_levels(); ++k) {
        const testsupport::RefDense p = testsupport::RefDense::from_sparse(h.prolongations[k]);
        const testsupport::RefDense fa = testsupport::RefDense::from_sparse(h.levels[k].a);
        const testsupport::RefDense fm = testsupport::RefDense::from_sparse(h.levels[k].m);
        const testsupport::RefDense ca = testsupport::ref_triple_product(p, fa);
        const testsupport::RefDense cm = testsupport::ref_triple_product(p, fm);
        const testsupport::RefDense sa = testsupport::RefDense::from_sparse(h.levels[k + 1].a);
        const testsupport::RefDense sm = testsupport::RefDense::from_sparse(h.levels[k + 1].m);
        for (index_t i = 0; i < ca.nrows; ++i)
            for (index_t j = 0; j < ca.ncols; ++j) {
                REQUIRE(sa.at(i, j) == Catch::Approx(ca.at(i, j)).margin(1e-12 * ca.max_abs()));
                REQUIRE(sm.at(i, j) == Catch::Approx(cm.at(i, j)).margin(1e-12 * cm.max_abs()));
            }
    }
}

TEST_CASE("composite transfers chain the prolongations", "[hierarchy]") {
    const SparseMatrix a = testsupport::laplacian_1d(40);
    const SparseMatrix m = amgeig::identity(40);
    SetupParams params;
    params.max_coarse_dim = 4;
    const Hierarchy h = amgeig::build_hierarchy(a, m, params);
    REQUIRE(h.num_levels() >= 3);

    SECTION("same level gives the identity") {
        const SparseMatrix t = amgeig::composite_transfer(h, 1, 1);
        REQUIRE(same_matrix(t, amgeig::identity(h.dim(1))));
    }
    SECTION("adjacent levels give the stored prolongation") {
        const SparseMatrix t = amgeig::composite_transfer(h, 0, 1);
        REQUIRE(same_matrix(t, h.prolongations[0]));
    }
    SECTION("the full composite reproduces the coarsest pair") {
        const index_t n = h.coarsest();
        const SparseMatrix t = amgeig::composite_transfer(h, 0, n);
        REQUIRE(t.nrows == h.dim(0));
        REQUIRE(t.ncols == h.dim(n));
        const SparseMatrix an = amgeig::rap(t, h.levels[0].a);
        REQUIRE(rel_diff(an, h.levels[n].a) < 1e-10);
        const SparseMatrix mn = amgeig::rap(t, h.levels[0].m);
        REQUIRE(rel_diff(mn, h.levels[n].m) < 1e-10);
    }
    SECTION("levels out of range are rejected") {
        REQUIRE_THROWS_AS(amgeig::composite_transfer(h, -1, 0), std::invalid_argument);
        REQUIRE_THROWS_AS(amgeig::composite_transfer(h, 0, h.num_levels()),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(amgeig::composite_transfer(h, 2, 1), std::invalid_argument);
    }
}

TEST_CASE("stalled coarsening keeps the level and stops", "[hierarchy]") {
    // A diagonal matrix turns every point coarse, so the "coarse" level has
    // the same dimension and the stall guard fires.
    std::vector<amgeig::Triplet> t;
    for (index_t i = 0; i < 600; ++i) t.push_back({i, i, 2.0});
    const SparseMatrix a = amgeig::from_triplets(600, 600, std::move(t));
    const Hierarchy h = amgeig::build_hierarchy(a, amgeig::identity(600));
    REQUIRE(h.num_levels() == 1);
    REQUIRE(h.dim(0) == 600);
    REQUIRE(h.coarse_factor.dim() == 600); // still small enough to factor
}

TEST_CASE("level budget caps the hierarchy depth", "[hierarchy]") {
    const SparseMatrix a = testsupport::laplacian_1d(63);
    SetupParams params;
    params.max_coarse_dim = 2;
    params.max_levels = 3;
    const Hierarchy h = amgeig::build_hierarchy(a, amgeig::identity(63), params);
    REQUIRE(h.num_levels() == 3);
    REQUIRE(h.dim(2) > 2); // stopped by the budget, not the coarse cap
}

TEST_CASE("oversized coarsest levels skip the direct factorization", "[hierarchy]") {
    std::vector<amgeig::Triplet> t;
    for (index_t i = 0; i < 5000; ++i) t.push_back({i, i, 1.0});
    const SparseMatrix a = amgeig::from_triplets(5000, 5000, std::move(t));
    const Hierarchy h = amgeig::build_hierarchy(a, amgeig::identity(5000));
    REQUIRE(h.num_levels() == 1);
    REQUIRE(h.coarse_factor.empty());
}

TEST_CASE("hierarchy construction validates its inputs", "[hierarchy]") {
    const SparseMatrix a = testsupport::laplacian_1d(6);
    const SparseMatrix m = amgeig::identity(6);

    SECTION("asymmetric stiffness") {
        const SparseMatrix bad =
            amgeig::from_triplets(6, 6, {{0, 1, 1.0}, {0, 0, 2.0}, {1, 1, 2.0},
                                         {2, 2, 1.0}, {3, 3, 1.0}, {4, 4, 1.0},
                                         {5, 5, 1.0}});
        REQUIRE_THROWS_AS(amgeig::build_hierarchy(bad, m), std::invalid_argument);
    }
    SECTION("asymmetric mass") {
        const SparseMatrix bad =
            amgeig::from_triplets(6, 6, {{2, 4, -1.0}, {0, 0, 1.0}, {1, 1, 1.0},
                                         {2, 2, 1.0}, {3, 3, 1.0}, {4, 4, 1.0},
                                         {5, 5, 1.0}});
        REQUIRE_THROWS_AS(amgeig::build_hierarchy(a, bad), std::invalid_argument);
    }
    SECTION("size mismatch") {
        REQUIRE_THROWS_AS(amgeig::build_hierarchy(a, amgeig::identity(5)),
                          std::invalid_argument);
    }
    SECTION("parameter ranges") {
        SetupParams p;
        p.max_coarse_dim = 0;
        REQUIRE_THROWS_AS(amgeig::build_hierarchy(a, m, p), std::invalid_argument);
        p = SetupParams{};
        p.max_levels = 0;
        REQUIRE_THROWS_AS(amgeig::build_hierarchy(a, m, p), std::invalid_argument);
        p = SetupParams{};
        p.min_coarsening_ratio = 0.0;
        REQUIRE_THROWS_AS(amgeig::build_hierarchy(a, m, p), std::invalid_argument);
        p.min_coarsening_ratio = 1.5;
        REQUIRE_THROWS_AS(amgeig::build_hierarchy(a, m, p), std::invalid_argument);
        p = SetupParams{};
        p.theta = 1.0;
        REQUIRE_THROWS_AS(amgeig::build_hierarchy(amgeig::symmetrize(a), m, p),
                          std::invalid_argument);
    }
}

TEST_CASE("hierarchy construction is deterministic", "[hierarchy]") {
    std::mt19937 rng(5150);
    const SparseMatrix a = testsupport::random_sparse_spd(rng, 120, 300);
    const SparseMatrix m = amgeig::identity(120);
    SetupParams params;
    params.max_coarse_dim = 10;
    const Hierarchy h1 = amgeig::build_hierarchy(a, m, params);
    const Hierarchy h2 = amgeig::build_hierarchy(a, m, params);
    REQUIRE(h1.num_levels() == h2.num_levels());
    for (index_t k = 0; k < h1.num_levels(); ++k) {
        REQUIRE(same_matrix(h1.levels[k].a, h2.levels[k].a));
        REQUIRE(same_matrix(h1.levels[k].m, h2.levels[k].m));
    }
    for (std::size_t k = 0; k < h1.prolongations.size(); ++k)
        REQUIRE(same_matrix(h1.prolongations[k], h2.prolongations[k]));
}

TEST_CASE("theta leaks through to every level's setup", "[hierarchy]") {
    // hierarchy_violations re-derives the setup with h.params.theta; a
    // non-default threshold must therefore reproduce the stored prolongations.
    const amgeig::TriMesh mesh = amgeig::structured_mesh(12);
    const amgeig::DirichletReduction prob =
        amgeig::assemble_problem(mesh, amgeig::ProblemSpec{});
    SetupParams params;
    params.theta = 0.5;
    params.max_coarse_dim = 15;
    const Hierarchy h = amgeig::build_hierarchy(prob.a, prob.m, params);
    REQUIRE(h.num_levels() >= 2);
    const auto bad = testsupport::hierarchy_violations(h);
    CAPTURE(bad);
    REQUIRE(bad.empty());
}
