#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include <amgeig/matrix_market.hpp>
#include <amgeig/sparse.hpp>

#include "support/reference.hpp"

using amgeig::SparseMatrix;
using amgeig::Triplet;
using amgeig::index_t;

namespace {

SparseMatrix tridiag3() {
    return amgeig::from_triplets(3, 3,
                                 {{0, 0, 2.0},
                                  {0, 1, -1.0},
                                  {1, 0, -1.0},
                                  {1, 1, 2.0},
                                  {1, 2, -1.0},
                                  {2, 1, -1.0},
                                  {2, 2, 2.0}});
}

} // namespace

TEST_CASE("matrix market round-trips a random 10x10 exactly", "[matrix-market]") {
    std::mt19937 rng(20240815);
    const auto entries = testsupport::random_triplets(rng, 10, 10, 35);
    const SparseMatrix a = amgeig::from_triplets(10, 10, entries);

    std::ostringstream out;
    amgeig::write_matrix_market(a, out);
    std::istringstream in(out.str());
    const SparseMatrix b = amgeig::read_matrix_market(in, "roundtrip");

    REQUIRE(b.nrows == a.nrows);
    REQUIRE(b.ncols == a.ncols);
    REQUIRE(b.row_offsets == a.row_offsets);
    REQUIRE(b.col_indices == a.col_indices);
    REQUIRE(b.values == a.values); // %.17g output reproduces doubles exactly
}

TEST_CASE("matrix market file round-trip through the filesystem", "[matrix-market]") {
    std::mt19937 rng(777);
    const SparseMatrix a =
        amgeig::from_triplets(6, 4, testsupport::random_triplets(rng, 6, 4, 12));
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "amgeig_mm_roundtrip.mtx";
    amgeig::write_matrix_market(a, path);
    const SparseMatrix b = amgeig::read_matrix_market(path);
    std::filesystem::remove(path);

    REQUIRE(b.nrows == a.nrows);
    REQUIRE(b.ncols == a.ncols);
    REQUIRE(b.col_indices == a.col_indices);
    REQUIRE(b.values == a.values);
}

TEST_CASE("symmetric storage expands the lower triangle to full storage",
          "[matrix-market]") {
    // Only the lower triangle of tridiag(-1,2,-1) of size 3 is listed; the
    // reader must mirror the off-diagonal entries into a 7-entry matrix.
    const std::string text = "%%MatrixMarket matrix coordinate real symmetric\n"
                             "3 3 5\n"
                             "1 1 2.0\n"
                             "2 1 -1.0\n"
                             "2 2 2.0\n"
                             "3 2 -1.0\n"
                             "3 3 2.0\n";
    std::istringstream in(text);
    const SparseMatrix a = amgeig::read_matrix_market(in, "lower");
    const SparseMatrix want = tridiag3();

    REQUIRE(a.nnz() == 7);
    REQUIRE(a.row_offsets == want.row_offsets);
    REQUIRE(a.col_indices == want.col_indices);
    REQUIRE(a.values == want.values);
}

TEST_CASE("comments and blank lines are skipped", "[matrix-market]") {
    const std::string text = "%%MatrixMarket matrix coordinate real general\n"
                             "% a comment\n"
                             "\n"
                             "2 2 2\n"
                             "% another comment between entries\n"
                             "1 1 4.0\n"
                             "\n"
                             "2 2 -3.5\n";
    std::istringstream in(text);
    const SparseMatrix a = amgeig::read_matrix_market(in, "comments");
    REQUIRE(a.nnz() == 2);
    REQUIRE(a(0, 0) == 4.0);
    REQUIRE(a(1, 1) == -3.5);
}

TEST_CASE("duplicate entries in a file are summed", "[matrix-market]") {
    const std::string text = "%%MatrixMarket matrix coordinate real general\n"
                             "2 2 3\n"
                             "1 2 1.25\n"
                             "1 2 0.5\n"
                             "2 1 -1.0\n";
    std::istringstream in(text);
    const SparseMatrix a = amgeig::read_matrix_market(in, "dups");
    REQUIRE(a.nnz() == 2);
    REQUIRE(a(0, 1) == 1.75);
}

TEST_CASE("matrix market rejects malformed input with line numbers",
          "[matrix-market]") {
    auto read = [](const std::string& text) {
        std::istringstream in(text);
        return amgeig::read_matrix_market(in, "bad");
    };

    SECTION("zero index in 1-based format") {
        const std::string text = "%%MatrixMarket matrix coordinate real general\n"
                                 "2 2 1\n"
                                 "0 1 3.0\n";
        try {
            read(text);
            FAIL("expected parse_error");
        } catch (const amgeig::parse_error& e) {
            REQUIRE(e.line() == 3);
        }
    }
    SECTION("index past the declared size") {
        const std::string text = "%%MatrixMarket matrix coordinate real general\n"
                                 "2 2 1\n"
                                 "1 3 3.0\n";
        REQUIRE_THROWS_AS(read(text), amgeig::parse_error);
    }
    SECTION("malformed banner") {
        REQUIRE_THROWS_AS(read("%%MatrixMarket matrix array real general\n1 1 0\n"),
                          amgeig::parse_error);
        REQUIRE_THROWS_AS(read("%%MatrixMarket matrix coordinate complex general\n"),
                          amgeig::parse_error);
        REQUIRE_THROWS_AS(read("not a banner\n"), amgeig::parse_error);
    }
    SECTION("non-numeric entry names its line") {
        const std::string text = "%%MatrixMarket matrix coordinate real general\n"
                                 "2 2 2\n"
                                 "1 1 1.0\n"
                                 "2 two 2.0\n";
        try {
            read(text);
            FAIL("expected parse_error");
        } catch (const amgeig::parse_error& e) {
            REQUIRE(e.line() == 4);
        }
    }
    SECTION("trailing tokens on an entry line") {
        const std::string text = "%%MatrixMarket matrix coordinate real general\n"
                                 "2 2 1\n"
                                 "1 1 1.0 extra\n";
        REQUIRE_THROWS_AS(read(text), amgeig::parse_error);
    }
    SECTION("missing entries") {
        const std::string text = "%%MatrixMarket matrix coordinate real general\n"
                                 "2 2 2\n"
                                 "1 1 1.0\n";
        REQUIRE_THROWS_AS(read(text), amgeig::parse_error);
    }
    SECTION("symmetric upper-triangle entry is rejected") {
        const std::string text = "%%MatrixMarket matrix coordinate real symmetric\n"
                                 "2 2 1\n"
                                 "1 2 1.0\n";
        REQUIRE_THROWS_AS(read(text), amgeig::parse_error);
    }
}

TEST_CASE("banner keywords are case-insensitive", "[matrix-market]") {
    const std::string text = "%%matrixmarket MATRIX Coordinate Real General\n"
                             "1 1 1\n"
                             "1 1 5.0\n";
    std::istringstream in(text);
    const SparseMatrix a = amgeig::read_matrix_market(in, "case");
    REQUIRE(a(0, 0) == 5.0);
}
