#include "infoflow/mechanics.hpp"

#include "infoflow/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

using namespace infoflow;

namespace {

std::vector<std::vector<double>> random_code_matrix(size_t rows, size_t cols, std::mt19937& rng,
                                                    int code_max = 9) {
    std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
    for (auto& row : m)
        for (auto& v : row) v = static_cast<double>(rng() % static_cast<unsigned>(code_max + 1));
    return m;
}

// planted 2x2 block matrix with blocks of 0s and 9s, rows and columns shuffled
struct Planted {
    std::vector<std::vector<double>> shuffled;
    std::vector<int> row_type, col_type; // type per shuffled index
    double planted_energy;
};

Planted make_planted(size_t rows_a, size_t rows_b, size_t cols_x, size_t cols_y,
                     std::mt19937& rng) {
    const size_t rows = rows_a + rows_b, cols = cols_x + cols_y;
    std::vector<int> row_type(rows), col_type(cols);
    for (size_t r = 0; r < rows; ++r) row_type[r] = r < rows_a ? 0 : 1;
    for (size_t c = 0; c < cols; ++c) col_type[c] = c < cols_x ? 0 : 1;

    std::vector<std::vector<double>> planted(rows, std::vector<double>(cols));
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            planted[r][c] = row_type[r] == col_type[c] ? 0.0 : 9.0;
    const double energy = lattice_energy(planted);

    std::vector<size_t> rp(rows), cp(cols);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);

    Planted out;
    out.planted_energy = energy;
    out.shuffled.assign(rows, std::vector<double>(cols));
    out.row_type.resize(rows);
    out.col_type.resize(cols);
    for (size_t r = 0; r < rows; ++r) {
        out.row_type[r] = row_type[rp[r]];
        for (size_t c = 0; c < cols; ++c) out.shuffled[r][c] = planted[rp[r]][cp[c]];
    }
    for (size_t c = 0; c < cols; ++c) out.col_type[c] = col_type[cp[c]];
    return out;
}

} // namespace

TEST_CASE("lattice energy on known matrices") {
    CHECK(lattice_energy({{3.0}}) == 0.0);
    CHECK(lattice_energy({{2.0, 2.0}, {2.0, 2.0}}) == 0.0);
    const std::vector<std::vector<double>> alternating{{0, 1, 0, 1}, {0, 1, 0, 1}};
    CHECK(lattice_energy(alternating) == 6.0);
    const std::vector<std::vector<double>> sorted{{0, 0, 1, 1}, {0, 0, 1, 1}};
    CHECK(lattice_energy(sorted) == 2.0);

    // exhaustive check over all 24 column orders: 2 is the true minimum
    double best = 1e30;
    std::vector<int> perm{0, 1, 2, 3};
    std::sort(perm.begin(), perm.end());
    do {
        std::vector<std::vector<double>> m(2, std::vector<double>(4));
        for (size_t r = 0; r < 2; ++r)
            for (size_t c = 0; c < 4; ++c) m[r][c] = alternating[r][static_cast<size_t>(perm[c])];
        best = std::min(best, lattice_energy(m));
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(best == 2.0);
}

TEST_CASE("planted 2x2 blocks are recovered exactly") {
    std::mt19937 rng(525);
    const Planted planted = make_planted(4, 3, 3, 2, rng);
    const CouplingGeometry geom = data_mechanics_matrix(planted.shuffled, 10, 4, 0);

    CHECK(geom.energy_trace.back() == doctest::Approx(planted.planted_energy));

    const ClusteringComposition rows = composition_at(geom.row_tree, 2);
    for (size_t i = 0; i < planted.row_type.size(); ++i)
        for (size_t j = 0; j < planted.row_type.size(); ++j)
            CHECK((rows.assignment[i] == rows.assignment[j]) ==
                  (planted.row_type[i] == planted.row_type[j]));
    const ClusteringComposition cols = composition_at(geom.col_tree, 2);
    for (size_t i = 0; i < planted.col_type.size(); ++i)
        for (size_t j = 0; j < planted.col_type.size(); ++j)
            CHECK((cols.assignment[i] == cols.assignment[j]) ==
                  (planted.col_type[i] == planted.col_type[j]));

    SUBCASE("block partition at (2,2) gives four uniform blocks") {
        const std::vector<Block> blocks = block_partition(geom, 2, 2);
        REQUIRE(blocks.size() == 4);
        for (const auto& block : blocks) {
            CHECK(block.code_entropy == doctest::Approx(0.0));
            CHECK((block.mean_code == doctest::Approx(0.0) ||
                   block.mean_code == doctest::Approx(9.0)));
        }
    }
    SUBCASE("rerunning on the seriated matrix keeps the arrangement") {
        const CouplingGeometry again = data_mechanics_matrix(geom.matrix, 10, 4, 0);
        CHECK(again.iterations == 1);
        CHECK(again.energy_trace.back() == doctest::Approx(planted.planted_energy));
        std::vector<int> identity(geom.matrix.size());
        std::iota(identity.begin(), identity.end(), 0);
        CHECK(again.row_order == identity);
    }
}

TEST_CASE("already-seriated constant matrix converges immediately") {
    const std::vector<std::vector<double>> constant(5, std::vector<double>(3, 4.0));
    const CouplingGeometry geom = data_mechanics_matrix(constant, 10, 3, 0);
    CHECK(geom.iterations == 1);
    CHECK(geom.energy_trace == std::vector<double>{0.0});
}

TEST_CASE("energy trace is nonincreasing and content is preserved") {
    std::mt19937 rng(1003);
    for (int trial = 0; trial < 40; ++trial) {
        const size_t rows = 2 + rng() % 12, cols = 1 + rng() % 8;
        const auto m = random_code_matrix(rows, cols, rng);
        const CouplingGeometry geom = data_mechanics_matrix(m, 10, 4, 0);

        for (size_t i = 0; i + 1 < geom.energy_trace.size(); ++i)
            CHECK(geom.energy_trace[i + 1] <= geom.energy_trace[i] + 1e-12);

        // row/col orders are permutations and rows travel intact
        std::vector<int> sorted_rows(geom.row_order);
        std::sort(sorted_rows.begin(), sorted_rows.end());
        for (size_t i = 0; i < rows; ++i) CHECK(sorted_rows[i] == static_cast<int>(i));
        for (size_t r = 0; r < rows; ++r) {
            std::multiset<double> original(m[static_cast<size_t>(geom.row_order[r])].begin(),
                                           m[static_cast<size_t>(geom.row_order[r])].end());
            std::multiset<double> output(geom.matrix[r].begin(), geom.matrix[r].end());
            CHECK(original == output);
        }
        CHECK(geom.row_tree.leaves == geom.row_order);
        CHECK(geom.col_tree.leaves == geom.col_order);
    }
}

TEST_CASE("desk-scale energies sit within 10% of the exhaustive minimum") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 12; ++trial) {
        const size_t rows = 3 + rng() % 5, cols = 3 + rng() % 5; // up to 7x7
        const auto m = random_code_matrix(rows, cols, rng);
        const CouplingGeometry geom = data_mechanics_matrix(m, 10, 4, 0);
        const double optimum = oracle::exhaustive_min_energy(m);
        if (optimum == 0.0) {
            CHECK(geom.energy_trace.back() == doctest::Approx(0.0));
        } else {
            CHECK(geom.energy_trace.back() <= 1.10 * optimum + 1e-9);
        }
    }
}

TEST_CASE("dimension guards") {
    CHECK_THROWS_AS(data_mechanics_matrix({{1.0, 2.0}}, 10, 3, 0), Error); // one row
    const std::vector<std::vector<double>> ragged{{1.0, 2.0}, {1.0}};
    CHECK_THROWS_AS(data_mechanics_matrix(ragged, 10, 3, 0), Error);
}

TEST_CASE("block partition trivial level covers the whole matrix") {
    std::mt19937 rng(4);
    const auto m = random_code_matrix(6, 4, rng);
    const CouplingGeometry geom = data_mechanics_matrix(m, 10, 3, 0);
    const std::vector<Block> blocks = block_partition(geom, 1, 1);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].cells.size() == 6);
    CHECK(blocks[0].cells[0].size() == 4);
    CHECK_THROWS_AS(block_partition(geom, 99, 1), Error);
}
