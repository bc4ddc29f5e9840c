#include "infoflow/entropy.hpp"

#include "infoflow/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace infoflow;

TEST_CASE("shannon entropy on known tables") {
    // four equal categories: log2(4) = 2 bits
    CHECK(shannon_entropy(std::vector<int>{0, 1, 2, 3}, LogBase::two) == doctest::Approx(2.0));
    // a single category carries no information
    CHECK(shannon_entropy(std::vector<int>{7, 7, 7}, LogBase::two) == doctest::Approx(0.0));
    // counts (1,1,2): 2 * (1/4)*2 + (1/2)*1 = 1.5 bits
    CHECK(shannon_entropy(std::vector<int>{0, 1, 2, 2}, LogBase::two) == doctest::Approx(1.5));
    CHECK_THROWS_AS(shannon_entropy(std::vector<int>{}, LogBase::two), Error);
}

TEST_CASE("conditional entropy on the x-rows table [[2,0],[1,1]]") {
    const std::vector<int> x{0, 0, 1, 1};
    const std::vector<int> y{0, 0, 0, 1};
    CHECK(conditional_entropy(y, x, LogBase::two) == doctest::Approx(0.5));
    CHECK(information_gain(y, x, LogBase::two) == doctest::Approx(0.8112781245 - 0.5));
    CHECK(directed_nce(y, x) == doctest::Approx(0.5 / 0.8112781245));

    SUBCASE("y determined by x") {
        CHECK(conditional_entropy(x, x, LogBase::two) == doctest::Approx(0.0));
        CHECK(information_gain(x, x, LogBase::two) ==
              doctest::Approx(shannon_entropy(x, LogBase::two)));
        CHECK(directed_nce(x, x) == doctest::Approx(0.0));
    }
    SUBCASE("conditioning on a constant changes nothing") {
        const std::vector<int> c{5, 5, 5, 5};
        CHECK(conditional_entropy(y, c, LogBase::two) ==
              doctest::Approx(shannon_entropy(y, LogBase::two)));
        CHECK(directed_nce(y, c) == doctest::Approx(1.0));
    }
    SUBCASE("independence on the product-uniform table") {
        const std::vector<int> xi{0, 0, 1, 1};
        const std::vector<int> yi{0, 1, 0, 1};
        CHECK(information_gain(yi, xi, LogBase::two) == doctest::Approx(0.0));
    }
    SUBCASE("length mismatch is rejected") {
        CHECK_THROWS_AS(conditional_entropy(std::vector<int>{0, 1}, x, LogBase::two), Error);
    }
}

TEST_CASE("directed_nce of a determined response is zero even against noise") {
    const std::vector<int> y{3, 3, 3, 3};
    const std::vector<int> x{0, 1, 2, 3};
    CHECK(directed_nce(y, x) == 0.0);
    CHECK(mutual_ce(y, x) == doctest::Approx(0.5)); // the x-direction still counts
}

TEST_CASE("all measures agree with the brute-force contingency oracle") {
    std::mt19937 rng(991);
    for (int trial = 0; trial < 400; ++trial) {
        const size_t n = 1 + rng() % 50;
        const int cats = 1 + static_cast<int>(rng() % 5);
        std::vector<int> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = static_cast<int>(rng() % static_cast<unsigned>(cats));
            y[i] = static_cast<int>(rng() % static_cast<unsigned>(cats));
        }
        const double ln2 = std::log(2.0);
        CHECK(shannon_entropy(x, LogBase::two) == doctest::Approx(oracle::entropy(x, ln2)).epsilon(1e-12));
        CHECK(conditional_entropy(y, x, LogBase::two) ==
              doctest::Approx(oracle::conditional_entropy(y, x, ln2)).epsilon(1e-12));
        CHECK(information_gain(y, x, LogBase::natural) ==
              doctest::Approx(oracle::information_gain(y, x, 1.0)).epsilon(1e-12));
        CHECK(directed_nce(y, x) == doctest::Approx(oracle::directed_nce(y, x)).epsilon(1e-12));
        CHECK(mutual_ce(y, x) == doctest::Approx(oracle::mutual_ce(y, x)).epsilon(1e-12));
    }
}

TEST_CASE("relabeling and subject-permutation invariance") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const size_t n = 5 + rng() % 40;
        std::vector<int> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = static_cast<int>(rng() % 4);
            y[i] = static_cast<int>(rng() % 4);
        }
        const double base = mutual_ce(y, x);

        // permute category labels of x
        std::vector<int> perm{2, 3, 1, 0};
        std::vector<int> xr(n);
        for (size_t i = 0; i < n; ++i) xr[i] = perm[static_cast<size_t>(x[i])];
        CHECK(mutual_ce(y, xr) == doctest::Approx(base).epsilon(1e-12));

        // permute subjects jointly
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<int> xp(n), yp(n);
        for (size_t i = 0; i < n; ++i) {
            xp[i] = x[order[i]];
            yp[i] = y[order[i]];
        }
        CHECK(mutual_ce(yp, xp) == doctest::Approx(base).epsilon(1e-12));
        CHECK(mutual_ce(y, x) == doctest::Approx(mutual_ce(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("chain bounds and base conversion") {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const size_t n = 2 + rng() % 30;
        std::vector<int> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = static_cast<int>(rng() % 3);
            y[i] = static_cast<int>(rng() % 3);
        }
        const double hy = shannon_entropy(y, LogBase::natural);
        const double hx = shannon_entropy(x, LogBase::natural);
        const double hyx = conditional_entropy(y, x, LogBase::natural);
        const double ig = information_gain(y, x, LogBase::natural);
        CHECK(hyx >= -1e-12);
        CHECK(hyx <= hy + 1e-12);
        CHECK(ig >= -1e-12);
        CHECK(ig <= std::min(hx, hy) + 1e-12);
        CHECK(directed_nce(y, x) >= 0.0);
        CHECK(directed_nce(y, x) <= 1.0);

        // unnormalized measures scale by ln 2; normalized ones do not move
        CHECK(shannon_entropy(y, LogBase::two) == doctest::Approx(hy / std::log(2.0)));
        CHECK(conditional_entropy(y, x, LogBase::two) == doctest::Approx(hyx / std::log(2.0)));
        CHECK(directed_nce(y, x) ==
              doctest::Approx(conditional_entropy(y, x, LogBase::two) /
                              std::max(shannon_entropy(y, LogBase::two), 1e-300))
                  .epsilon(1e-9));
        CHECK(mutual_ce(y, x) == doctest::Approx(mutual_ce(y, x, LogBase::two)).epsilon(1e-12));
    }
}

TEST_CASE("entropy matrix structure") {
    const std::vector<std::vector<int>> cols{{0, 0, 1, 1}, {1, 1, 0, 0}, {0, 1, 0, 1}};
    const EntropyMatrix xi = entropy_matrix(cols, {"a", "b", "c"}, LogBase::natural);
    CHECK(xi.m == 3);
    for (int i = 0; i < 3; ++i) CHECK(xi.at(i, i) == 0.0);
    // duplicate information: a and b determine each other
    CHECK(xi.at(0, 1) == doctest::Approx(0.0));
    // independent pair sits at the uninformative end
    CHECK(xi.at(0, 2) == doctest::Approx(1.0));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(xi.at(i, j) == doctest::Approx(xi.at(j, i)));
    CHECK_THROWS_AS(entropy_matrix({}, {}, LogBase::natural), Error);
}
