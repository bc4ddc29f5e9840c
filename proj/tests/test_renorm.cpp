#include "infoflow/renorm.hpp"

#include "infoflow/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace infoflow;

TEST_CASE("constant vector gives one bin, no gaps") {
    const std::vector<double> values(40, 5.0);
    const PossiblyGappedHistogram hist = build_gapped_histogram(values, 10, 4.0);
    CHECK(hist.bins.size() == 1);
    CHECK(hist.gaps.empty());
    CHECK(hist.bins[0].count == 40);
    CHECK(hist.bins[0].lo < 5.0);
    CHECK(hist.bins[0].hi > 5.0);

    const DigitalColumn col = code_continuous(values, hist, "c");
    for (int code : col.codes) CHECK(code == 0);
}

TEST_CASE("two uniform blobs are separated by exactly one wide gap") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> values;
    for (int i = 0; i < 1000; ++i) values.push_back(u(rng));
    for (int i = 0; i < 1000; ++i) values.push_back(10.0 + u(rng));

    const PossiblyGappedHistogram hist = build_gapped_histogram(values, 10, 4.0);

    // the oracle finds the widest empty interval and checks it clears the
    // gap threshold before the histogram is trusted to report it
    const auto [glo, ghi] = oracle::widest_empty_interval(values);
    const double med = oracle::median_spacing(values);
    REQUIRE(ghi - glo > 4.0 * med);
    REQUIRE(glo == doctest::Approx(1.0).epsilon(0.02));
    REQUIRE(ghi == doctest::Approx(10.0).epsilon(0.02));

    REQUIRE(hist.gaps.size() == 1);
    CHECK(hist.gaps[0].lo == doctest::Approx(glo).epsilon(0.01));
    CHECK(hist.gaps[0].hi == doctest::Approx(ghi).epsilon(0.01));
    CHECK(hist.bins.size() >= 2);

    // no observed value may sit inside a gap
    for (double v : values)
        CHECK((v <= hist.gaps[0].lo || v >= hist.gaps[0].hi));
}

TEST_CASE("histogram invariants on random inputs") {
    std::mt19937 rng(8);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<double> values;
        const int n = 5 + static_cast<int>(rng() % 200);
        std::normal_distribution<double> g(0.0, 1.0 + trial % 3);
        for (int i = 0; i < n; ++i) values.push_back(g(rng));
        if (trial % 4 == 0)
            for (int i = 0; i < n / 3; ++i) values.push_back(50.0 + g(rng)); // planted far blob

        const PossiblyGappedHistogram hist = build_gapped_histogram(values, 10, 4.0);

        long total = 0;
        for (const auto& bin : hist.bins) {
            CHECK(bin.lo < bin.hi);
            total += bin.count;
        }
        CHECK(total == static_cast<long>(values.size()));
        for (size_t b = 0; b + 1 < hist.bins.size(); ++b)
            CHECK(hist.bins[b].hi <= hist.bins[b + 1].lo);
        for (double v : values) CHECK(hist.bin_of(v) >= 0);
        for (const auto& gap : hist.gaps)
            for (double v : values) CHECK((v <= gap.lo || v >= gap.hi));

        // codes are monotone in the raw values
        const DigitalColumn col = code_continuous(values, hist, "x");
        std::vector<size_t> order(values.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return values[a] < values[b]; });
        for (size_t i = 0; i + 1 < order.size(); ++i)
            CHECK(col.codes[order[i]] <= col.codes[order[i + 1]]);
    }
}

TEST_CASE("scale invariance: affine transforms do not move the codes") {
    std::mt19937 rng(99);
    std::normal_distribution<double> g(10.0, 3.0);
    std::vector<double> values;
    for (int i = 0; i < 150; ++i) values.push_back(g(rng));
    for (int i = 0; i < 30; ++i) values.push_back(60.0 + g(rng));

    const DigitalColumn base = code_continuous(values, build_gapped_histogram(values, 10, 4.0));
    for (const auto [a, b] : {std::pair{2.5, -7.0}, std::pair{0.01, 1000.0}}) {
        std::vector<double> transformed;
        for (double v : values) transformed.push_back(a * v + b);
        const DigitalColumn moved =
            code_continuous(transformed, build_gapped_histogram(transformed, 10, 4.0));
        CHECK(moved.codes == base.codes);
    }
}

TEST_CASE("histogram CDF never fits worse than the single-bin baseline") {
    std::mt19937 rng(123);
    auto sup_error = [](const std::vector<double>& values, const PossiblyGappedHistogram& hist) {
        std::vector<double> sorted(values);
        std::sort(sorted.begin(), sorted.end());
        const double n = static_cast<double>(sorted.size());
        double cum = 0.0;
        std::vector<double> cum_before;
        for (const auto& bin : hist.bins) {
            cum_before.push_back(cum);
            cum += static_cast<double>(bin.count);
        }
        auto hcdf = [&](double x) {
            if (x < hist.bins.front().lo) return 0.0;
            for (size_t b = 0; b < hist.bins.size(); ++b) {
                if (x < hist.bins[b].lo) return cum_before[b] / n;
                const bool last = b + 1 == hist.bins.size();
                if (x < hist.bins[b].hi || (last && x <= hist.bins[b].hi)) {
                    const double w = hist.bins[b].hi - hist.bins[b].lo;
                    const double f = w > 0 ? (x - hist.bins[b].lo) / w : 1.0;
                    return (cum_before[b] + f * static_cast<double>(hist.bins[b].count)) / n;
                }
            }
            return 1.0;
        };
        double err = 0.0;
        for (size_t i = 0; i < sorted.size(); ++i) {
            err = std::max(err, std::abs(hcdf(sorted[i]) - static_cast<double>(i) / n));
            err = std::max(err, std::abs(hcdf(sorted[i]) - static_cast<double>(i + 1) / n));
        }
        return err;
    };

    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> values;
        const int n = 20 + static_cast<int>(rng() % 100);
        std::normal_distribution<double> g(0.0, 5.0);
        for (int i = 0; i < n; ++i) values.push_back(g(rng));

        const PossiblyGappedHistogram chosen = build_gapped_histogram(values, 10, 4.0);
        const PossiblyGappedHistogram single = build_gapped_histogram(values, 1, 4.0);
        CHECK(sup_error(values, chosen) <= sup_error(values, single) + 1e-12);
    }
}

TEST_CASE("categorical coding paths") {
    FeatureSpec spec;
    spec.name = "kind";
    spec.dtype = FeatureDtype::categorical;

    SUBCASE("explicit coding map applies verbatim") {
        spec.coding_map = std::map<std::string, int>{{"1", 3}, {"2", 6}, {"3", 9}};
        const DigitalColumn col = code_categorical({"1", "2", "3", "2"}, spec);
        CHECK(col.codes == std::vector<int>{3, 6, 9, 6});
    }
    SUBCASE("unmapped label is rejected") {
        spec.coding_map = std::map<std::string, int>{{"1", 3}};
        CHECK_THROWS_AS(code_categorical({"1", "2"}, spec), Error);
    }
    SUBCASE("ordinal hint spreads codes evenly over 0..9") {
        spec.ordinal_hint = std::vector<std::string>{"low", "mid", "high"};
        const DigitalColumn col = code_categorical({"low", "mid", "high", "low"}, spec);
        CHECK(col.codes == std::vector<int>{0, 5, 9, 0});
    }
    SUBCASE("ordinal hint must cover exactly the observed labels") {
        spec.ordinal_hint = std::vector<std::string>{"low", "high"};
        CHECK_THROWS_AS(code_categorical({"low", "mid"}, spec), Error);
    }
    SUBCASE("anchor rule assigns rounded mean anchor codes") {
        DigitalColumn anchor;
        anchor.codes = {9, 9, 8, 3, 3, 2, 7, 7};
        const DigitalColumn col =
            code_categorical({"a", "a", "a", "b", "b", "b", "c", "c"}, spec, &anchor);
        // means: a -> 26/3 = 8.67 -> 9, b -> 8/3 = 2.67 -> 3, c -> 7
        CHECK(col.codes == std::vector<int>{9, 9, 9, 3, 3, 3, 7, 7});
    }
    SUBCASE("no coding source at all") {
        CHECK_THROWS_AS(code_categorical({"a", "b"}, spec), Error);
    }
    SUBCASE("binary 0/1 defaults to {0->0, 1->5}") {
        FeatureSpec bin;
        bin.name = "flag";
        bin.dtype = FeatureDtype::binary;
        const DigitalColumn col = code_categorical({"0", "1", "1", "0"}, bin);
        CHECK(col.codes == std::vector<int>{0, 5, 5, 0});
    }
    SUBCASE("single-category column codes constant") {
        spec.coding_map = std::map<std::string, int>{{"only", 4}};
        const DigitalColumn col = code_categorical({"only", "only"}, spec);
        CHECK(col.codes == std::vector<int>{4, 4});
    }
}

TEST_CASE("renormalize_matrix wires anchors and propagates errors with feature names") {
    RawTable table;
    table.subjects = {"1", "2", "3", "4", "5", "6"};
    FeatureSpec num;
    num.name = "x";
    num.role = FeatureRole::covariate;
    num.dtype = FeatureDtype::continuous;
    FeatureSpec cat;
    cat.name = "c";
    cat.role = FeatureRole::covariate;
    cat.dtype = FeatureDtype::categorical;
    table.manifest = {num, cat};
    RawColumn xs;
    xs.numbers = {0.0, 0.1, 0.2, 100.0, 100.1, 100.2};
    RawColumn cs;
    cs.labels = {"lo", "lo", "lo", "hi", "hi", "hi"};
    table.columns = {xs, cs};

    const DigitalCodedMatrix coded = renormalize_matrix(table, 10, 4.0);
    // the categorical column anchors to x: lo matches the low codes,
    // hi matches the high ones
    const auto& cx = coded.columns[0].codes;
    const auto& cc = coded.columns[1].codes;
    CHECK(cc[0] == cx[0]);
    CHECK(cc[3] == cx[3]);
    CHECK(cc[0] < cc[3]);

    SUBCASE("one constant continuous column codes to zero") {
        RawTable small;
        small.subjects = {"1", "2"};
        small.manifest = {num};
        RawColumn constant;
        constant.numbers = {3.0, 3.0};
        small.columns = {constant};
        const DigitalCodedMatrix one = renormalize_matrix(small, 10, 4.0);
        CHECK(one.columns[0].codes == std::vector<int>{0, 0});
    }
}
