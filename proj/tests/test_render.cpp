#include "infoflow/render.hpp"

#include "infoflow/error.hpp"
#include "infoflow/mechanics.hpp"

#include <doctest.h>

#include <random>
#include <stack>

using namespace infoflow;

namespace {

// minimal well-formedness audit: tags balance and nest properly
bool well_formed_xml(const std::string& svg) {
    std::stack<std::string> open;
    size_t i = 0;
    while ((i = svg.find('<', i)) != std::string::npos) {
        const size_t end = svg.find('>', i);
        if (end == std::string::npos) return false;
        std::string tag = svg.substr(i + 1, end - i - 1);
        i = end + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') continue;
        const bool closing = tag[0] == '/';
        const bool self_closing = tag.back() == '/';
        std::string name = tag.substr(closing ? 1 : 0);
        const size_t sp = name.find_first_of(" \t\n");
        if (sp != std::string::npos) name = name.substr(0, sp);
        if (!closing && name.back() == '/') name.pop_back();
        if (closing) {
            if (open.empty() || open.top() != name) return false;
            open.pop();
        } else if (!self_closing) {
            open.push(name);
        }
    }
    return open.empty();
}

PossiblyGappedHistogram sample_hist() {
    PossiblyGappedHistogram hist;
    hist.bins = {{0.0, 1.0, 5}, {1.2, 2.0, 3}, {6.0, 7.0, 2}};
    hist.gaps = {{2.0, 6.0}};
    hist.source_n = 10;
    return hist;
}

} // namespace

TEST_CASE("histogram SVG is well formed, deterministic, and honors contracts") {
    const PossiblyGappedHistogram hist = sample_hist();
    const std::string svg = render_histogram_svg(hist, std::nullopt);
    CHECK(well_formed_xml(svg));
    CHECK(svg == render_histogram_svg(hist, std::nullopt)); // byte identical

    SUBCASE("stacked group counts must sum to the bin counts") {
        std::vector<std::vector<int>> good{{3, 2}, {1, 2}, {0, 2}};
        const std::string stacked = render_histogram_svg(hist, good);
        CHECK(well_formed_xml(stacked));
        std::vector<std::vector<int>> bad{{3, 3}, {1, 2}, {0, 2}};
        CHECK_THROWS_AS(render_histogram_svg(hist, bad), Error);
    }
    SUBCASE("single bin, no groups") {
        PossiblyGappedHistogram one;
        one.bins = {{0.0, 1.0, 4}};
        one.source_n = 4;
        CHECK(well_formed_xml(render_histogram_svg(one, std::nullopt)));
    }
}

TEST_CASE("geometry SVG for matrices from tiny to planted") {
    SUBCASE("1x1 padding case via a 2x1 matrix") {
        // the smallest matrix data mechanics accepts
        const CouplingGeometry geom = data_mechanics_matrix({{1.0}, {2.0}}, 5, 2, 0);
        const std::string svg = render_geometry_svg(geom, 1, 1, std::nullopt);
        CHECK(well_formed_xml(svg));
    }
    SUBCASE("planted blocks render four uniform rectangles") {
        std::vector<std::vector<double>> m;
        for (int r = 0; r < 4; ++r) {
            std::vector<double> row;
            for (int c = 0; c < 4; ++c) row.push_back(r < 2 == c < 2 ? 0.0 : 9.0);
            m.push_back(row);
        }
        const CouplingGeometry geom = data_mechanics_matrix(m, 5, 3, 0);
        const std::vector<Block> blocks = block_partition(geom, 2, 2);
        for (const auto& block : blocks) CHECK(block.code_entropy == doctest::Approx(0.0));

        std::vector<int> labels{0, 0, 1, 1};
        const std::string svg = render_geometry_svg(geom, 2, 2, labels);
        CHECK(well_formed_xml(svg));
        CHECK(svg == render_geometry_svg(geom, 2, 2, labels));
        // exactly the two block fills appear in the heatmap cells
        CHECK(svg.find("#f7fbff") != std::string::npos);
        CHECK(svg.find("#041c42") != std::string::npos);
    }
    SUBCASE("k beyond the matrix is rejected") {
        const CouplingGeometry geom = data_mechanics_matrix({{1.0}, {2.0}}, 5, 2, 0);
        CHECK_THROWS_AS(render_geometry_svg(geom, 5, 1, std::nullopt), Error);
    }
}

TEST_CASE("flow SVG carries annotations") {
    // two clusters, one exclusive: its annotation must read H=0.00
    ClusteringComposition resp;
    resp.assignment = {0, 0, 0, 1, 1, 1};
    resp.k = 2;
    UltrametricTree resp_tree;
    resp_tree.leaves = {0, 1, 2, 3, 4, 5};
    resp_tree.levels.push_back(resp);
    resp_tree.merge_heights.push_back(0.5);
    ClusteringComposition root;
    root.assignment.assign(6, 0);
    root.k = 1;
    resp_tree.levels.push_back(root);
    resp_tree.merge_heights.push_back(1.0);

    std::vector<std::vector<double>> m{{0}, {0}, {1}, {8}, {9}, {9}};
    SerialStageInput stage;
    stage.group.group_id = 1;
    stage.geometry = data_mechanics_matrix(m, 5, 3, 0);
    stage.cov_k = 2;
    const InformationFlow flow = serial_flow(resp_tree, 2, {stage}, LogBase::natural, 49, 11);

    const std::string svg = render_flow_svg(flow);
    CHECK(well_formed_xml(svg));
    CHECK(svg == render_flow_svg(flow));
    CHECK(svg.find("H=0.00") != std::string::npos);
    CHECK(svg.find(" p=") != std::string::npos);
    CHECK(svg.find("missed:") != std::string::npos);
    CHECK(svg.find("flow error=") != std::string::npos);
}
