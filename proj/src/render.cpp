#include "infoflow/render.hpp"

#include "infoflow/error.hpp"
#include "infoflow/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace infoflow {

namespace {

// fixed 6-decimal formatting keeps goldens byte-stable
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

struct Svg {
    std::ostringstream body;
    double width = 0, height = 0;

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& extra = "") {
        body << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
             << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"" << extra << "/>\n";
    }
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0) {
        body << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
             << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
             << fmt(stroke_width) << "\"/>\n";
    }
    void text(double x, double y, const std::string& content, double size = 10.0,
              const std::string& fill = "#000000") {
        body << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"monospace\" "
             << "font-size=\"" << fmt(size) << "\" fill=\"" << fill << "\">" << escape(content)
             << "</text>\n";
    }
    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
                case '&': out += "&amp;"; break;
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                default: out += c;
            }
        }
        return out;
    }
    std::string finish() const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
            << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' '
            << fmt(height) << "\">\n"
            << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
            << "\" fill=\"#ffffff\"/>\n"
            << body.str() << "</svg>\n";
        return out.str();
    }
};

// x positions of every dendrogram node over a unit-spaced leaf layout
std::vector<double> node_positions(const UltrametricTree& tree) {
    const size_t n = tree.leaf_count();
    std::vector<double> pos(n + tree.merges.size(), 0.0);
    for (size_t i = 0; i < n; ++i) {
        const auto it = std::find(tree.leaves.begin(), tree.leaves.end(), static_cast<int>(i));
        pos[i] = static_cast<double>(it - tree.leaves.begin()) + 0.5;
    }
    for (size_t t = 0; t < tree.merges.size(); ++t)
        pos[n + t] = 0.5 * (pos[static_cast<size_t>(tree.merges[t].left)] +
                            pos[static_cast<size_t>(tree.merges[t].right)]);
    return pos;
}

// Draw a dendrogram into the box (x0,y0,w,h); horizontal=true puts
// leaves along the x axis with the root at the top.
void draw_dendrogram(Svg& svg, const UltrametricTree& tree, double x0, double y0, double w,
                     double h, bool leaves_on_x, double cell) {
    if (tree.merges.empty()) return;
    const std::vector<double> pos = node_positions(tree);
    double max_h = 0.0;
    for (const auto& m : tree.merges) max_h = std::max(max_h, m.height);
    if (max_h <= 0.0) max_h = 1.0;
    const size_t n = tree.leaf_count();
    std::vector<double> node_height(n + tree.merges.size(), 0.0);
    auto scale_h = [&](double height) { return height / max_h; };
    for (size_t t = 0; t < tree.merges.size(); ++t) {
        const auto& m = tree.merges[t];
        const double hl = node_height[static_cast<size_t>(m.left)];
        const double hr = node_height[static_cast<size_t>(m.right)];
        const double hm = scale_h(m.height);
        node_height[n + t] = hm;
        const double pl = pos[static_cast<size_t>(m.left)] * cell;
        const double pr = pos[static_cast<size_t>(m.right)] * cell;
        if (leaves_on_x) {
            // heights grow upward from the leaf line at y0 + h
            const double yl = y0 + h * (1.0 - hl);
            const double yr = y0 + h * (1.0 - hr);
            const double ym = y0 + h * (1.0 - hm);
            svg.line(x0 + pl, yl, x0 + pl, ym, "#444444", 0.8);
            svg.line(x0 + pr, yr, x0 + pr, ym, "#444444", 0.8);
            svg.line(x0 + pl, ym, x0 + pr, ym, "#444444", 0.8);
        } else {
            const double xl = x0 + w * (1.0 - hl);
            const double xr = x0 + w * (1.0 - hr);
            const double xm = x0 + w * (1.0 - hm);
            svg.line(xl, y0 + pl, xm, y0 + pl, "#444444", 0.8);
            svg.line(xr, y0 + pr, xm, y0 + pr, "#444444", 0.8);
            svg.line(xm, y0 + pl, xm, y0 + pr, "#444444", 0.8);
        }
    }
}

double matrix_max(const std::vector<std::vector<double>>& m) {
    double v = 0.0;
    for (const auto& row : m)
        for (double x : row) v = std::max(v, x);
    return v;
}

// cluster boundaries (after which layout position a new cluster starts)
std::vector<size_t> cluster_breaks(const UltrametricTree& tree, int k) {
    const ClusteringComposition comp = composition_at(tree, k);
    std::vector<size_t> breaks;
    for (size_t i = 0; i + 1 < tree.leaves.size(); ++i) {
        if (comp.assignment[static_cast<size_t>(tree.leaves[i])] !=
            comp.assignment[static_cast<size_t>(tree.leaves[i + 1])])
            breaks.push_back(i + 1);
    }
    return breaks;
}

void draw_heatmap(Svg& svg, const CouplingGeometry& geom, double x0, double y0, double cell,
                  const Palette& pal, int row_k, int col_k,
                  const std::optional<std::vector<int>>& row_labels) {
    const size_t rows = geom.matrix.size();
    const size_t cols = geom.matrix.empty() ? 0 : geom.matrix[0].size();
    const double cmax = matrix_max(geom.matrix);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            svg.rect(x0 + static_cast<double>(c) * cell, y0 + static_cast<double>(r) * cell, cell,
                     cell, pal.code_color(geom.matrix[r][c], cmax));
    if (row_labels) {
        for (size_t r = 0; r < rows; ++r) {
            const int label = (*row_labels)[static_cast<size_t>(geom.row_order[r])];
            svg.rect(x0 - cell * 1.4, y0 + static_cast<double>(r) * cell, cell, cell,
                     pal.label_color(label));
        }
    }
    const double w = static_cast<double>(cols) * cell;
    const double h = static_cast<double>(rows) * cell;
    if (row_k > 1 && row_k <= static_cast<int>(rows))
        for (size_t b : cluster_breaks(geom.row_tree, row_k))
            svg.line(x0, y0 + static_cast<double>(b) * cell, x0 + w,
                     y0 + static_cast<double>(b) * cell, "#000000", 1.2);
    if (col_k > 1 && col_k <= static_cast<int>(cols))
        for (size_t b : cluster_breaks(geom.col_tree, col_k))
            svg.line(x0 + static_cast<double>(b) * cell, y0, x0 + static_cast<double>(b) * cell,
                     y0 + h, "#000000", 1.2);
}

} // namespace

Palette Palette::standard() {
    Palette pal;
    pal.code_colors = {"#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6",
                       "#4292c6", "#2171b5", "#08519c", "#08306b", "#041c42"};
    pal.label_colors = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628",
                        "#f781bf", "#999999", "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3"};
    return pal;
}

std::string Palette::code_color(double code, double code_max) const {
    if (code_max <= 0.0) return code_colors.front();
    double t = code / code_max;
    t = std::clamp(t, 0.0, 1.0);
    const auto idx = static_cast<size_t>(
        std::llround(t * static_cast<double>(code_colors.size() - 1)));
    return code_colors[idx];
}

std::string Palette::label_color(int label) const {
    if (label < 0) return "#000000";
    return label_colors[static_cast<size_t>(label) % label_colors.size()];
}

std::string render_histogram_svg(
    const PossiblyGappedHistogram& hist,
    const std::optional<std::vector<std::vector<int>>>& group_counts) {
    if (hist.bins.empty()) raise(ErrorKind::EmptyInput, "histogram with no bins");
    if (group_counts) {
        if (group_counts->size() != hist.bins.size())
            raise(ErrorKind::LengthMismatch, "group_counts rows do not match bin count");
        for (size_t b = 0; b < hist.bins.size(); ++b) {
            long sum = 0;
            for (int c : (*group_counts)[b]) sum += c;
            if (sum != hist.bins[b].count)
                raise(ErrorKind::ConfigError,
                      "group_counts of bin " + std::to_string(b) + " do not sum to its count");
        }
    }

    const double lo = hist.bins.front().lo;
    const double hi = hist.bins.back().hi;
    const double span = hi > lo ? hi - lo : 1.0;
    long max_count = 1;
    for (const auto& b : hist.bins) max_count = std::max(max_count, b.count);

    Svg svg;
    const double plot_w = 560, plot_h = 320, margin = 40;
    svg.width = plot_w + 2 * margin;
    svg.height = plot_h + 2 * margin;
    const Palette pal = Palette::standard();

    auto x_of = [&](double v) { return margin + (v - lo) / span * plot_w; };
    auto h_of = [&](long count) {
        return static_cast<double>(count) / static_cast<double>(max_count) * plot_h;
    };

    svg.line(margin, margin + plot_h, margin + plot_w, margin + plot_h, "#000000", 1.0);
    for (size_t b = 0; b < hist.bins.size(); ++b) {
        const auto& bin = hist.bins[b];
        const double x = x_of(bin.lo);
        const double w = x_of(bin.hi) - x;
        if (group_counts) {
            double y = margin + plot_h;
            for (size_t g = 0; g < (*group_counts)[b].size(); ++g) {
                const double hh = h_of((*group_counts)[b][static_cast<size_t>(g)]);
                y -= hh;
                svg.rect(x, y, w, hh, pal.label_color(static_cast<int>(g)),
                         " stroke=\"#ffffff\" stroke-width=\"0.4\"");
            }
        } else {
            const double hh = h_of(bin.count);
            svg.rect(x, margin + plot_h - hh, w, hh, pal.code_colors[5],
                     " stroke=\"#ffffff\" stroke-width=\"0.4\"");
        }
        svg.text(x, margin + plot_h + 14.0, std::to_string(b), 9.0);
    }
    for (const auto& gap : hist.gaps) {
        const double x = x_of(gap.lo);
        svg.rect(x, margin, x_of(gap.hi) - x, plot_h, "none",
                 " stroke=\"#bbbbbb\" stroke-width=\"0.5\" stroke-dasharray=\"3,3\"");
    }
    svg.text(margin, margin - 8.0, "bins=" + std::to_string(hist.bins.size()) +
                                       " gaps=" + std::to_string(hist.gaps.size()) +
                                       " n=" + std::to_string(hist.source_n),
             10.0);
    return svg.finish();
}

void render_histogram(const PossiblyGappedHistogram& hist,
                      const std::optional<std::vector<std::vector<int>>>& group_counts,
                      const std::string& out_path) {
    write_file_atomic(out_path, render_histogram_svg(hist, group_counts));
}

std::string render_geometry_svg(const CouplingGeometry& geom, int row_k, int col_k,
                                const std::optional<std::vector<int>>& row_labels) {
    const size_t rows = geom.matrix.size();
    const size_t cols = geom.matrix.empty() ? 0 : geom.matrix[0].size();
    if (rows == 0 || cols == 0) raise(ErrorKind::EmptyInput, "geometry with empty matrix");
    if (row_k > static_cast<int>(rows) || col_k > static_cast<int>(cols))
        raise(ErrorKind::KTooLarge, "cluster level exceeds matrix dimensions");

    const double cell = std::clamp(360.0 / static_cast<double>(std::max(rows, cols)), 2.0, 24.0);
    const double dendro = 60.0, margin = 24.0, strip = row_labels ? cell * 1.6 : 0.0;

    Svg svg;
    svg.width = margin * 2 + dendro + strip + static_cast<double>(cols) * cell;
    svg.height = margin * 2 + dendro + static_cast<double>(rows) * cell + 16.0;
    const double hx = margin + dendro + strip;
    const double hy = margin + dendro;

    const Palette pal = Palette::standard();
    draw_dendrogram(svg, geom.col_tree, hx, margin, static_cast<double>(cols) * cell,
                    dendro - 4.0, true, cell);
    draw_dendrogram(svg, geom.row_tree, margin, hy, dendro - 4.0,
                    static_cast<double>(rows) * cell, false, cell);
    draw_heatmap(svg, geom, hx, hy, cell, pal, row_k, col_k, row_labels);
    svg.text(margin, svg.height - margin + 10.0,
             "energy=" + fmt(geom.energy_trace.empty() ? 0.0 : geom.energy_trace.back()) +
                 " iterations=" + std::to_string(geom.iterations),
             9.0);
    return svg.finish();
}

void render_geometry(const CouplingGeometry& geom, int row_k, int col_k,
                     const std::optional<std::vector<int>>& row_labels,
                     const std::string& out_path) {
    write_file_atomic(out_path, render_geometry_svg(geom, row_k, col_k, row_labels));
}

std::string render_flow_svg(const InformationFlow& flow) {
    if (flow.stages.empty()) raise(ErrorKind::EmptyStages, "flow with no stages");
    const size_t n = flow.response_comp.assignment.size();

    const double cell = std::clamp(300.0 / static_cast<double>(n), 1.6, 16.0);
    const double margin = 24.0, tree_w = 70.0, panel_gap = 46.0, anno_w = 120.0;
    const Palette pal = Palette::standard();

    double panel_x = margin + tree_w + 18.0 + panel_gap;
    std::vector<double> panel_xs;
    for (const auto& stage : flow.stages) {
        panel_xs.push_back(panel_x);
        const size_t cols = stage.geometry.col_order.size();
        panel_x += static_cast<double>(cols) * cell + anno_w + panel_gap;
    }

    Svg svg;
    svg.width = panel_x + margin;
    svg.height = margin * 2 + 40.0 + static_cast<double>(n) * cell + 30.0;
    const double hy = margin + 40.0;

    // left panel: response tree plus its cluster color strip
    draw_dendrogram(svg, flow.response_tree, margin, hy, tree_w, static_cast<double>(n) * cell,
                    false, cell);
    for (size_t r = 0; r < n; ++r) {
        const int orig = flow.response_tree.leaves[r];
        svg.rect(margin + tree_w + 4.0, hy + static_cast<double>(r) * cell, cell * 1.2, cell,
                 pal.label_color(flow.response_comp.assignment[static_cast<size_t>(orig)]));
    }
    svg.text(margin, hy - 10.0, "response k=" + std::to_string(flow.response_comp.k), 10.0);

    for (size_t s = 0; s < flow.stages.size(); ++s) {
        const auto& stage = flow.stages[s];
        const double x0 = panel_xs[s];
        std::vector<int> strip(n, 0);
        for (size_t i = 0; i < n; ++i) strip[i] = flow.response_comp.assignment[i];
        draw_heatmap(svg, stage.geometry, x0, hy, cell, pal, stage.cov_k, 1,
                     std::optional<std::vector<int>>(strip));
        svg.text(x0, hy - 10.0,
                 "stage " + std::to_string(s + 1) + " group#" + std::to_string(stage.group.group_id) +
                     " w=" + fmt(flow.stage_weights[s]),
                 9.0);
        // per-cluster entropy and p-value, in layout order down the panel
        const auto& cov = stage.report.covariate_comp;
        const double ax = x0 + static_cast<double>(stage.geometry.col_order.size()) * cell + 8.0;
        std::vector<double> cluster_top(static_cast<size_t>(cov.k), 1e30);
        for (size_t r = 0; r < n; ++r) {
            const int orig = stage.geometry.row_order[r];
            const auto c = static_cast<size_t>(cov.assignment[static_cast<size_t>(orig)]);
            cluster_top[c] = std::min(cluster_top[c], hy + static_cast<double>(r) * cell);
        }
        for (size_t c = 0; c < cluster_top.size(); ++c) {
            const auto& pc = stage.report.per_cluster[c];
            std::string label = "H=" + fmt(pc.cond_entropy).substr(0, 4);
            if (pc.p_value) label += " p=" + fmt(*pc.p_value).substr(0, 5);
            svg.text(ax, cluster_top[c] + 9.0, label, 8.0);
        }
        // mispredicted subject ids for this stage's majority vote
        std::string missed;
        for (size_t i = 0; i < n; ++i)
            if (flow.stage_votes[s][i] != flow.response_comp.assignment[i])
                missed += (missed.empty() ? "" : ",") + flow.subjects[i];
        svg.text(x0, hy + static_cast<double>(n) * cell + 14.0,
                 "missed: " + (missed.empty() ? "-" : missed), 7.0);
    }
    svg.text(margin, svg.height - 8.0, "flow error=" + fmt(flow.error_rate), 9.0);
    return svg.finish();
}

void render_flow(const InformationFlow& flow, const std::string& out_path) {
    write_file_atomic(out_path, render_flow_svg(flow));
}

} // namespace infoflow
