#pragma once

#include "infoflow/flow.hpp"
#include "infoflow/mechanics.hpp"
#include "infoflow/renorm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace infoflow {

/// Fixed deterministic palette: a 10-step sequential ramp for digital
/// codes and a 12-color qualitative set for cluster labels.
struct Palette {
    std::vector<std::string> code_colors;
    std::vector<std::string> label_colors;

    static Palette standard();
    std::string code_color(double code, double code_max) const;
    std::string label_color(int label) const;
};

/// Standalone SVG of a possibly-gapped histogram: bins as bars over
/// their true x-extents, optionally stacked by per-bin label counts;
/// gaps stay visibly empty.
void render_histogram(const PossiblyGappedHistogram& hist,
                      const std::optional<std::vector<std::vector<int>>>& group_counts,
                      const std::string& out_path);

std::string render_histogram_svg(const PossiblyGappedHistogram& hist,
                                 const std::optional<std::vector<std::vector<int>>>& group_counts);

/// Heatmap in seriated order with marginal dendrograms, cluster
/// boundaries at the chosen levels, and an optional per-row label strip.
void render_geometry(const CouplingGeometry& geom, int row_k, int col_k,
                     const std::optional<std::vector<int>>& row_labels,
                     const std::string& out_path);

std::string render_geometry_svg(const CouplingGeometry& geom, int row_k, int col_k,
                                const std::optional<std::vector<int>>& row_labels);

/// Multi-panel figure: response tree panel on the left, one annotated
/// stage heatmap per serial stage, mispredicted subject ids beside each
/// stage.
void render_flow(const InformationFlow& flow, const std::string& out_path);

std::string render_flow_svg(const InformationFlow& flow);

} // namespace infoflow
