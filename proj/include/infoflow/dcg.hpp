#pragma once

#include "infoflow/entropy.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace infoflow {

/// One flat clustering: leaf id (original index) -> cluster id. Cluster
/// ids run 0..k-1 left to right along the tree layout.
struct ClusteringComposition {
    std::vector<int> assignment;
    int k = 0;

    std::vector<std::vector<int>> members() const; // cluster id -> leaf ids
    std::vector<int> sizes() const;
};

/// A single agglomerative merge, kept for rendering and export.
struct TreeMerge {
    int left = 0;  // node ids: 0..n-1 leaves, n+t for the t-th merge
    int right = 0;
    double height = 0.0;
};

/// Nested multi-level clustering with an ultrametric induced distance:
/// d(i,j) = height of the first level where i and j share a cluster.
struct UltrametricTree {
    std::vector<int> leaves;                     // layout order, original indices
    std::vector<ClusteringComposition> levels;   // finest -> coarsest
    std::vector<double> merge_heights;           // per level, increasing
    std::vector<TreeMerge> merges;               // full dendrogram

    size_t leaf_count() const { return leaves.size(); }
    double tree_distance(int i, int j) const;
};

struct FeatureGroup {
    std::vector<std::string> members; // tree layout order
    int group_id = 0;
    double max_internal_ce = 0.0;
};

/// Build a multi-scale ultrametric tree from a symmetric nonnegative
/// distance matrix (row-major n x n).
///
/// Average-linkage agglomeration gives the dendrogram; the scale_count
/// largest merge-height gaps select the stored levels (the root level is
/// always present). Leaf layout is the dendrogram order refined by an
/// exact ordering pass that minimizes the sum of adjacent-leaf distances
/// over all orientations consistent with the tree. Deterministic; the
/// seed is accepted for interface stability but unused by this builder.
UltrametricTree build_ultrametric_tree(const std::vector<double>& dist, size_t n,
                                       int scale_count = 4, uint64_t seed = 0);

/// The stored level with exactly k clusters when present, else the
/// finest stored level with <= k clusters.
ClusteringComposition composition_at(const UltrametricTree& tree, int k);

/// The coarsest tree level whose every cluster has max internal
/// mutual_ce <= ce_threshold, as ordered feature groups. Falls back to
/// singletons when no stored level qualifies.
std::vector<FeatureGroup> synergistic_groups(const EntropyMatrix& xi,
                                             const UltrametricTree& tree,
                                             double ce_threshold = 0.5);

/// L1 distance matrix between rows of a code matrix (row-major result).
std::vector<double> l1_row_distances(const std::vector<std::vector<int>>& columns,
                                     size_t n_rows);

} // namespace infoflow
