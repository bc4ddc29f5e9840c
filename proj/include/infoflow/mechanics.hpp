#pragma once

#include "infoflow/dcg.hpp"
#include "infoflow/renorm.hpp"

#include <string>
#include <vector>

namespace infoflow {

/// Data Mechanics output: the seriated matrix plus both marginal trees
/// and the energy it reached.
struct CouplingGeometry {
    std::vector<std::vector<double>> matrix; // seriated, matrix[r][c]
    std::vector<int> row_order;              // original row index per output row
    std::vector<int> col_order;
    UltrametricTree row_tree;                // leaf layout equals row_order
    UltrametricTree col_tree;
    std::vector<double> energy_trace;        // nonincreasing, one per iteration
    int iterations = 0;
    std::vector<std::string> row_ids;
    std::vector<std::string> col_names;
};

struct Block {
    int row_cluster = 0;
    int col_cluster = 0;
    std::vector<std::vector<double>> cells;
    double mean_code = 0.0;
    double code_entropy = 0.0;
};

/// Total variation over the 4-neighborhood lattice: sum of |a-b| over
/// all horizontally and vertically adjacent cell pairs.
double lattice_energy(const std::vector<std::vector<double>>& matrix);

/// Alternate row/column tree building with tree-conditioned distance
/// updates until both leaf orders stabilize (algorithm Step 3).
///
/// Iteration 1 builds the column tree from raw L1 distances; afterwards
/// the distance between two columns is the L1 distance between their
/// per-row-cluster mean vectors at the row tree's finest informative
/// level, and symmetrically for rows. A candidate reordering is adopted
/// only when it does not increase lattice energy, so the energy trace is
/// nonincreasing by construction.
CouplingGeometry data_mechanics(const DigitalCodedMatrix& mat, int max_iter = 10,
                                int scale_count = 4, uint64_t seed = 0);

/// Same, on a bare real matrix (rows x cols).
CouplingGeometry data_mechanics_matrix(const std::vector<std::vector<double>>& matrix,
                                       int max_iter = 10, int scale_count = 4,
                                       uint64_t seed = 0,
                                       const std::vector<std::string>& row_ids = {},
                                       const std::vector<std::string>& col_names = {});

/// Tile the geometry into row_k x col_k blocks at the chosen tree levels
/// (composition_at fallback applies), row-major order.
std::vector<Block> block_partition(const CouplingGeometry& geom, int row_k, int col_k);

} // namespace infoflow
