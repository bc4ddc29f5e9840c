#include "infoflow/mechanics.hpp"

#include "infoflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace infoflow {

namespace {

// Finest stored level that actually separates anything; the root level
// only as a last resort.
const ClusteringComposition& finest_informative(const UltrametricTree& tree) {
    for (const auto& level : tree.levels)
        if (level.k >= 2) return level;
    return tree.levels.front();
}

// Raw L1 distances between columns.
std::vector<double> raw_col_distances(const std::vector<std::vector<double>>& m) {
    const size_t rows = m.size(), cols = m[0].size();
    std::vector<double> d(cols * cols, 0.0);
    for (size_t a = 0; a < cols; ++a) {
        for (size_t b = a + 1; b < cols; ++b) {
            double acc = 0.0;
            for (size_t r = 0; r < rows; ++r) acc += std::abs(m[r][a] - m[r][b]);
            d[a * cols + b] = acc;
            d[b * cols + a] = acc;
        }
    }
    return d;
}

// Distance between columns given a clustering of the rows: L1 between
// the columns' vectors of per-row-cluster means.
std::vector<double> conditioned_col_distances(const std::vector<std::vector<double>>& m,
                                              const ClusteringComposition& row_comp) {
    const size_t rows = m.size(), cols = m[0].size();
    const size_t k = static_cast<size_t>(row_comp.k);
    std::vector<double> profile(cols * k, 0.0);
    std::vector<long> cluster_size(k, 0);
    for (size_t r = 0; r < rows; ++r) cluster_size[static_cast<size_t>(row_comp.assignment[r])]++;
    for (size_t r = 0; r < rows; ++r) {
        const auto c = static_cast<size_t>(row_comp.assignment[r]);
        for (size_t j = 0; j < cols; ++j) profile[j * k + c] += m[r][j];
    }
    for (size_t j = 0; j < cols; ++j)
        for (size_t c = 0; c < k; ++c) profile[j * k + c] /= static_cast<double>(cluster_size[c]);

    std::vector<double> d(cols * cols, 0.0);
    for (size_t a = 0; a < cols; ++a) {
        for (size_t b = a + 1; b < cols; ++b) {
            double acc = 0.0;
            for (size_t c = 0; c < k; ++c) acc += std::abs(profile[a * k + c] - profile[b * k + c]);
            d[a * cols + b] = acc;
            d[b * cols + a] = acc;
        }
    }
    return d;
}

std::vector<std::vector<double>> transpose(const std::vector<std::vector<double>>& m) {
    std::vector<std::vector<double>> t(m[0].size(), std::vector<double>(m.size()));
    for (size_t r = 0; r < m.size(); ++r)
        for (size_t c = 0; c < m[r].size(); ++c) t[c][r] = m[r][c];
    return t;
}

std::vector<std::vector<double>> reorder(const std::vector<std::vector<double>>& m,
                                         const std::vector<int>& row_order,
                                         const std::vector<int>& col_order) {
    std::vector<std::vector<double>> out(row_order.size(),
                                         std::vector<double>(col_order.size()));
    for (size_t r = 0; r < row_order.size(); ++r)
        for (size_t c = 0; c < col_order.size(); ++c)
            out[r][c] = m[static_cast<size_t>(row_order[r])][static_cast<size_t>(col_order[c])];
    return out;
}

double entropy_of_values(const std::vector<double>& values) {
    std::map<double, long> counts;
    for (double v : values) counts[v]++;
    double h = 0.0;
    const double n = static_cast<double>(values.size());
    for (const auto& [v, c] : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h < 0.0 ? 0.0 : h;
}

} // namespace

double lattice_energy(const std::vector<std::vector<double>>& matrix) {
    if (matrix.empty() || matrix[0].empty()) raise(ErrorKind::EmptyInput, "energy of empty matrix");
    double e = 0.0;
    const size_t rows = matrix.size(), cols = matrix[0].size();
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c + 1 < cols; ++c) e += std::abs(matrix[r][c] - matrix[r][c + 1]);
    for (size_t r = 0; r + 1 < rows; ++r)
        for (size_t c = 0; c < cols; ++c) e += std::abs(matrix[r][c] - matrix[r + 1][c]);
    return e;
}

CouplingGeometry data_mechanics_matrix(const std::vector<std::vector<double>>& matrix,
                                       int max_iter, int scale_count, uint64_t seed,
                                       const std::vector<std::string>& row_ids,
                                       const std::vector<std::string>& col_names) {
    const size_t rows = matrix.size();
    if (rows < 2) raise(ErrorKind::DimensionTooSmall, "data mechanics needs at least 2 rows");
    const size_t cols = matrix[0].size();
    if (cols < 1) raise(ErrorKind::DimensionTooSmall, "data mechanics needs at least 1 column");
    for (const auto& row : matrix)
        if (row.size() != cols) raise(ErrorKind::LengthMismatch, "ragged input matrix");
    if (max_iter < 1) raise(ErrorKind::ConfigError, "max_iter must be >= 1");

    const auto transposed = transpose(matrix);

    CouplingGeometry geom;
    geom.row_ids = row_ids;
    geom.col_names = col_names;

    UltrametricTree row_tree, col_tree;
    std::vector<int> row_order, col_order;
    double energy = 0.0;
    bool have_state = false;

    for (int it = 1; it <= max_iter; ++it) {
        // (a) column tree: raw distances first time, row-conditioned after
        std::vector<double> cd = have_state
                                     ? conditioned_col_distances(matrix, finest_informative(row_tree))
                                     : raw_col_distances(matrix);
        UltrametricTree new_col = build_ultrametric_tree(cd, cols, scale_count, seed);
        // (b) row tree conditioned on the fresh column tree
        std::vector<double> rd = conditioned_col_distances(transposed, finest_informative(new_col));
        UltrametricTree new_row = build_ultrametric_tree(rd, rows, scale_count, seed);

        const double new_energy = lattice_energy(reorder(matrix, new_row.leaves, new_col.leaves));
        if (have_state) {
            if (new_row.leaves == row_order && new_col.leaves == col_order) break; // stable
            if (new_energy > energy) break; // never adopt a worse arrangement
        }
        row_tree = std::move(new_row);
        col_tree = std::move(new_col);
        row_order = row_tree.leaves;
        col_order = col_tree.leaves;
        energy = new_energy;
        geom.energy_trace.push_back(energy);
        geom.iterations = it;
        have_state = true;
    }

    geom.row_tree = std::move(row_tree);
    geom.col_tree = std::move(col_tree);
    geom.row_order = std::move(row_order);
    geom.col_order = std::move(col_order);
    geom.matrix = reorder(matrix, geom.row_order, geom.col_order);
    return geom;
}

CouplingGeometry data_mechanics(const DigitalCodedMatrix& mat, int max_iter, int scale_count,
                                uint64_t seed) {
    std::vector<std::vector<double>> m(mat.n(), std::vector<double>(mat.m()));
    for (size_t r = 0; r < mat.n(); ++r)
        for (size_t c = 0; c < mat.m(); ++c)
            m[r][c] = static_cast<double>(mat.columns[c].codes[r]);
    return data_mechanics_matrix(m, max_iter, scale_count, seed, mat.subjects,
                                 mat.feature_names());
}

std::vector<Block> block_partition(const CouplingGeometry& geom, int row_k, int col_k) {
    const ClusteringComposition row_comp = composition_at(geom.row_tree, row_k);
    const ClusteringComposition col_comp = composition_at(geom.col_tree, col_k);

    std::vector<Block> blocks;
    blocks.reserve(static_cast<size_t>(row_comp.k) * static_cast<size_t>(col_comp.k));
    for (int rc = 0; rc < row_comp.k; ++rc) {
        for (int cc = 0; cc < col_comp.k; ++cc) {
            Block block;
            block.row_cluster = rc;
            block.col_cluster = cc;
            std::vector<double> flat;
            for (size_t r = 0; r < geom.row_order.size(); ++r) {
                const int orig_row = geom.row_order[r];
                if (row_comp.assignment[static_cast<size_t>(orig_row)] != rc) continue;
                std::vector<double> brow;
                for (size_t c = 0; c < geom.col_order.size(); ++c) {
                    const int orig_col = geom.col_order[c];
                    if (col_comp.assignment[static_cast<size_t>(orig_col)] != cc) continue;
                    brow.push_back(geom.matrix[r][c]);
                    flat.push_back(geom.matrix[r][c]);
                }
                block.cells.push_back(std::move(brow));
            }
            double sum = 0.0;
            for (double v : flat) sum += v;
            block.mean_code = flat.empty() ? 0.0 : sum / static_cast<double>(flat.size());
            block.code_entropy = flat.empty() ? 0.0 : entropy_of_values(flat);
            blocks.push_back(std::move(block));
        }
    }
    return blocks;
}

} // namespace infoflow
