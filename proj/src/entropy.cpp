#include "infoflow/entropy.hpp"

#include "infoflow/error.hpp"

#include <cmath>
#include <unordered_map>

namespace infoflow {

namespace {

double log_scale(LogBase base) {
    return base == LogBase::two ? 1.0 / std::log(2.0) : 1.0;
}

// Entropy of a count vector, natural log; 0*log 0 contributes nothing.
double entropy_of_counts(const std::unordered_map<int, long>& counts, long total) {
    if (total <= 0) return 0.0;
    double h = 0.0;
    for (const auto& [label, c] : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    return h < 0.0 ? 0.0 : h;
}

void require_same_length(std::span<const int> y, std::span<const int> x) {
    if (y.size() != x.size())
        raise(ErrorKind::LengthMismatch,
              "label vectors differ in length (" + std::to_string(y.size()) + " vs " +
                  std::to_string(x.size()) + ")");
}

} // namespace

double shannon_entropy(std::span<const int> x, LogBase base) {
    if (x.empty()) raise(ErrorKind::EmptyInput, "shannon_entropy on empty vector");
    std::unordered_map<int, long> counts;
    for (int v : x) counts[v]++;
    return entropy_of_counts(counts, static_cast<long>(x.size())) * log_scale(base);
}

double conditional_entropy(std::span<const int> y, std::span<const int> x, LogBase base) {
    require_same_length(y, x);
    if (y.empty()) raise(ErrorKind::EmptyInput, "conditional_entropy on empty vectors");
    // group y by x value, H(Y|X) = sum_k p_k H(Y | X = k)
    std::unordered_map<int, std::unordered_map<int, long>> table;
    std::unordered_map<int, long> x_counts;
    for (size_t i = 0; i < x.size(); ++i) {
        table[x[i]][y[i]]++;
        x_counts[x[i]]++;
    }
    const auto n = static_cast<double>(x.size());
    double h = 0.0;
    for (const auto& [xv, ycounts] : table) {
        const long nk = x_counts[xv];
        h += (nk / n) * entropy_of_counts(ycounts, nk);
    }
    return h * log_scale(base);
}

double information_gain(std::span<const int> y, std::span<const int> x, LogBase base) {
    const double gain = shannon_entropy(y, base) - conditional_entropy(y, x, base);
    return gain < 0.0 ? 0.0 : gain;
}

double directed_nce(std::span<const int> y, std::span<const int> x, LogBase base) {
    require_same_length(y, x);
    const double hy = shannon_entropy(y, base);
    if (hy == 0.0) return 0.0; // Y already determined, nothing to explain
    double r = conditional_entropy(y, x, base) / hy;
    if (r < 0.0) r = 0.0;
    if (r > 1.0) r = 1.0;
    return r;
}

double mutual_ce(std::span<const int> y, std::span<const int> x, LogBase base) {
    return 0.5 * (directed_nce(y, x, base) + directed_nce(x, y, base));
}

EntropyMatrix entropy_matrix(const std::vector<std::vector<int>>& columns,
                             const std::vector<std::string>& names, LogBase base) {
    if (columns.empty()) raise(ErrorKind::EmptyInput, "entropy_matrix over empty feature subset");
    EntropyMatrix xi;
    xi.m = static_cast<int>(columns.size());
    xi.feature_names = names;
    xi.log_base = base;
    xi.values.assign(static_cast<size_t>(xi.m) * xi.m, 0.0);
    for (int i = 0; i < xi.m; ++i) {
        for (int j = i + 1; j < xi.m; ++j) {
            const double v = mutual_ce(columns[i], columns[j], base);
            xi.at(i, j) = v;
            xi.at(j, i) = v;
        }
    }
    return xi;
}

const char* to_string(LogBase base) {
    return base == LogBase::two ? "two" : "natural";
}

LogBase log_base_from_string(const std::string& name) {
    if (name == "two" || name == "2" || name == "log2") return LogBase::two;
    if (name == "natural" || name == "e" || name == "ln") return LogBase::natural;
    raise(ErrorKind::ConfigError, "unknown log base '" + name + "'");
}

} // namespace infoflow
