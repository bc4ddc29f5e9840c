#pragma once

#include <span>
#include <string>
#include <vector>

namespace infoflow {

enum class LogBase { natural, two };

/// Combinatorial (counting-based) information measures over categorical
/// label vectors. Labels are arbitrary small integers; only equality
/// matters, never order or magnitude.

/// H(X) = -sum_k p_k log p_k with empirical proportions, 0*log 0 = 0.
double shannon_entropy(std::span<const int> x, LogBase base = LogBase::natural);

/// H(Y|X) = sum_k p_k H(Y | X = k) over the empirical joint table.
double conditional_entropy(std::span<const int> y, std::span<const int> x,
                           LogBase base = LogBase::natural);

/// E[Y -> X] = H(Y) - H(Y|X), the information X conveys about Y.
double information_gain(std::span<const int> y, std::span<const int> x,
                        LogBase base = LogBase::natural);

/// E[Y => X] = H(Y|X) / H(Y) in [0,1]; 0 when H(Y) = 0 (nothing left to
/// explain). Base-invariant.
double directed_nce(std::span<const int> y, std::span<const int> x,
                    LogBase base = LogBase::natural);

/// E[Y <=> X] = (E[Y => X] + E[X => Y]) / 2, symmetric, in [0,1].
/// 0 = mutually determined, 1 = mutually uninformative.
double mutual_ce(std::span<const int> y, std::span<const int> x,
                 LogBase base = LogBase::natural);

/// m x m matrix of pairwise mutual conditional entropies with zero diagonal.
struct EntropyMatrix {
    int m = 0;
    std::vector<double> values; // row-major m*m, symmetric
    std::vector<std::string> feature_names;
    LogBase log_base = LogBase::natural;

    double at(int i, int j) const { return values[static_cast<size_t>(i) * m + j]; }
    double& at(int i, int j) { return values[static_cast<size_t>(i) * m + j]; }
};

EntropyMatrix entropy_matrix(const std::vector<std::vector<int>>& columns,
                             const std::vector<std::string>& names,
                             LogBase base = LogBase::natural);

const char* to_string(LogBase base);
LogBase log_base_from_string(const std::string& name);

} // namespace infoflow
