#pragma once

#include "infoflow/dcg.hpp"

#include <vector>

namespace infoflow {

struct LogisticFit {
    std::vector<double> beta; // intercept first
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0.0;
};

/// Newton-Raphson MLE for logistic regression with step-halving. The
/// intercept column is added internally; x is row-major n x p.
LogisticFit logistic_mle(const std::vector<std::vector<double>>& x,
                         const std::vector<int>& y, double tol = 1e-8,
                         int max_iter = 50);

/// Linear index beta^T [1, x_i] per subject.
std::vector<double> logistic_index(const LogisticFit& fit,
                                   const std::vector<std::vector<double>>& x);

std::vector<double> logistic_probabilities(const LogisticFit& fit,
                                           const std::vector<std::vector<double>>& x);

/// Fraction of subjects with (p >= threshold) != y, threshold in [0,1].
double logistic_error_rate(const LogisticFit& fit,
                           const std::vector<std::vector<double>>& x,
                           const std::vector<int>& y, double threshold = 0.5);

/// Cluster the 1-D fitted index into k clusters and report the label
/// entropy inside each cluster (layout order).
std::vector<double> index_heterogeneity(const LogisticFit& fit,
                                        const std::vector<std::vector<double>>& x,
                                        const std::vector<int>& y, int k,
                                        LogBase base = LogBase::natural);

} // namespace infoflow
