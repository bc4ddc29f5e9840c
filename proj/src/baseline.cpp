#include "infoflow/baseline.hpp"

#include "infoflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace infoflow {

namespace {

// Solve A x = b in place with partial pivoting; A is p x p row-major.
std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b, size_t p) {
    for (size_t col = 0; col < p; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < p; ++r)
            if (std::abs(a[r * p + col]) > std::abs(a[pivot * p + col])) pivot = r;
        if (std::abs(a[pivot * p + col]) < 1e-12)
            raise(ErrorKind::SingularHessian, "Hessian is singular to working precision");
        if (pivot != col) {
            for (size_t c = 0; c < p; ++c) std::swap(a[col * p + c], a[pivot * p + c]);
            std::swap(b[col], b[pivot]);
        }
        for (size_t r = col + 1; r < p; ++r) {
            const double f = a[r * p + col] / a[col * p + col];
            if (f == 0.0) continue;
            for (size_t c = col; c < p; ++c) a[r * p + c] -= f * a[col * p + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(p, 0.0);
    for (size_t r = p; r-- > 0;) {
        double acc = b[r];
        for (size_t c = r + 1; c < p; ++c) acc -= a[r * p + c] * x[c];
        x[r] = acc / a[r * p + r];
    }
    return x;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double log_likelihood(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                      const std::vector<double>& beta) {
    double ll = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double z = beta[0];
        for (size_t j = 0; j < x[i].size(); ++j) z += beta[j + 1] * x[i][j];
        // log p for y=1, log(1-p) for y=0, in the stable form
        ll += y[i] == 1 ? -std::log1p(std::exp(-std::abs(z))) - std::max(-z, 0.0)
                        : -std::log1p(std::exp(-std::abs(z))) - std::max(z, 0.0);
    }
    return ll;
}

} // namespace

LogisticFit logistic_mle(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                         double tol, int max_iter) {
    const size_t n = x.size();
    if (n == 0 || y.size() != n)
        raise(ErrorKind::LengthMismatch, "design matrix and response differ in length");
    const size_t p = x[0].size() + 1; // with intercept
    if (n <= p - 1)
        raise(ErrorKind::ConfigError, "need more subjects than covariates for the MLE");
    bool has0 = false, has1 = false;
    for (int v : y) {
        if (v == 0) has0 = true;
        else if (v == 1) has1 = true;
        else raise(ErrorKind::TypeParseError, "response must be 0/1 for the logistic baseline");
    }
    if (!has0 || !has1) raise(ErrorKind::ConfigError, "response contains a single class");

    LogisticFit fit;
    fit.beta.assign(p, 0.0);
    double ll = log_likelihood(x, y, fit.beta);

    for (int it = 1; it <= max_iter; ++it) {
        fit.iterations = it;
        std::vector<double> grad(p, 0.0);
        std::vector<double> hess(p * p, 0.0);
        for (size_t i = 0; i < n; ++i) {
            double z = fit.beta[0];
            for (size_t j = 0; j + 1 < p; ++j) z += fit.beta[j + 1] * x[i][j];
            const double mu = sigmoid(z);
            const double w = mu * (1.0 - mu);
            const double resid = static_cast<double>(y[i]) - mu;
            // design row is (1, x_i)
            grad[0] += resid;
            for (size_t j = 0; j + 1 < p; ++j) grad[j + 1] += resid * x[i][j];
            hess[0] += w;
            for (size_t j = 0; j + 1 < p; ++j) {
                hess[(j + 1) * p] += w * x[i][j];
                hess[j + 1] += w * x[i][j];
                for (size_t k = 0; k + 1 < p; ++k)
                    hess[(j + 1) * p + (k + 1)] += w * x[i][j] * x[i][k];
            }
        }
        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g));
        if (gmax < tol) {
            fit.converged = true;
            break;
        }
        const std::vector<double> step = solve_linear(hess, grad, p);

        // step-halving keeps the log-likelihood nondecreasing
        double scale = 1.0;
        std::vector<double> trial(p);
        double trial_ll = -std::numeric_limits<double>::infinity();
        for (int half = 0; half < 30; ++half) {
            for (size_t j = 0; j < p; ++j) trial[j] = fit.beta[j] + scale * step[j];
            trial_ll = log_likelihood(x, y, trial);
            if (trial_ll >= ll - 1e-12) break;
            scale *= 0.5;
        }
        fit.beta = trial;
        ll = trial_ll;

        double bmax = 0.0;
        for (double b : fit.beta) bmax = std::max(bmax, std::abs(b));
        if (bmax > 1e6)
            raise(ErrorKind::Separation,
                  "coefficients diverged; classes are (quasi-)separated");
    }
    fit.log_likelihood = ll;
    if (!fit.converged) {
        // check once more after the last step
        std::vector<double> grad(p, 0.0);
        for (size_t i = 0; i < n; ++i) {
            double z = fit.beta[0];
            for (size_t j = 0; j + 1 < p; ++j) z += fit.beta[j + 1] * x[i][j];
            const double resid = static_cast<double>(y[i]) - sigmoid(z);
            grad[0] += resid;
            for (size_t j = 0; j + 1 < p; ++j) grad[j + 1] += resid * x[i][j];
        }
        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g));
        fit.converged = gmax < tol;
    }
    return fit;
}

std::vector<double> logistic_index(const LogisticFit& fit,
                                   const std::vector<std::vector<double>>& x) {
    std::vector<double> idx;
    idx.reserve(x.size());
    for (const auto& row : x) {
        double z = fit.beta[0];
        for (size_t j = 0; j < row.size(); ++j) z += fit.beta[j + 1] * row[j];
        idx.push_back(z);
    }
    return idx;
}

std::vector<double> logistic_probabilities(const LogisticFit& fit,
                                           const std::vector<std::vector<double>>& x) {
    std::vector<double> probs = logistic_index(fit, x);
    for (double& z : probs) z = sigmoid(z);
    return probs;
}

double logistic_error_rate(const LogisticFit& fit, const std::vector<std::vector<double>>& x,
                           const std::vector<int>& y, double threshold) {
    if (threshold < 0.0 || threshold > 1.0)
        raise(ErrorKind::ConfigError, "threshold must lie in [0,1]");
    const std::vector<double> probs = logistic_probabilities(fit, x);
    long errors = 0;
    for (size_t i = 0; i < probs.size(); ++i) {
        const int predicted = probs[i] >= threshold ? 1 : 0;
        if (predicted != y[i]) errors++;
    }
    return static_cast<double>(errors) / static_cast<double>(probs.size());
}

std::vector<double> index_heterogeneity(const LogisticFit& fit,
                                        const std::vector<std::vector<double>>& x,
                                        const std::vector<int>& y, int k, LogBase base) {
    if (k < 2) raise(ErrorKind::ConfigError, "index_heterogeneity needs k >= 2");
    const std::vector<double> idx = logistic_index(fit, x);
    const size_t n = idx.size();
    std::vector<double> dist(n * n, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            dist[i * n + j] = dist[j * n + i] = std::abs(idx[i] - idx[j]);

    const UltrametricTree tree = build_ultrametric_tree(dist, n, std::max(k, 4));
    const ClusteringComposition comp = composition_at(tree, k);

    std::vector<double> entropies;
    for (const auto& cluster : comp.members()) {
        std::vector<int> labels;
        labels.reserve(cluster.size());
        for (int i : cluster) labels.push_back(y[static_cast<size_t>(i)]);
        entropies.push_back(shannon_entropy(labels, base));
    }
    return entropies;
}

} // namespace infoflow
