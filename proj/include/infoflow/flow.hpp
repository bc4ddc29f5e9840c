#pragma once

#include "infoflow/dcg.hpp"
#include "infoflow/mechanics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace infoflow {

/// Per covariate cluster: how the response labels distribute inside it.
struct ClusterMatch {
    int cluster_id = 0;
    int size = 0;
    std::vector<int> response_label_counts; // indexed by response cluster id
    double cond_entropy = 0.0;              // unnormalized H over response labels
    std::optional<double> p_value;
};

/// Categorical pattern matching of one response composition against one
/// covariate composition over the same subjects.
struct MatchReport {
    ClusteringComposition response_comp;
    ClusteringComposition covariate_comp;
    std::vector<ClusterMatch> per_cluster;
    double overall_response_entropy = 0.0;
    double weighted_cond_entropy = 0.0; // H(resp | cov), size-weighted
    double directed_nce = 0.0;          // H(resp|cov) / H(resp)
    LogBase log_base = LogBase::natural;
};

/// A covariate cluster nearly exclusively owned by one response cluster.
struct KnowledgeLocus {
    int covariate_cluster = 0;
    int dominant_response_cluster = 0;
    double purity = 0.0;
    double cond_entropy = 0.0;
    double p_value = 1.0;
};

struct ErrorRates {
    std::vector<double> per_cluster;
    double overall = 0.0;
};

enum class PredictionRule { majority, randomized };

struct FlowStage {
    FeatureGroup group;
    CouplingGeometry geometry;
    MatchReport report;
    std::vector<KnowledgeLocus> loci;
    int cov_k = 0;
};

/// A response tree linked to a serial chain of covariate coupling
/// geometries, with entropy-weighted per-subject predictions.
struct InformationFlow {
    UltrametricTree response_tree;
    ClusteringComposition response_comp;
    std::vector<FlowStage> stages;
    std::vector<double> stage_weights;    // positive, sum to 1
    std::vector<int> predictions;         // per subject, predicted response cluster
    std::vector<std::vector<int>> stage_votes; // stage_votes[s][subject]
    std::vector<std::string> subjects;
    double error_rate = 0.0;              // fraction mispredicted
    uint64_t seed = 0;
};

/// Tabulate response labels within each covariate cluster (Step 4).
MatchReport match_trees(const ClusteringComposition& resp,
                        const ClusteringComposition& cov,
                        LogBase base = LogBase::natural);

/// Fill p-values by simple random sampling without replacement from the
/// pooled response labels: p = (1 + #{sim entropy <= observed}) / (1 + n_sims),
/// one-sided on low entropy. Deterministic in (seed, cluster id, sim index).
MatchReport permutation_pvalues(const MatchReport& report, int n_sims = 1000,
                                uint64_t seed = 0);

/// Covariate clusters whose dominant response label fraction reaches
/// purity_threshold. Requires p-values to be present.
std::vector<KnowledgeLocus> knowledge_loci(const MatchReport& report,
                                           double purity_threshold = 0.95);

/// Majority rule: per-cluster error 1 - max label fraction.
/// Randomized rule: 1 - sum of squared label fractions.
/// Overall is the size-weighted mean.
ErrorRates error_rate(const MatchReport& report, PredictionRule rule);

struct SerialStageInput {
    FeatureGroup group;
    CouplingGeometry geometry;
    int cov_k = 0;
};

/// Assemble the full information flow (Step 5): per-stage match reports,
/// p-values and loci; stage weights proportional to 1/(eps + H(resp|cov));
/// per-subject weighted-plurality predictions (ties -> lowest response
/// cluster id).
InformationFlow serial_flow(const UltrametricTree& resp_tree, int resp_k,
                            const std::vector<SerialStageInput>& stages,
                            LogBase base = LogBase::natural, int n_sims = 1000,
                            uint64_t seed = 0,
                            const std::vector<std::string>& subjects = {});

/// Weighted--plurality prediction for one subject with its own response
/// label removed from every cluster tally it participates in.
int predict_held_out(const InformationFlow& flow, const std::string& subject_id);
int predict_held_out_index(const InformationFlow& flow, size_t subject_idx);

} // namespace infoflow
