#include "infoflow/flow.hpp"

#include "infoflow/error.hpp"

#include <algorithm>
#include <cmath>

namespace infoflow {

namespace {

double entropy_from_counts(const std::vector<long>& counts, long total, LogBase base) {
    if (total <= 0) return 0.0;
    double h = 0.0;
    for (long c : counts) {
        if (c <= 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    if (base == LogBase::two) h /= std::log(2.0);
    return h < 0.0 ? 0.0 : h;
}

// SplitMix64; every permutation draw owns a stream keyed on
// (seed, cluster id, sim index) so scheduling cannot change results.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t s) : state(s) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform in [0, bound) without modulo bias worth worrying about here
    size_t below(size_t bound) { return static_cast<size_t>(next() % bound); }
};

uint64_t mix_stream(uint64_t seed, uint64_t a, uint64_t b) {
    Rng r(seed ^ (a * 0xd6e8feb86659fd93ULL) ^ (b * 0xa5a5a5a5a5a5a5a5ULL));
    return r.next();
}

int majority_label(const std::vector<long>& counts) {
    int best = 0;
    long best_count = -1;
    for (size_t label = 0; label < counts.size(); ++label) {
        if (counts[label] > best_count) { // ties fall to the lowest label id
            best_count = counts[label];
            best = static_cast<int>(label);
        }
    }
    return best;
}

} // namespace

MatchReport match_trees(const ClusteringComposition& resp, const ClusteringComposition& cov,
                        LogBase base) {
    if (resp.assignment.size() != cov.assignment.size())
        raise(ErrorKind::SubjectMismatch, "response and covariate compositions cover different subjects");
    const size_t n = resp.assignment.size();
    if (n == 0) raise(ErrorKind::EmptyInput, "empty compositions");

    MatchReport report;
    report.response_comp = resp;
    report.covariate_comp = cov;
    report.log_base = base;

    std::vector<long> overall(static_cast<size_t>(resp.k), 0);
    for (int label : resp.assignment) overall[static_cast<size_t>(label)]++;
    report.overall_response_entropy = entropy_from_counts(overall, static_cast<long>(n), base);

    report.per_cluster.resize(static_cast<size_t>(cov.k));
    for (int c = 0; c < cov.k; ++c) {
        report.per_cluster[static_cast<size_t>(c)].cluster_id = c;
        report.per_cluster[static_cast<size_t>(c)].response_label_counts.assign(
            static_cast<size_t>(resp.k), 0);
    }
    for (size_t i = 0; i < n; ++i) {
        auto& cluster = report.per_cluster[static_cast<size_t>(cov.assignment[i])];
        cluster.size++;
        cluster.response_label_counts[static_cast<size_t>(resp.assignment[i])]++;
    }
    double weighted = 0.0;
    for (auto& cluster : report.per_cluster) {
        std::vector<long> counts(cluster.response_label_counts.begin(),
                                 cluster.response_label_counts.end());
        cluster.cond_entropy = entropy_from_counts(counts, cluster.size, base);
        weighted += (static_cast<double>(cluster.size) / static_cast<double>(n)) *
                    cluster.cond_entropy;
    }
    report.weighted_cond_entropy = weighted;
    report.directed_nce = report.overall_response_entropy > 0.0
                              ? std::clamp(weighted / report.overall_response_entropy, 0.0, 1.0)
                              : 0.0;
    return report;
}

MatchReport permutation_pvalues(const MatchReport& report, int n_sims, uint64_t seed) {
    if (n_sims < 1) raise(ErrorKind::ConfigError, "n_sims must be >= 1");
    MatchReport out = report;

    const auto& pooled = report.response_comp.assignment;
    const size_t n = pooled.size();

    for (auto& cluster : out.per_cluster) {
        const auto s = static_cast<size_t>(cluster.size);
        long hits = 0;
        std::vector<int> scratch;
        std::vector<long> counts(static_cast<size_t>(report.response_comp.k), 0);
        for (int sim = 0; sim < n_sims; ++sim) {
            Rng rng(mix_stream(seed, static_cast<uint64_t>(cluster.cluster_id),
                               static_cast<uint64_t>(sim)));
            // partial Fisher-Yates from a fresh pool copy: the first s
            // entries become the draw; each sim is scheduling-independent
            scratch.assign(pooled.begin(), pooled.end());
            for (size_t i = 0; i < s; ++i) {
                const size_t j = i + rng.below(n - i);
                std::swap(scratch[i], scratch[j]);
            }
            std::fill(counts.begin(), counts.end(), 0);
            for (size_t i = 0; i < s; ++i) counts[static_cast<size_t>(scratch[i])]++;
            const double sim_entropy =
                entropy_from_counts(counts, static_cast<long>(s), report.log_base);
            if (sim_entropy <= cluster.cond_entropy + 1e-12) hits++;
        }
        cluster.p_value = static_cast<double>(1 + hits) / static_cast<double>(1 + n_sims);
    }
    return out;
}

std::vector<KnowledgeLocus> knowledge_loci(const MatchReport& report, double purity_threshold) {
    std::vector<KnowledgeLocus> loci;
    for (const auto& cluster : report.per_cluster) {
        if (!cluster.p_value)
            raise(ErrorKind::ConfigError, "knowledge_loci needs permutation p-values first");
        if (cluster.size == 0) continue;
        long best = -1;
        int dominant = 0;
        for (size_t label = 0; label < cluster.response_label_counts.size(); ++label) {
            if (cluster.response_label_counts[label] > best) {
                best = cluster.response_label_counts[label];
                dominant = static_cast<int>(label);
            }
        }
        const double purity = static_cast<double>(best) / static_cast<double>(cluster.size);
        if (purity >= purity_threshold) {
            loci.push_back({cluster.cluster_id, dominant, purity, cluster.cond_entropy,
                            *cluster.p_value});
        }
    }
    return loci;
}

ErrorRates error_rate(const MatchReport& report, PredictionRule rule) {
    ErrorRates rates;
    const double n = static_cast<double>(report.response_comp.assignment.size());
    double overall = 0.0;
    for (const auto& cluster : report.per_cluster) {
        double err = 0.0;
        if (cluster.size > 0) {
            const double size = static_cast<double>(cluster.size);
            if (rule == PredictionRule::majority) {
                long best = 0;
                for (long c : cluster.response_label_counts) best = std::max(best, c);
                err = 1.0 - static_cast<double>(best) / size;
            } else {
                double sq = 0.0;
                for (long c : cluster.response_label_counts) {
                    const double p = static_cast<double>(c) / size;
                    sq += p * p;
                }
                err = 1.0 - sq;
            }
        }
        rates.per_cluster.push_back(err);
        overall += err * static_cast<double>(cluster.size) / n;
    }
    rates.overall = overall;
    return rates;
}

InformationFlow serial_flow(const UltrametricTree& resp_tree, int resp_k,
                            const std::vector<SerialStageInput>& stages, LogBase base,
                            int n_sims, uint64_t seed, const std::vector<std::string>& subjects) {
    if (stages.empty()) raise(ErrorKind::EmptyStages, "serial flow needs at least one stage");

    InformationFlow flow;
    flow.response_tree = resp_tree;
    flow.response_comp = composition_at(resp_tree, resp_k);
    flow.seed = seed;
    const size_t n = flow.response_comp.assignment.size();

    flow.subjects = subjects;
    if (flow.subjects.empty()) {
        for (size_t i = 0; i < n; ++i) flow.subjects.push_back(std::to_string(i + 1));
    }
    if (flow.subjects.size() != n)
        raise(ErrorKind::SubjectMismatch, "subject id list does not match response tree size");

    std::vector<double> raw_weights;
    for (size_t s = 0; s < stages.size(); ++s) {
        const auto& stage_in = stages[s];
        if (stage_in.geometry.row_order.size() != n)
            raise(ErrorKind::SubjectMismatch,
                  "stage " + std::to_string(s + 1) + " geometry covers a different subject set");
        FlowStage stage;
        stage.group = stage_in.group;
        stage.geometry = stage_in.geometry;
        stage.cov_k = stage_in.cov_k;
        const ClusteringComposition cov = composition_at(stage_in.geometry.row_tree,
                                                         stage_in.cov_k);
        MatchReport report = match_trees(flow.response_comp, cov, base);
        report = permutation_pvalues(report, n_sims, mix_stream(seed, 0x5747u, s));
        stage.report = std::move(report);
        stage.loci = knowledge_loci(stage.report, 0.95);
        raw_weights.push_back(1.0 / (1e-9 + stage.report.weighted_cond_entropy));
        flow.stages.push_back(std::move(stage));
    }

    double total = 0.0;
    for (double w : raw_weights) total += w;
    for (double w : raw_weights) flow.stage_weights.push_back(w / total);

    // per-stage majority votes, then weighted plurality across stages
    flow.stage_votes.resize(stages.size(), std::vector<int>(n, 0));
    for (size_t s = 0; s < flow.stages.size(); ++s) {
        const auto& stage = flow.stages[s];
        std::vector<int> cluster_vote(stage.report.per_cluster.size(), 0);
        for (size_t c = 0; c < stage.report.per_cluster.size(); ++c) {
            std::vector<long> counts(stage.report.per_cluster[c].response_label_counts.begin(),
                                     stage.report.per_cluster[c].response_label_counts.end());
            cluster_vote[c] = majority_label(counts);
        }
        for (size_t i = 0; i < n; ++i)
            flow.stage_votes[s][i] =
                cluster_vote[static_cast<size_t>(stage.report.covariate_comp.assignment[i])];
    }
    flow.predictions.resize(n);
    long errors = 0;
    for (size_t i = 0; i < n; ++i) {
        std::vector<double> score(static_cast<size_t>(flow.response_comp.k), 0.0);
        for (size_t s = 0; s < flow.stages.size(); ++s)
            score[static_cast<size_t>(flow.stage_votes[s][i])] += flow.stage_weights[s];
        int best = 0;
        for (size_t label = 1; label < score.size(); ++label)
            if (score[label] > score[best] + 1e-15) best = static_cast<int>(label);
        flow.predictions[i] = best;
        if (best != flow.response_comp.assignment[i]) errors++;
    }
    flow.error_rate = static_cast<double>(errors) / static_cast<double>(n);
    return flow;
}

int predict_held_out_index(const InformationFlow& flow, size_t subject_idx) {
    const size_t n = flow.response_comp.assignment.size();
    if (subject_idx >= n) raise(ErrorKind::UnknownSubject, "subject index out of range");
    const int own_label = flow.response_comp.assignment[subject_idx];

    std::vector<double> score(static_cast<size_t>(flow.response_comp.k), 0.0);
    for (size_t s = 0; s < flow.stages.size(); ++s) {
        const auto& stage = flow.stages[s];
        const int cluster = stage.report.covariate_comp.assignment[subject_idx];
        std::vector<long> counts(
            stage.report.per_cluster[static_cast<size_t>(cluster)].response_label_counts.begin(),
            stage.report.per_cluster[static_cast<size_t>(cluster)].response_label_counts.end());
        counts[static_cast<size_t>(own_label)]--; // the subject cannot vote for itself
        score[static_cast<size_t>(majority_label(counts))] += flow.stage_weights[s];
    }
    int best = 0;
    for (size_t label = 1; label < score.size(); ++label)
        if (score[label] > score[static_cast<size_t>(best)] + 1e-15) best = static_cast<int>(label);
    return best;
}

int predict_held_out(const InformationFlow& flow, const std::string& subject_id) {
    for (size_t i = 0; i < flow.subjects.size(); ++i)
        if (flow.subjects[i] == subject_id) return predict_held_out_index(flow, i);
    raise(ErrorKind::UnknownSubject, "subject '" + subject_id + "' not part of this flow");
}

} // namespace infoflow
