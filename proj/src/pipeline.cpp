#include "infoflow/pipeline.hpp"

#include "infoflow/error.hpp"
#include "infoflow/render.hpp"
#include "infoflow/serialize.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace infoflow {

namespace {

using nlohmann::json;

int finest_informative_k(const UltrametricTree& tree) {
    for (const auto& level : tree.levels)
        if (level.k >= 2) return level.k;
    return 1;
}

std::vector<std::string> names_for(const DigitalCodedMatrix& coded, const std::vector<int>& idx) {
    std::vector<std::string> names;
    names.reserve(idx.size());
    for (int i : idx) names.push_back(coded.manifest[static_cast<size_t>(i)].name);
    return names;
}

std::vector<std::vector<int>> code_columns(const DigitalCodedMatrix& coded,
                                           const std::vector<int>& idx) {
    std::vector<std::vector<int>> cols;
    cols.reserve(idx.size());
    for (int i : idx) cols.push_back(coded.columns[static_cast<size_t>(i)].codes);
    return cols;
}

std::string dataset_tag(const RunConfig& config) {
    if (!config.dataset.empty()) return config.dataset;
    return std::filesystem::path(config.csv_path).stem().string();
}

uint64_t substream(uint64_t seed, uint64_t salt) {
    uint64_t z = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

void RunConfig::validate() const {
    if (dataset.empty() && (csv_path.empty() || manifest_path.empty()))
        raise(ErrorKind::ConfigError, "need either a builtin dataset name or csv+manifest paths");
    if (!dataset.empty() && !csv_path.empty())
        raise(ErrorKind::ConfigError, "give a builtin dataset or csv+manifest, not both");
    if (max_bins < 1) raise(ErrorKind::ConfigError, "max_bins must be >= 1");
    if (!(gap_factor > 0.0)) raise(ErrorKind::ConfigError, "gap_factor must be > 0");
    if (scale_count < 1) raise(ErrorKind::ConfigError, "scale_count must be >= 1");
    if (ce_threshold < 0.0 || ce_threshold > 1.0)
        raise(ErrorKind::ConfigError, "ce_threshold must lie in [0,1]");
    if (purity_threshold <= 0.0 || purity_threshold > 1.0)
        raise(ErrorKind::ConfigError, "purity_threshold must lie in (0,1]");
    if (n_sims < 1) raise(ErrorKind::ConfigError, "n_sims must be >= 1");
    if (max_iter < 1) raise(ErrorKind::ConfigError, "max_iter must be >= 1");
    if (stages.empty()) raise(ErrorKind::ConfigError, "at least one stage is required");
}

PipelineResult run_pipeline(const RunConfig& config) {
    config.validate();
    PipelineResult result;

    // Step 0: ingest
    result.table = config.dataset.empty() ? load_table(config.csv_path, config.manifest_path)
                                          : builtin_dataset(config.dataset);

    // Step 1: renormalize
    result.coded = renormalize_matrix(result.table, config.max_bins, config.gap_factor,
                                      config.log_base);
    result.histograms = fit_column_histograms(result.table, config.max_bins, config.gap_factor);

    const std::vector<int> resp_idx = result.coded.response_indices();
    const std::vector<int> cov_idx = result.coded.covariate_indices();
    if (resp_idx.empty()) raise(ErrorKind::ConfigError, "manifest declares no response feature");
    if (cov_idx.empty()) raise(ErrorKind::ConfigError, "manifest declares no covariate feature");

    // Step 2: mutual conditional-entropy matrices and synergistic groups
    result.xi_response =
        entropy_matrix(code_columns(result.coded, resp_idx), names_for(result.coded, resp_idx),
                       config.log_base);
    result.xi_covariate =
        entropy_matrix(code_columns(result.coded, cov_idx), names_for(result.coded, cov_idx),
                       config.log_base);
    result.response_feature_tree =
        build_ultrametric_tree(result.xi_response.values,
                               static_cast<size_t>(result.xi_response.m), config.scale_count,
                               substream(config.seed, 1));
    result.covariate_feature_tree =
        build_ultrametric_tree(result.xi_covariate.values,
                               static_cast<size_t>(result.xi_covariate.m), config.scale_count,
                               substream(config.seed, 2));
    result.response_groups = synergistic_groups(result.xi_response, result.response_feature_tree,
                                                config.ce_threshold);
    result.covariate_groups = synergistic_groups(result.xi_covariate,
                                                 result.covariate_feature_tree,
                                                 config.ce_threshold);

    // Step 3: data mechanics; response side first
    std::vector<std::string> resp_names = config.resp_features;
    if (resp_names.empty()) resp_names = names_for(result.coded, resp_idx);
    for (const auto& name : resp_names) {
        const int idx = result.coded.feature_index(name);
        if (idx < 0 || result.coded.manifest[static_cast<size_t>(idx)].role != FeatureRole::response)
            raise(ErrorKind::ConfigError, "'" + name + "' is not a response feature");
    }
    result.response_geometry = data_mechanics(result.coded.submatrix(resp_names),
                                              config.max_iter, config.scale_count,
                                              substream(config.seed, 3));

    // covariate geometries, one per configured stage
    std::vector<SerialStageInput> stage_inputs;
    for (size_t s = 0; s < config.stages.size(); ++s) {
        const std::string& token = config.stages[s];
        FeatureGroup group;
        if (token == "all") {
            group.group_id = 0;
            group.members = names_for(result.coded, cov_idx);
        } else {
            int gid = 0;
            try {
                gid = std::stoi(token);
            } catch (...) {
                raise(ErrorKind::ConfigError, "stage token '" + token + "' is not 'all' or a group id");
            }
            if (gid < 1 || gid > static_cast<int>(result.covariate_groups.size()))
                raise(ErrorKind::ConfigError,
                      "stage group #" + token + " does not exist (have " +
                          std::to_string(result.covariate_groups.size()) + " groups)");
            group = result.covariate_groups[static_cast<size_t>(gid - 1)];
        }
        SerialStageInput input;
        input.group = group;
        input.geometry = data_mechanics(result.coded.submatrix(group.members), config.max_iter,
                                        config.scale_count, substream(config.seed, 100 + s));
        int k = 0;
        if (!config.cov_k.empty())
            k = config.cov_k.size() == 1 ? config.cov_k[0]
                                         : config.cov_k[std::min(s, config.cov_k.size() - 1)];
        input.cov_k = k > 0 ? k : finest_informative_k(input.geometry.row_tree);
        stage_inputs.push_back(std::move(input));
    }

    // Steps 4-5: categorical pattern matching and the serial flow
    const int resp_k = config.resp_k > 0
                           ? config.resp_k
                           : finest_informative_k(result.response_geometry.row_tree);
    result.flow = serial_flow(result.response_geometry.row_tree, resp_k, stage_inputs,
                              config.log_base, config.n_sims, substream(config.seed, 4),
                              result.coded.subjects);
    for (auto& stage : result.flow.stages)
        stage.loci = knowledge_loci(stage.report, config.purity_threshold);
    result.stage_geometries = result.flow.stages;

    // exports
    if (!config.output_dir.empty()) {
        namespace fs = std::filesystem;
        const fs::path dir(config.output_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        const std::string tag = dataset_tag(config);

        write_file_atomic((dir / "histograms.json").string(),
                          histograms_to_json(result.histograms));
        write_file_atomic((dir / "coded.json").string(), coded_matrix_to_json(result.coded));
        write_file_atomic((dir / "coded.csv").string(), coded_matrix_to_csv(result.coded));
        write_file_atomic((dir / "xi_response.csv").string(),
                          entropy_matrix_to_csv(result.xi_response));
        write_file_atomic((dir / "xi_response.meta.json").string(),
                          entropy_matrix_meta_json(result.xi_response));
        write_file_atomic((dir / "xi_covariate.csv").string(),
                          entropy_matrix_to_csv(result.xi_covariate));
        write_file_atomic((dir / "xi_covariate.meta.json").string(),
                          entropy_matrix_meta_json(result.xi_covariate));
        write_file_atomic((dir / "response_feature_tree.json").string(),
                          tree_to_json(result.response_feature_tree));
        write_file_atomic((dir / "covariate_feature_tree.json").string(),
                          tree_to_json(result.covariate_feature_tree));
        write_file_atomic((dir / "groups_response.json").string(),
                          groups_to_json(result.response_groups));
        write_file_atomic((dir / "groups_covariate.json").string(),
                          groups_to_json(result.covariate_groups));
        write_file_atomic((dir / "response_geometry.json").string(),
                          geometry_to_json(result.response_geometry));
        write_file_atomic((dir / "flow.json").string(), flow_to_json(result.flow));

        for (const auto& [name, hist] : result.histograms) {
            // stack bin counts by the first response feature's clusters
            std::vector<std::vector<int>> counts(hist.bins.size());
            const int fi = result.table.feature_index(name);
            const auto& values = result.table.columns[static_cast<size_t>(fi)].numbers;
            const auto& resp = result.flow.response_comp.assignment;
            for (auto& row : counts) row.assign(static_cast<size_t>(result.flow.response_comp.k), 0);
            bool complete = values.size() == resp.size();
            if (complete) {
                for (size_t i = 0; i < values.size(); ++i) {
                    const int b = hist.bin_of(values[i]);
                    if (b < 0) { complete = false; break; }
                    counts[static_cast<size_t>(b)][static_cast<size_t>(resp[i])]++;
                }
            }
            render_histogram(hist,
                             complete ? std::optional(counts) : std::nullopt,
                             (dir / (tag + "_histogram_" + name + ".svg")).string());
        }
        for (size_t s = 0; s < result.flow.stages.size(); ++s) {
            const auto& stage = result.flow.stages[s];
            std::vector<int> strip = result.flow.response_comp.assignment;
            write_file_atomic((dir / ("stage_" + std::to_string(s + 1) + "_geometry.json")).string(),
                              geometry_to_json(stage.geometry));
            write_file_atomic((dir / ("stage_" + std::to_string(s + 1) + "_matrix.csv")).string(),
                              geometry_matrix_to_csv(stage.geometry));
            render_geometry(stage.geometry, stage.cov_k,
                            std::min<int>(2, static_cast<int>(stage.geometry.col_order.size())),
                            strip,
                            (dir / (tag + "_geometry_stage" + std::to_string(s + 1) + ".svg"))
                                .string());
        }
        render_flow(result.flow, (dir / (tag + "_flow_main.svg")).string());
    }
    return result;
}

namespace {

ReferenceCheck make_check(const std::string& name, double computed, double expected,
                          double tolerance, bool composition_matched = true,
                          const std::string& detail = "") {
    ReferenceCheck check;
    check.name = name;
    check.computed = computed;
    check.expected = expected;
    check.tolerance = tolerance;
    check.passed = std::abs(computed - expected) <= tolerance;
    check.composition_matched = composition_matched;
    check.detail = detail;
    return check;
}

ReferenceCheck make_bound_check(const std::string& name, double computed, double bound,
                                bool upper, bool composition_matched = true,
                                const std::string& detail = "") {
    ReferenceCheck check;
    check.name = name;
    check.computed = computed;
    check.expected = bound;
    check.tolerance = 0.0;
    check.comparison_is_upper_bound = upper;
    check.passed = upper ? computed <= bound : computed >= bound;
    check.composition_matched = composition_matched;
    check.detail = detail;
    return check;
}

// which response cluster holds the subjects carrying `label` in `feature`
int response_cluster_of_label(const PipelineResult& result, const std::string& feature,
                              const std::string& label) {
    const int fi = result.table.feature_index(feature);
    if (fi < 0) return -1;
    const auto& labels = result.table.columns[static_cast<size_t>(fi)].labels;
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return result.flow.response_comp.assignment[i];
    return -1;
}

// mean covariate code of one covariate cluster in a stage geometry
double cluster_mean_code(const FlowStage& stage, int cluster) {
    const auto& comp = stage.report.covariate_comp;
    double sum = 0.0;
    long count = 0;
    for (size_t r = 0; r < stage.geometry.row_order.size(); ++r) {
        const int orig = stage.geometry.row_order[r];
        if (comp.assignment[static_cast<size_t>(orig)] != cluster) continue;
        for (double v : stage.geometry.matrix[r]) {
            sum += v;
            count++;
        }
    }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

void casestudy_brain(CaseStudyResult& out, const std::string& output_dir);
void casestudy_electricity(CaseStudyResult& out, const std::string& output_dir);
void casestudy_andes(CaseStudyResult& out, const std::string& output_dir);
void casestudy_stature(CaseStudyResult& out, const std::string& output_dir);
void casestudy_heart(CaseStudyResult& out, const std::string& output_dir);

} // namespace

RunConfig casestudy_config(const std::string& name) {
    RunConfig config;
    config.dataset = name;
    if (name == "brain") {
        config.resp_features = {"gender"};
        config.resp_k = 2;
        config.stages = {"all"};
        config.cov_k = {6};
        config.scale_count = 8;
    } else if (name == "electricity") {
        config.resp_k = 2;
        config.stages = {"2", "3", "1", "4"};
        config.cov_k = {3};
        config.scale_count = 6;
    } else if (name == "andes") {
        config.resp_k = 2;
        config.stages = {"all"};
        config.cov_k = {4};
        config.scale_count = 6;
    } else if (name == "stature") {
        config.resp_k = 3;
        config.stages = {"all"};
        config.cov_k = {3};
        config.scale_count = 6;
    } else if (name == "heart") {
        config.resp_k = 2;
        config.stages = {"all"};
        config.cov_k = {9};
        config.scale_count = 8;
    } else {
        raise(ErrorKind::UnknownDataset, "'" + name + "' is not a case study");
    }
    return config;
}

CaseStudyResult run_casestudy(const std::string& name, const std::string& output_dir) {
    CaseStudyResult out;
    out.name = name;
    if (name == "brain") casestudy_brain(out, output_dir);
    else if (name == "electricity") casestudy_electricity(out, output_dir);
    else if (name == "andes") casestudy_andes(out, output_dir);
    else if (name == "stature") casestudy_stature(out, output_dir);
    else if (name == "heart") casestudy_heart(out, output_dir);
    else raise(ErrorKind::UnknownDataset, "'" + name + "' is not a case study");

    out.all_passed = true;
    std::ostringstream text;
    text << "case study: " << name << "\n";
    for (const auto& check : out.checks) {
        if (!check.passed) out.all_passed = false;
        text << (check.passed ? "PASS" : "FAIL") << "  " << check.name << ": computed "
             << check.computed;
        if (check.comparison_is_upper_bound) text << " (bound " << check.expected << ")";
        else text << " (expected " << check.expected << " +/- " << check.tolerance << ")";
        if (!check.composition_matched) text << "  [composition differs: downgraded criterion]";
        if (!check.detail.empty()) text << "  -- " << check.detail;
        text << "\n";
    }
    out.summary_text = text.str();

    if (!output_dir.empty()) {
        json j;
        j["name"] = name;
        j["all_passed"] = out.all_passed;
        json checks = json::array();
        for (const auto& check : out.checks)
            checks.push_back({{"name", check.name},
                              {"computed", check.computed},
                              {"expected", check.expected},
                              {"tolerance", check.tolerance},
                              {"upper_bound", check.comparison_is_upper_bound},
                              {"passed", check.passed},
                              {"composition_matched", check.composition_matched},
                              {"detail", check.detail}});
        j["checks"] = checks;
        write_file_atomic((std::filesystem::path(output_dir) / "summary.json").string(),
                          j.dump(2) + "\n");
        write_file_atomic((std::filesystem::path(output_dir) / "summary.txt").string(),
                          out.summary_text);
    }
    return out;
}

namespace {

void casestudy_brain(CaseStudyResult& out, const std::string& output_dir) {
    RunConfig config = casestudy_config("brain");
    config.output_dir = output_dir;
    out.pipeline = run_pipeline(config);
    const PipelineResult& r = out.pipeline;

    // logistic baseline: gender against the two covariates
    const auto& table = r.table;
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    const int gi = table.feature_index("gender");
    const int hi = table.feature_index("head_size");
    const int bi = table.feature_index("brain_weight");
    for (size_t i = 0; i < table.n(); ++i) {
        x.push_back({table.columns[static_cast<size_t>(hi)].numbers[i],
                     table.columns[static_cast<size_t>(bi)].numbers[i]});
        y.push_back(table.columns[static_cast<size_t>(gi)].labels[i] == "2" ? 1 : 0);
    }
    const LogisticFit fit = logistic_mle(x, y);
    const double err = logistic_error_rate(fit, x, y, 0.5);
    out.checks.push_back(make_check("logistic baseline error at threshold 0.5", err, 0.283, 0.005));

    // the two response features carry separate mechanisms
    const int g = r.coded.feature_index("gender");
    const int a = r.coded.feature_index("age_range");
    const double ce = mutual_ce(r.coded.columns[static_cast<size_t>(g)].codes,
                                r.coded.columns[static_cast<size_t>(a)].codes, config.log_base);
    out.checks.push_back(make_bound_check("gender-age mutual conditional entropy", ce, 0.85, false));

    // knowledge loci at the 6-cluster covariate level: the extreme-small
    // cluster purely female, the extreme-large purely male
    const FlowStage& stage = r.flow.stages[0];
    const bool comp_ok = stage.report.covariate_comp.k == 6;
    const int female = response_cluster_of_label(r, "gender", "2");
    const int male = response_cluster_of_label(r, "gender", "1");
    double lo_mean = 1e30, hi_mean = -1e30;
    int lo_cluster = -1, hi_cluster = -1;
    for (int c = 0; c < stage.report.covariate_comp.k; ++c) {
        const double mean = cluster_mean_code(stage, c);
        if (mean < lo_mean) { lo_mean = mean; lo_cluster = c; }
        if (mean > hi_mean) { hi_mean = mean; hi_cluster = c; }
    }
    double female_purity = 0.0, male_purity = 0.0;
    for (const auto& locus : stage.loci) {
        if (locus.covariate_cluster == lo_cluster && locus.dominant_response_cluster == female)
            female_purity = locus.purity;
        if (locus.covariate_cluster == hi_cluster && locus.dominant_response_cluster == male)
            male_purity = locus.purity;
    }
    out.checks.push_back(make_bound_check("purity of the low-extreme female locus", female_purity,
                                          1.0, false, comp_ok));
    out.checks.push_back(make_bound_check("purity of the high-extreme male locus", male_purity,
                                          1.0, false, comp_ok));
}

void casestudy_electricity(CaseStudyResult& out, const std::string& output_dir) {
    // fine scale: 6 response clusters against synergistic group #2
    RunConfig fine = casestudy_config("electricity");
    fine.resp_k = 6;
    fine.stages = {"2"};
    fine.cov_k = {3};
    out.pipeline = run_pipeline(fine);
    const PipelineResult& rf = out.pipeline;
    const FlowStage& fs = rf.flow.stages[0];
    const bool fine_comp = rf.flow.response_comp.k == 6 && fs.report.covariate_comp.k == 3;

    out.checks.push_back(make_check("fine scale overall response entropy",
                                    fs.report.overall_response_entropy, 1.62, 0.10, fine_comp));
    const double expected_h[3] = {0.65, 1.39, 1.05};
    const bool expected_sig[3] = {true, false, true};
    if (fine_comp) {
        for (int c = 0; c < 3; ++c) {
            const auto& pc = fs.report.per_cluster[static_cast<size_t>(c)];
            out.checks.push_back(make_check(
                "fine scale cluster " + std::to_string(c + 1) + " entropy", pc.cond_entropy,
                expected_h[c], 0.15, true,
                "p=" + std::to_string(pc.p_value.value_or(1.0))));
            const bool sig = pc.p_value.value_or(1.0) < 0.01;
            out.checks.push_back(make_bound_check(
                "fine scale cluster " + std::to_string(c + 1) +
                    (expected_sig[c] ? " significant at 0.01" : " not significant at 0.01"),
                sig == expected_sig[c] ? 1.0 : 0.0, 1.0, false, true));
        }
    } else {
        // downgraded criterion: at least one significant and one not
        int sig = 0, nonsig = 0;
        for (const auto& pc : fs.report.per_cluster)
            (pc.p_value.value_or(1.0) < 0.01 ? sig : nonsig)++;
        out.checks.push_back(make_bound_check(
            "fine scale (downgraded): some cluster significant at 0.01",
            sig >= 1 ? 1.0 : 0.0, 1.0, false, false));
        out.checks.push_back(make_bound_check(
            "fine scale (downgraded): some cluster not significant",
            nonsig >= 1 ? 1.0 : 0.0, 1.0, false, false));
    }

    // coarse scale: all features at 4 clusters, then the serial flow
    RunConfig coarse = casestudy_config("electricity");
    coarse.resp_k = 2;
    coarse.stages = {"all"};
    coarse.cov_k = {4};
    coarse.output_dir = output_dir;
    const PipelineResult rc = run_pipeline(coarse);
    int zero_clusters = 0;
    for (const auto& pc : rc.flow.stages[0].report.per_cluster)
        if (pc.cond_entropy == 0.0) zero_clusters++;
    out.checks.push_back(make_bound_check(
        "coarse all-features clusters with zero entropy", static_cast<double>(zero_clusters), 3.0,
        false, rc.flow.stages[0].report.covariate_comp.k == 4));

    RunConfig serial = casestudy_config("electricity");
    serial.resp_k = 2;
    serial.stages = {"2", "3", "1", "4"};
    serial.cov_k = {3, 0, 0, 0};
    const PipelineResult rs = run_pipeline(serial);
    const FlowStage& s1 = rs.flow.stages[0];
    int zero = 0;
    double dominated = 0.0;
    for (const auto& pc : s1.report.per_cluster) {
        if (pc.cond_entropy == 0.0) zero++;
        else {
            long best = 0;
            for (long c : pc.response_label_counts) best = std::max(best, c);
            dominated = std::max(dominated,
                                 static_cast<double>(best) / static_cast<double>(pc.size));
        }
    }
    out.checks.push_back(make_bound_check("serial stage-1 zero-entropy clusters",
                                          static_cast<double>(zero), 2.0, false,
                                          s1.report.covariate_comp.k == 3));
    out.checks.push_back(make_bound_check("serial stage-1 dominated-cluster purity", dominated,
                                          0.75, false, s1.report.covariate_comp.k == 3));
}

void casestudy_andes(CaseStudyResult& out, const std::string& output_dir) {
    RunConfig config = casestudy_config("andes");
    config.output_dir = output_dir;
    out.pipeline = run_pipeline(config);
    const PipelineResult& r = out.pipeline;
    const FlowStage& stage = r.flow.stages[0];
    const bool comp_ok =
        r.flow.response_comp.k == 2 && stage.report.covariate_comp.k == 4;

    // bifurcated linkage: each response cluster explains exactly two
    // covariate sub-blocks, all four loci nearly exclusive
    std::vector<int> owners(2, 0);
    double min_purity = 0.0;
    if (stage.loci.size() == 4) {
        min_purity = 1.0;
        for (const auto& locus : stage.loci) {
            min_purity = std::min(min_purity, locus.purity);
            if (locus.dominant_response_cluster >= 0 && locus.dominant_response_cluster < 2)
                owners[static_cast<size_t>(locus.dominant_response_cluster)]++;
        }
    }
    std::ostringstream purity_table;
    for (const auto& pc : stage.report.per_cluster) {
        long best = 0;
        for (long c : pc.response_label_counts) best = std::max(best, c);
        purity_table << "cluster " << pc.cluster_id << ": size " << pc.size << " purity "
                     << (pc.size > 0 ? static_cast<double>(best) / pc.size : 0.0) << "; ";
    }
    out.checks.push_back(make_bound_check("four loci found", static_cast<double>(stage.loci.size()),
                                          4.0, false, comp_ok, purity_table.str()));
    out.checks.push_back(make_bound_check("each response cluster owns two loci",
                                          owners[0] == 2 && owners[1] == 2 ? 1.0 : 0.0, 1.0,
                                          false, comp_ok, purity_table.str()));
    out.checks.push_back(
        make_bound_check("minimum locus purity", min_purity, 0.95, false, comp_ok,
                         purity_table.str()));
}

void casestudy_stature(CaseStudyResult& out, const std::string& output_dir) {
    RunConfig first = casestudy_config("stature");
    first.output_dir = output_dir;
    out.pipeline = run_pipeline(first);
    const PipelineResult& r1 = out.pipeline;
    const FlowStage& f1 = r1.flow.stages[0];
    const bool comp1 = r1.flow.response_comp.k == 3 && f1.report.covariate_comp.k == 3;

    out.checks.push_back(make_check("overall response entropy",
                                    f1.report.overall_response_entropy, 1.09, 0.05, comp1));
    // the two major clusters, in layout order, against 0.87 and 0.84
    std::vector<const ClusterMatch*> majors;
    for (const auto& pc : f1.report.per_cluster)
        if (pc.cond_entropy > 0.0) majors.push_back(&pc);
    std::sort(majors.begin(), majors.end(),
              [](const ClusterMatch* a, const ClusterMatch* b) { return a->size > b->size; });
    if (comp1 && majors.size() >= 2) {
        const double h_hi = std::max(majors[0]->cond_entropy, majors[1]->cond_entropy);
        const double h_lo = std::min(majors[0]->cond_entropy, majors[1]->cond_entropy);
        out.checks.push_back(make_check("first flow green-dominant cluster entropy", h_hi, 0.87,
                                        0.05, true));
        out.checks.push_back(make_check("first flow mixed cluster entropy", h_lo, 0.84, 0.05));
        out.checks.push_back(make_bound_check("first flow cluster 1 p-value",
                                              majors[0]->p_value.value_or(1.0), 0.02, true));
        out.checks.push_back(make_bound_check("first flow cluster 2 p-value",
                                              majors[1]->p_value.value_or(1.0), 0.02, true));
    } else {
        int sig = 0, nonsig = 0;
        for (const auto& pc : f1.report.per_cluster)
            (pc.p_value.value_or(1.0) <= 0.02 ? sig : nonsig)++;
        out.checks.push_back(make_bound_check("first flow (downgraded): significant cluster exists",
                                              sig >= 1 ? 1.0 : 0.0, 1.0, false, false));
    }

    RunConfig serial = casestudy_config("stature");
    serial.stages = {"1", "2"};
    serial.cov_k = {2, 0};
    const PipelineResult r2 = run_pipeline(serial);
    const FlowStage& s1 = r2.flow.stages[0];
    const bool comp2 = r2.flow.response_comp.k == 3 && s1.report.covariate_comp.k == 2;
    if (comp2) {
        const auto& a = s1.report.per_cluster[0];
        const auto& b = s1.report.per_cluster[1];
        const double h_green = std::max(a.cond_entropy, b.cond_entropy) == a.cond_entropy
                                   ? a.cond_entropy : b.cond_entropy;
        const double h_mix = a.cond_entropy + b.cond_entropy - h_green;
        out.checks.push_back(make_check("serial flow cluster entropy (green)", h_green, 0.94, 0.05));
        out.checks.push_back(make_check("serial flow cluster entropy (mixed)", h_mix, 0.89, 0.05));
        out.checks.push_back(make_bound_check("serial flow cluster 1 p-value",
                                              a.p_value.value_or(1.0), 0.03, true));
        out.checks.push_back(make_bound_check("serial flow cluster 2 p-value",
                                              b.p_value.value_or(1.0), 0.03, true));
    } else {
        int sig = 0;
        for (const auto& pc : s1.report.per_cluster)
            if (pc.p_value.value_or(1.0) <= 0.03) sig++;
        out.checks.push_back(make_bound_check("serial flow (downgraded): significant cluster exists",
                                              sig >= 1 ? 1.0 : 0.0, 1.0, false, false));
    }
}

void casestudy_heart(CaseStudyResult& out, const std::string& output_dir) {
    RunConfig config = casestudy_config("heart");
    config.output_dir = output_dir;
    out.pipeline = run_pipeline(config);
    const PipelineResult& r = out.pipeline;
    const FlowStage& stage = r.flow.stages[0];
    const bool comp_ok = stage.report.covariate_comp.k == 9;

    int significant = 0;
    for (const auto& pc : stage.report.per_cluster)
        if (pc.p_value.value_or(1.0) <= 0.05) significant++;
    out.checks.push_back(make_bound_check(
        "fine-scale clusters significant at the 5% level", static_cast<double>(significant),
        std::ceil(static_cast<double>(stage.report.covariate_comp.k) / 2.0), false, comp_ok));

    // coarse scale box report: 3 conglomerate clusters
    const ClusteringComposition coarse = composition_at(stage.geometry.row_tree, 3);
    MatchReport coarse_report = match_trees(r.flow.response_comp, coarse, config.log_base);
    coarse_report = permutation_pvalues(coarse_report, config.n_sims, config.seed);
    int coarse_sig = 0;
    for (const auto& pc : coarse_report.per_cluster)
        if (pc.p_value.value_or(1.0) <= 0.05) coarse_sig++;
    out.checks.push_back(make_bound_check("coarse-scale significant clusters",
                                          static_cast<double>(coarse_sig), 1.0, false,
                                          coarse.k == 3));
}

} // namespace

} // namespace infoflow
