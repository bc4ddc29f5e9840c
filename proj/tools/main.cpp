// infoflow: discover and confirm information flows from response
// dependency to covariate dependency in mixed-type data matrices.

#include "infoflow/error.hpp"
#include "infoflow/pipeline.hpp"
#include "infoflow/render.hpp"
#include "infoflow/serialize.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace {

using namespace infoflow;

std::string output_dir_override(const std::string& given) {
    if (!given.empty()) return given;
    const char* env = std::getenv("INFOFLOW_OUTPUT_DIR");
    return env ? env : "";
}

struct CommonOpts {
    std::string dataset, csv, manifest, out;
    std::string log_base = "natural";
    int max_bins = 10;
    double gap_factor = 4.0;
    int scale_count = 6;
    uint64_t seed = 20170220;

    void attach(CLI::App* cmd, bool with_out = true) {
        cmd->add_option("--dataset", dataset, "builtin dataset name");
        cmd->add_option("--csv", csv, "CSV input path");
        cmd->add_option("--manifest", manifest, "feature manifest path (JSON)");
        if (with_out) cmd->add_option("--out", out, "output directory");
        cmd->add_option("--log-base", log_base, "entropy log base: natural|two");
        cmd->add_option("--max-bins", max_bins, "histogram bin cap");
        cmd->add_option("--gap-factor", gap_factor, "gap width threshold, in median spacings");
        cmd->add_option("--scale-count", scale_count, "tree levels to keep per tree");
        cmd->add_option("--seed", seed, "master random seed");
    }

    RawTable load() const {
        if (!dataset.empty()) return builtin_dataset(dataset);
        if (csv.empty() || manifest.empty())
            raise(ErrorKind::ConfigError, "need --dataset or both --csv and --manifest");
        return load_table(csv, manifest);
    }
};

int cmd_ingest_check(const CommonOpts& opts) {
    const RawTable table = opts.load();
    std::cout << "ok: " << table.n() << " subjects x " << table.m() << " features\n";
    for (const auto& spec : table.manifest)
        std::cout << "  " << spec.name << " (" << to_string(spec.role) << ", "
                  << to_string(spec.dtype) << ")\n";
    return 0;
}

int cmd_renorm(const CommonOpts& opts) {
    const RawTable table = opts.load();
    const DigitalCodedMatrix coded =
        renormalize_matrix(table, opts.max_bins, opts.gap_factor,
                           log_base_from_string(opts.log_base));
    const auto hists = fit_column_histograms(table, opts.max_bins, opts.gap_factor);
    const std::string dir = output_dir_override(opts.out);
    if (dir.empty()) {
        std::cout << coded_matrix_to_csv(coded);
    } else {
        namespace fs = std::filesystem;
        write_file_atomic((fs::path(dir) / "coded.json").string(), coded_matrix_to_json(coded));
        write_file_atomic((fs::path(dir) / "coded.csv").string(), coded_matrix_to_csv(coded));
        write_file_atomic((fs::path(dir) / "histograms.json").string(), histograms_to_json(hists));
        std::cout << "wrote coded matrix and histograms to " << dir << "\n";
    }
    return 0;
}

int cmd_xi(const CommonOpts& opts, const std::string& side) {
    const RawTable table = opts.load();
    const LogBase base = log_base_from_string(opts.log_base);
    const DigitalCodedMatrix coded =
        renormalize_matrix(table, opts.max_bins, opts.gap_factor, base);
    std::vector<int> idx;
    if (side == "response") idx = coded.response_indices();
    else if (side == "covariate") idx = coded.covariate_indices();
    else
        for (size_t i = 0; i < coded.m(); ++i) idx.push_back(static_cast<int>(i));
    std::vector<std::vector<int>> cols;
    std::vector<std::string> names;
    for (int i : idx) {
        cols.push_back(coded.columns[static_cast<size_t>(i)].codes);
        names.push_back(coded.manifest[static_cast<size_t>(i)].name);
    }
    const EntropyMatrix xi = entropy_matrix(cols, names, base);
    const std::string dir = output_dir_override(opts.out);
    if (dir.empty()) {
        std::cout << entropy_matrix_to_csv(xi);
    } else {
        namespace fs = std::filesystem;
        write_file_atomic((fs::path(dir) / ("xi_" + side + ".csv")).string(),
                          entropy_matrix_to_csv(xi));
        write_file_atomic((fs::path(dir) / ("xi_" + side + ".meta.json")).string(),
                          entropy_matrix_meta_json(xi));
        std::cout << "wrote xi_" << side << ".csv to " << dir << "\n";
    }
    return 0;
}

int cmd_tree(const std::string& xi_csv, const std::string& log_base, int scale_count,
             uint64_t seed, double ce_threshold, const std::string& out) {
    const EntropyMatrix xi =
        entropy_matrix_from_csv(read_file(xi_csv), log_base_from_string(log_base));
    const UltrametricTree tree = build_ultrametric_tree(
        xi.values, static_cast<size_t>(xi.m), scale_count, seed);
    const auto groups = synergistic_groups(xi, tree, ce_threshold);
    const std::string dir = output_dir_override(out);
    if (dir.empty()) {
        std::cout << tree_to_json(tree) << groups_to_json(groups);
    } else {
        namespace fs = std::filesystem;
        write_file_atomic((fs::path(dir) / "tree.json").string(), tree_to_json(tree));
        write_file_atomic((fs::path(dir) / "groups.json").string(), groups_to_json(groups));
        std::cout << "wrote tree.json and groups.json to " << dir << "\n";
    }
    return 0;
}

int cmd_dm(const CommonOpts& opts, const std::vector<std::string>& features, int max_iter) {
    const RawTable table = opts.load();
    DigitalCodedMatrix coded = renormalize_matrix(table, opts.max_bins, opts.gap_factor,
                                                  log_base_from_string(opts.log_base));
    if (!features.empty()) coded = coded.submatrix(features);
    const CouplingGeometry geom =
        data_mechanics(coded, max_iter, opts.scale_count, opts.seed);
    const std::string dir = output_dir_override(opts.out);
    if (dir.empty()) {
        std::cout << geometry_to_json(geom);
    } else {
        namespace fs = std::filesystem;
        write_file_atomic((fs::path(dir) / "geometry.json").string(), geometry_to_json(geom));
        write_file_atomic((fs::path(dir) / "geometry.csv").string(),
                          geometry_matrix_to_csv(geom));
        render_geometry(geom, std::min<int>(4, static_cast<int>(geom.row_order.size())),
                        std::min<int>(2, static_cast<int>(geom.col_order.size())), std::nullopt,
                        (fs::path(dir) / "geometry.svg").string());
        std::cout << "wrote geometry exports to " << dir << "\n";
    }
    return 0;
}

RunConfig build_config(const CommonOpts& opts, int resp_k, const std::string& cov_k,
                       const std::string& stages, const std::string& resp_features,
                       double ce_threshold, double purity, int n_sims, int max_iter) {
    RunConfig config;
    config.dataset = opts.dataset;
    config.csv_path = opts.csv;
    config.manifest_path = opts.manifest;
    config.log_base = log_base_from_string(opts.log_base);
    config.max_bins = opts.max_bins;
    config.gap_factor = opts.gap_factor;
    config.scale_count = opts.scale_count;
    config.seed = opts.seed;
    config.resp_k = resp_k;
    config.ce_threshold = ce_threshold;
    config.purity_threshold = purity;
    config.n_sims = n_sims;
    config.max_iter = max_iter;
    config.output_dir = output_dir_override(opts.out);
    if (!cov_k.empty()) {
        config.cov_k.clear();
        std::istringstream in(cov_k);
        std::string tok;
        while (std::getline(in, tok, ',')) config.cov_k.push_back(std::stoi(tok));
    }
    if (!stages.empty()) {
        config.stages.clear();
        std::istringstream in(stages);
        std::string tok;
        while (std::getline(in, tok, ',')) config.stages.push_back(tok);
    }
    if (!resp_features.empty()) {
        config.resp_features.clear();
        std::istringstream in(resp_features);
        std::string tok;
        while (std::getline(in, tok, ',')) config.resp_features.push_back(tok);
    }
    return config;
}

int cmd_pipeline(const RunConfig& config) {
    const PipelineResult result = run_pipeline(config);
    std::cout << "pipeline complete: " << result.table.n() << " subjects, "
              << result.covariate_groups.size() << " covariate groups, "
              << result.flow.stages.size() << " stages, flow error rate "
              << result.flow.error_rate << "\n";
    for (size_t s = 0; s < result.flow.stages.size(); ++s) {
        const auto& stage = result.flow.stages[s];
        std::cout << "  stage " << (s + 1) << " (group#" << stage.group.group_id
                  << ", k=" << stage.report.covariate_comp.k
                  << "): H(resp|cov)=" << stage.report.weighted_cond_entropy << ", "
                  << stage.loci.size() << " loci\n";
    }
    if (!config.output_dir.empty())
        std::cout << "artifacts in " << config.output_dir << "\n";
    return 0;
}

int cmd_casestudy(const std::string& name, const std::string& out) {
    const CaseStudyResult result = run_casestudy(name, output_dir_override(out));
    std::cout << result.summary_text;
    return result.all_passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"information-flow discovery on mixed-type data matrices"};
    app.require_subcommand(1);

    CommonOpts ingest_opts, renorm_opts, xi_opts, dm_opts, pipe_opts, flow_opts;

    auto* ingest = app.add_subcommand("ingest-check", "validate a CSV against its manifest");
    ingest_opts.attach(ingest, false);

    auto* renorm = app.add_subcommand("renorm", "digital re-normalization of every feature");
    renorm_opts.attach(renorm);

    auto* xi = app.add_subcommand("xi", "mutual conditional-entropy matrix");
    std::string xi_side = "covariate";
    xi->add_option("--side", xi_side, "response|covariate|all");
    xi_opts.attach(xi);

    auto* tree = app.add_subcommand("tree", "ultrametric tree + synergistic groups from a xi CSV");
    std::string tree_xi, tree_base = "natural", tree_out;
    int tree_scales = 6;
    uint64_t tree_seed = 20170220;
    double tree_ce = 0.5;
    tree->add_option("--xi", tree_xi, "xi matrix CSV path")->required();
    tree->add_option("--log-base", tree_base, "natural|two");
    tree->add_option("--scale-count", tree_scales, "tree levels to keep");
    tree->add_option("--seed", tree_seed, "seed");
    tree->add_option("--ce-threshold", tree_ce, "synergistic group threshold");
    tree->add_option("--out", tree_out, "output directory");

    auto* dm = app.add_subcommand("dm", "data mechanics seriation of a feature submatrix");
    std::string dm_features;
    int dm_max_iter = 10;
    dm_opts.attach(dm);
    dm->add_option("--features", dm_features, "comma-separated feature names (default: all)");
    dm->add_option("--max-iter", dm_max_iter, "iteration cap");

    auto* flowc = app.add_subcommand("flow", "single categorical-pattern-matching flow");
    int flow_resp_k = 0, flow_n_sims = 1000, flow_max_iter = 10;
    std::string flow_cov_k, flow_stages = "all", flow_resp_features;
    double flow_ce = 0.5, flow_purity = 0.95;
    flow_opts.attach(flowc);
    flowc->add_option("--resp-k", flow_resp_k, "response clusters (0 = auto)");
    flowc->add_option("--cov-k", flow_cov_k, "covariate clusters per stage, comma separated");
    flowc->add_option("--serial", flow_stages, "stage plan: 'all' or group ids like 2,3,1,4");
    flowc->add_option("--resp-feature", flow_resp_features,
                      "restrict the response side to these features");
    flowc->add_option("--ce-threshold", flow_ce, "synergistic group threshold");
    flowc->add_option("--purity", flow_purity, "knowledge locus purity threshold");
    flowc->add_option("--n-sims", flow_n_sims, "permutation draws per cluster");
    flowc->add_option("--max-iter", flow_max_iter, "data mechanics iteration cap");

    auto* pipe = app.add_subcommand("pipeline", "run steps 1-5 end to end");
    int pipe_resp_k = 0, pipe_n_sims = 1000, pipe_max_iter = 10;
    std::string pipe_cov_k, pipe_stages = "all", pipe_resp_features;
    double pipe_ce = 0.5, pipe_purity = 0.95;
    pipe_opts.attach(pipe);
    pipe->add_option("--resp-k", pipe_resp_k, "response clusters (0 = auto)");
    pipe->add_option("--cov-k", pipe_cov_k, "covariate clusters per stage, comma separated");
    pipe->add_option("--serial", pipe_stages, "stage plan: 'all' or group ids like 2,3,1,4");
    pipe->add_option("--resp-feature", pipe_resp_features,
                     "restrict the response side to these features");
    pipe->add_option("--ce-threshold", pipe_ce, "synergistic group threshold");
    pipe->add_option("--purity", pipe_purity, "knowledge locus purity threshold");
    pipe->add_option("--n-sims", pipe_n_sims, "permutation draws per cluster");
    pipe->add_option("--max-iter", pipe_max_iter, "data mechanics iteration cap");

    auto* study = app.add_subcommand("casestudy", "run a vendored case study with its checks");
    std::string study_name, study_out;
    study->add_option("name", study_name, "brain|electricity|andes|stature|heart")->required();
    study->add_option("--out", study_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(ingest)) return cmd_ingest_check(ingest_opts);
        if (app.got_subcommand(renorm)) return cmd_renorm(renorm_opts);
        if (app.got_subcommand(xi)) return cmd_xi(xi_opts, xi_side);
        if (app.got_subcommand(tree))
            return cmd_tree(tree_xi, tree_base, tree_scales, tree_seed, tree_ce, tree_out);
        if (app.got_subcommand(dm)) {
            std::vector<std::string> features;
            if (!dm_features.empty()) {
                std::istringstream in(dm_features);
                std::string tok;
                while (std::getline(in, tok, ',')) features.push_back(tok);
            }
            return cmd_dm(dm_opts, features, dm_max_iter);
        }
        if (app.got_subcommand(flowc))
            return cmd_pipeline(build_config(flow_opts, flow_resp_k, flow_cov_k, flow_stages,
                                             flow_resp_features, flow_ce, flow_purity,
                                             flow_n_sims, flow_max_iter));
        if (app.got_subcommand(pipe))
            return cmd_pipeline(build_config(pipe_opts, pipe_resp_k, pipe_cov_k, pipe_stages,
                                             pipe_resp_features, pipe_ce, pipe_purity,
                                             pipe_n_sims, pipe_max_iter));
        if (app.got_subcommand(study)) return cmd_casestudy(study_name, study_out);
    } catch (const infoflow::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
