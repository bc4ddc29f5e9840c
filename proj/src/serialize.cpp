#include "infoflow/serialize.hpp"

#include "infoflow/error.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace infoflow {

namespace {

using nlohmann::json;

json tree_json(const UltrametricTree& tree) {
    json j;
    j["leaves"] = tree.leaves;
    j["merge_heights"] = tree.merge_heights;
    json levels = json::array();
    for (const auto& level : tree.levels)
        levels.push_back({{"k", level.k}, {"assignment", level.assignment}});
    j["levels"] = levels;
    json merges = json::array();
    for (const auto& m : tree.merges)
        merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}});
    j["merges"] = merges;
    return j;
}

UltrametricTree tree_from(const json& j) {
    UltrametricTree tree;
    tree.leaves = j.at("leaves").get<std::vector<int>>();
    tree.merge_heights = j.at("merge_heights").get<std::vector<double>>();
    for (const auto& level : j.at("levels")) {
        ClusteringComposition comp;
        comp.k = level.at("k").get<int>();
        comp.assignment = level.at("assignment").get<std::vector<int>>();
        tree.levels.push_back(std::move(comp));
    }
    for (const auto& m : j.at("merges"))
        tree.merges.push_back({m.at("left").get<int>(), m.at("right").get<int>(),
                               m.at("height").get<double>()});
    return tree;
}

json histogram_json(const PossiblyGappedHistogram& hist) {
    json bins = json::array();
    for (const auto& b : hist.bins)
        bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    json gaps = json::array();
    for (const auto& g : hist.gaps) gaps.push_back({{"lo", g.lo}, {"hi", g.hi}});
    return json{{"bins", bins}, {"gaps", gaps}, {"source_n", hist.source_n}};
}

PossiblyGappedHistogram histogram_from(const json& j) {
    PossiblyGappedHistogram hist;
    for (const auto& b : j.at("bins"))
        hist.bins.push_back(
            {b.at("lo").get<double>(), b.at("hi").get<double>(), b.at("count").get<long>()});
    for (const auto& g : j.at("gaps"))
        hist.gaps.push_back({g.at("lo").get<double>(), g.at("hi").get<double>()});
    hist.source_n = j.at("source_n").get<long>();
    return hist;
}

json geometry_json(const CouplingGeometry& geom) {
    json j;
    j["row_order"] = geom.row_order;
    j["col_order"] = geom.col_order;
    j["row_tree"] = tree_json(geom.row_tree);
    j["col_tree"] = tree_json(geom.col_tree);
    j["energy_trace"] = geom.energy_trace;
    j["iterations"] = geom.iterations;
    j["row_ids"] = geom.row_ids;
    j["col_names"] = geom.col_names;
    j["matrix"] = geom.matrix;
    return j;
}

} // namespace

std::string histogram_to_json(const PossiblyGappedHistogram& hist) {
    return histogram_json(hist).dump(2) + "\n";
}

PossiblyGappedHistogram histogram_from_json(const std::string& text) {
    return histogram_from(json::parse(text));
}

std::string histograms_to_json(const std::map<std::string, PossiblyGappedHistogram>& hists) {
    json j = json::object();
    for (const auto& [name, hist] : hists) j[name] = histogram_json(hist);
    return j.dump(2) + "\n";
}

std::string coded_matrix_to_json(const DigitalCodedMatrix& mat) {
    json j;
    j["subjects"] = mat.subjects;
    json cols = json::array();
    for (size_t f = 0; f < mat.m(); ++f) {
        const auto& spec = mat.manifest[f];
        json col;
        col["name"] = spec.name;
        col["role"] = to_string(spec.role);
        col["dtype"] = to_string(spec.dtype);
        col["codes"] = mat.columns[f].codes;
        json meanings = json::object();
        for (const auto& [code, meaning] : mat.columns[f].code_meaning) {
            json m;
            if (meaning.bin_range)
                m["bin"] = {{"lo", meaning.bin_range->first}, {"hi", meaning.bin_range->second}};
            if (!meaning.categories.empty()) m["categories"] = meaning.categories;
            meanings[std::to_string(code)] = m;
        }
        col["code_meaning"] = meanings;
        cols.push_back(col);
    }
    j["columns"] = cols;
    return j.dump(2) + "\n";
}

DigitalCodedMatrix coded_matrix_from_json(const std::string& text) {
    const json j = json::parse(text);
    DigitalCodedMatrix mat;
    mat.subjects = j.at("subjects").get<std::vector<std::string>>();
    for (const auto& col : j.at("columns")) {
        FeatureSpec spec;
        spec.name = col.at("name").get<std::string>();
        spec.role = role_from_string(col.at("role").get<std::string>());
        spec.dtype = dtype_from_string(col.at("dtype").get<std::string>());
        mat.manifest.push_back(spec);
        DigitalColumn dc;
        dc.source_feature = spec.name;
        dc.codes = col.at("codes").get<std::vector<int>>();
        for (const auto& [code_str, m] : col.at("code_meaning").items()) {
            CodeMeaning meaning;
            if (m.contains("bin"))
                meaning.bin_range = {m.at("bin").at("lo").get<double>(),
                                     m.at("bin").at("hi").get<double>()};
            if (m.contains("categories"))
                meaning.categories = m.at("categories").get<std::vector<std::string>>();
            dc.code_meaning[std::stoi(code_str)] = std::move(meaning);
        }
        mat.columns.push_back(std::move(dc));
    }
    return mat;
}

std::string coded_matrix_to_csv(const DigitalCodedMatrix& mat) {
    std::ostringstream out;
    out << "id";
    for (const auto& spec : mat.manifest) out << ',' << spec.name;
    out << '\n';
    for (size_t r = 0; r < mat.n(); ++r) {
        out << mat.subjects[r];
        for (size_t f = 0; f < mat.m(); ++f) out << ',' << mat.columns[f].codes[r];
        out << '\n';
    }
    return out.str();
}

std::string entropy_matrix_to_csv(const EntropyMatrix& xi) {
    std::ostringstream out;
    out.precision(12);
    out << "feature";
    for (const auto& name : xi.feature_names) out << ',' << name;
    out << '\n';
    for (int i = 0; i < xi.m; ++i) {
        out << xi.feature_names[static_cast<size_t>(i)];
        for (int j = 0; j < xi.m; ++j) out << ',' << xi.at(i, j);
        out << '\n';
    }
    return out.str();
}

std::string entropy_matrix_meta_json(const EntropyMatrix& xi) {
    return json{{"log_base", to_string(xi.log_base)}, {"m", xi.m}}.dump(2) + "\n";
}

EntropyMatrix entropy_matrix_from_csv(const std::string& csv_text, LogBase base) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) raise(ErrorKind::IoError, "empty entropy matrix CSV");
    EntropyMatrix xi;
    xi.log_base = base;
    {
        std::istringstream hdr(line);
        std::string field;
        bool first = true;
        while (std::getline(hdr, field, ',')) {
            if (!first) xi.feature_names.push_back(field);
            first = false;
        }
    }
    xi.m = static_cast<int>(xi.feature_names.size());
    xi.values.assign(static_cast<size_t>(xi.m) * xi.m, 0.0);
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        int col = -1;
        while (std::getline(ls, field, ',')) {
            if (col >= 0) xi.at(row, col) = std::stod(field);
            col++;
        }
        row++;
    }
    if (row != xi.m) raise(ErrorKind::IoError, "entropy matrix CSV is not square");
    return xi;
}

std::string tree_to_json(const UltrametricTree& tree) { return tree_json(tree).dump(2) + "\n"; }

UltrametricTree tree_from_json(const std::string& text) { return tree_from(json::parse(text)); }

std::string geometry_to_json(const CouplingGeometry& geom) {
    return geometry_json(geom).dump(2) + "\n";
}

CouplingGeometry geometry_from_json(const std::string& text) {
    const json j = json::parse(text);
    CouplingGeometry geom;
    geom.row_order = j.at("row_order").get<std::vector<int>>();
    geom.col_order = j.at("col_order").get<std::vector<int>>();
    geom.row_tree = tree_from(j.at("row_tree"));
    geom.col_tree = tree_from(j.at("col_tree"));
    geom.energy_trace = j.at("energy_trace").get<std::vector<double>>();
    geom.iterations = j.at("iterations").get<int>();
    geom.row_ids = j.at("row_ids").get<std::vector<std::string>>();
    geom.col_names = j.at("col_names").get<std::vector<std::string>>();
    geom.matrix = j.at("matrix").get<std::vector<std::vector<double>>>();
    return geom;
}

std::string geometry_matrix_to_csv(const CouplingGeometry& geom) {
    std::ostringstream out;
    out << "id";
    for (size_t c = 0; c < geom.col_order.size(); ++c)
        out << ','
            << (geom.col_names.empty() ? "c" + std::to_string(geom.col_order[c])
                                       : geom.col_names[static_cast<size_t>(geom.col_order[c])]);
    out << '\n';
    for (size_t r = 0; r < geom.matrix.size(); ++r) {
        out << (geom.row_ids.empty() ? std::to_string(geom.row_order[r])
                                     : geom.row_ids[static_cast<size_t>(geom.row_order[r])]);
        for (double v : geom.matrix[r]) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

std::string groups_to_json(const std::vector<FeatureGroup>& groups) {
    json arr = json::array();
    for (const auto& g : groups)
        arr.push_back({{"group_id", g.group_id},
                       {"members", g.members},
                       {"max_internal_ce", g.max_internal_ce}});
    return arr.dump(2) + "\n";
}

std::vector<FeatureGroup> groups_from_json(const std::string& text) {
    std::vector<FeatureGroup> groups;
    for (const auto& g : json::parse(text)) {
        FeatureGroup group;
        group.group_id = g.at("group_id").get<int>();
        group.members = g.at("members").get<std::vector<std::string>>();
        group.max_internal_ce = g.at("max_internal_ce").get<double>();
        groups.push_back(std::move(group));
    }
    return groups;
}

std::string flow_to_json(const InformationFlow& flow) {
    json j;
    j["seed"] = flow.seed;
    j["subjects"] = flow.subjects;
    j["response_comp"] = {{"k", flow.response_comp.k},
                          {"assignment", flow.response_comp.assignment}};
    j["stage_weights"] = flow.stage_weights;
    j["predictions"] = flow.predictions;
    j["error_rate"] = flow.error_rate;
    json stages = json::array();
    for (size_t s = 0; s < flow.stages.size(); ++s) {
        const auto& stage = flow.stages[s];
        json sj;
        sj["group_id"] = stage.group.group_id;
        sj["features"] = stage.group.members;
        sj["cov_k"] = stage.cov_k;
        sj["overall_response_entropy"] = stage.report.overall_response_entropy;
        sj["weighted_cond_entropy"] = stage.report.weighted_cond_entropy;
        sj["directed_nce"] = stage.report.directed_nce;
        json clusters = json::array();
        for (const auto& c : stage.report.per_cluster) {
            json cj;
            cj["cluster"] = c.cluster_id;
            cj["size"] = c.size;
            cj["response_label_counts"] = c.response_label_counts;
            cj["cond_entropy"] = c.cond_entropy;
            if (c.p_value) cj["p_value"] = *c.p_value;
            clusters.push_back(cj);
        }
        sj["clusters"] = clusters;
        json loci = json::array();
        for (const auto& locus : stage.loci)
            loci.push_back({{"covariate_cluster", locus.covariate_cluster},
                            {"dominant_response_cluster", locus.dominant_response_cluster},
                            {"purity", locus.purity},
                            {"cond_entropy", locus.cond_entropy},
                            {"p_value", locus.p_value}});
        sj["loci"] = loci;
        sj["votes"] = flow.stage_votes[s];
        stages.push_back(sj);
    }
    j["stages"] = stages;
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(ErrorKind::IoError, "cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) raise(ErrorKind::IoError, "short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target, ec);
    if (ec) raise(ErrorKind::IoError, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::IoError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace infoflow
