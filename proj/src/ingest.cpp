#include "infoflow/ingest.hpp"

#include "infoflow/error.hpp"
#include "infoflow/serialize.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace infoflow {

namespace {

using nlohmann::json;

// RFC-4180-ish: quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_number(const std::string& raw, const std::string& feature, size_t row) {
    const std::string s = trim(raw);
    if (s.empty())
        raise(ErrorKind::TypeParseError,
              "empty value in numeric column '" + feature + "' at row " + std::to_string(row));
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        raise(ErrorKind::TypeParseError, "non-numeric value '" + s + "' in column '" + feature +
                                             "' at row " + std::to_string(row));
    return v;
}

FeatureSpec spec_from_json(const json& j) {
    FeatureSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.role = role_from_string(j.at("role").get<std::string>());
    spec.dtype = dtype_from_string(j.at("dtype").get<std::string>());
    if (j.contains("coding_map")) {
        if (spec.dtype != FeatureDtype::binary && spec.dtype != FeatureDtype::categorical)
            raise(ErrorKind::ConfigError,
                  "coding_map on non-categorical feature '" + spec.name + "'");
        std::map<std::string, int> cm;
        for (const auto& [label, code] : j.at("coding_map").items())
            cm[label] = code.get<int>();
        spec.coding_map = std::move(cm);
    }
    if (j.contains("ordinal_hint"))
        spec.ordinal_hint = j.at("ordinal_hint").get<std::vector<std::string>>();
    return spec;
}

json spec_to_json(const FeatureSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["role"] = to_string(spec.role);
    j["dtype"] = to_string(spec.dtype);
    if (spec.coding_map) {
        json cm = json::object();
        for (const auto& [label, code] : *spec.coding_map) cm[label] = code;
        j["coding_map"] = cm;
    }
    if (spec.ordinal_hint) j["ordinal_hint"] = *spec.ordinal_hint;
    return j;
}

std::vector<FeatureSpec> manifest_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrorKind::ConfigError, std::string("manifest is not valid JSON: ") + e.what());
    }
    const json& features = j.is_array() ? j : j.at("features");
    std::vector<FeatureSpec> manifest;
    std::set<std::string> seen;
    for (const auto& entry : features) {
        FeatureSpec spec = spec_from_json(entry);
        if (!seen.insert(spec.name).second)
            raise(ErrorKind::DuplicateFeature, "feature '" + spec.name + "' declared twice");
        manifest.push_back(std::move(spec));
    }
    if (manifest.empty()) raise(ErrorKind::ConfigError, "manifest declares no features");
    return manifest;
}

} // namespace

int RawTable::feature_index(const std::string& name) const {
    for (size_t i = 0; i < manifest.size(); ++i)
        if (manifest[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> RawTable::feature_names() const {
    std::vector<std::string> names;
    names.reserve(manifest.size());
    for (const auto& spec : manifest) names.push_back(spec.name);
    return names;
}

std::vector<int> RawTable::response_indices() const {
    std::vector<int> idx;
    for (size_t i = 0; i < manifest.size(); ++i)
        if (manifest[i].role == FeatureRole::response) idx.push_back(static_cast<int>(i));
    return idx;
}

std::vector<int> RawTable::covariate_indices() const {
    std::vector<int> idx;
    for (size_t i = 0; i < manifest.size(); ++i)
        if (manifest[i].role == FeatureRole::covariate) idx.push_back(static_cast<int>(i));
    return idx;
}

std::vector<FeatureSpec> load_manifest(const std::string& manifest_path) {
    return manifest_from_json_text(read_file(manifest_path));
}

RawTable load_table_text(const std::string& csv_text, const std::string& manifest_json) {
    std::vector<FeatureSpec> manifest = manifest_from_json_text(manifest_json);

    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) raise(ErrorKind::EmptyTable, "CSV has no header row");
    const std::vector<std::string> header = split_csv_line(line);

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            raise(ErrorKind::TypeParseError,
                  "row " + std::to_string(rows.size() + 1) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(header.size()));
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) raise(ErrorKind::EmptyTable, "CSV has a header but no data rows");

    // map manifest feature -> CSV column
    std::vector<size_t> csv_col(manifest.size());
    for (size_t f = 0; f < manifest.size(); ++f) {
        auto it = std::find(header.begin(), header.end(), manifest[f].name);
        if (it == header.end())
            raise(ErrorKind::MissingColumn,
                  "manifest feature '" + manifest[f].name + "' not found in CSV header");
        csv_col[f] = static_cast<size_t>(it - header.begin());
    }

    RawTable table;
    table.manifest = std::move(manifest);

    // subject ids: explicit `id` column when present, else 1-based row number
    auto id_it = std::find(header.begin(), header.end(), "id");
    const int id_col = id_it == header.end() ? -1 : static_cast<int>(id_it - header.begin());
    table.subjects.reserve(rows.size());
    for (size_t r = 0; r < rows.size(); ++r)
        table.subjects.push_back(id_col >= 0 ? trim(rows[r][static_cast<size_t>(id_col)])
                                             : std::to_string(r + 1));

    table.columns.resize(table.manifest.size());
    for (size_t f = 0; f < table.manifest.size(); ++f) {
        const FeatureSpec& spec = table.manifest[f];
        RawColumn& col = table.columns[f];
        for (size_t r = 0; r < rows.size(); ++r) {
            const std::string raw = trim(rows[r][csv_col[f]]);
            if (raw.empty())
                raise(ErrorKind::TypeParseError, "missing value in column '" + spec.name +
                                                     "' at row " + std::to_string(r + 1));
            if (spec.is_numeric())
                col.numbers.push_back(parse_number(raw, spec.name, r + 1));
            else
                col.labels.push_back(raw);
        }
    }
    return table;
}

RawTable load_table(const std::string& csv_path, const std::string& manifest_path) {
    return load_table_text(read_file(csv_path), read_file(manifest_path));
}

void save_table(const RawTable& table, const std::string& csv_path,
                const std::string& manifest_path) {
    std::ostringstream csv;
    csv << "id";
    for (const auto& spec : table.manifest) csv << ',' << spec.name;
    csv << '\n';
    for (size_t r = 0; r < table.n(); ++r) {
        csv << table.subjects[r];
        for (size_t f = 0; f < table.m(); ++f) {
            csv << ',';
            if (table.manifest[f].is_numeric()) {
                std::ostringstream num;
                num.precision(17);
                num << table.columns[f].numbers[r];
                csv << num.str();
            } else {
                csv << table.columns[f].labels[r];
            }
        }
        csv << '\n';
    }
    write_file_atomic(csv_path, csv.str());

    json features = json::array();
    for (const auto& spec : table.manifest) features.push_back(spec_to_json(spec));
    write_file_atomic(manifest_path, json{{"features", features}}.dump(2) + "\n");
}

const char* to_string(FeatureRole role) {
    return role == FeatureRole::response ? "response" : "covariate";
}

const char* to_string(FeatureDtype dtype) {
    switch (dtype) {
        case FeatureDtype::continuous: return "continuous";
        case FeatureDtype::discrete: return "discrete";
        case FeatureDtype::binary: return "binary";
        case FeatureDtype::categorical: return "categorical";
    }
    return "continuous";
}

FeatureRole role_from_string(const std::string& s) {
    if (s == "response") return FeatureRole::response;
    if (s == "covariate") return FeatureRole::covariate;
    raise(ErrorKind::ConfigError, "unknown feature role '" + s + "'");
}

FeatureDtype dtype_from_string(const std::string& s) {
    if (s == "continuous") return FeatureDtype::continuous;
    if (s == "discrete") return FeatureDtype::discrete;
    if (s == "binary") return FeatureDtype::binary;
    if (s == "categorical") return FeatureDtype::categorical;
    raise(ErrorKind::ConfigError, "unknown feature dtype '" + s + "'");
}

} // namespace infoflow
