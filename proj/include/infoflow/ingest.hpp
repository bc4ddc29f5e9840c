#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace infoflow {

enum class FeatureRole { response, covariate };
enum class FeatureDtype { continuous, discrete, binary, categorical };

/// Declared schema for one feature column.
struct FeatureSpec {
    std::string name;
    FeatureRole role = FeatureRole::covariate;
    FeatureDtype dtype = FeatureDtype::continuous;
    // Raw category label -> digital code. Only for binary/categorical.
    std::optional<std::map<std::string, int>> coding_map;
    // Ordered category list; must cover exactly the observed labels.
    std::optional<std::vector<std::string>> ordinal_hint;

    bool is_numeric() const {
        return dtype == FeatureDtype::continuous || dtype == FeatureDtype::discrete;
    }
};

/// One parsed column: numeric features fill `numbers`, label features
/// fill `labels`. Length always equals the subject count.
struct RawColumn {
    std::vector<double> numbers;
    std::vector<std::string> labels;

    size_t size() const { return numbers.empty() ? labels.size() : numbers.size(); }
};

/// Immutable after load; columns follow manifest order, not CSV order.
struct RawTable {
    std::vector<std::string> subjects;
    std::vector<RawColumn> columns;
    std::vector<FeatureSpec> manifest;

    size_t n() const { return subjects.size(); }
    size_t m() const { return manifest.size(); }

    int feature_index(const std::string& name) const; // -1 when absent
    std::vector<std::string> feature_names() const;
    std::vector<int> response_indices() const;
    std::vector<int> covariate_indices() const;
};

/// Parse a manifest file (JSON list of feature entries).
std::vector<FeatureSpec> load_manifest(const std::string& manifest_path);

/// Load a CSV (header row, comma delimiter, quoted fields allowed)
/// against a manifest. Subject ids come from an `id` column when
/// present, else 1-based row numbers.
RawTable load_table(const std::string& csv_path, const std::string& manifest_path);

/// Same, from in-memory text. Used by the builtin fixtures and tests.
RawTable load_table_text(const std::string& csv_text, const std::string& manifest_json);

/// Write a table back out; reloading yields an identical RawTable.
void save_table(const RawTable& table, const std::string& csv_path,
                const std::string& manifest_path);

/// The five vendored case-study fixtures: brain, electricity, andes,
/// stature, heart. See data/PROVENANCE.md for how they were produced.
RawTable builtin_dataset(const std::string& name);
std::vector<std::string> builtin_dataset_names();

const char* to_string(FeatureRole role);
const char* to_string(FeatureDtype dtype);
FeatureRole role_from_string(const std::string& s);
FeatureDtype dtype_from_string(const std::string& s);

} // namespace infoflow
