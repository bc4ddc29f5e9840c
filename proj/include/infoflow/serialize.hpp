#pragma once

#include "infoflow/flow.hpp"
#include "infoflow/mechanics.hpp"
#include "infoflow/renorm.hpp"

#include <map>
#include <string>

// Machine-readable export formats shared by the CLI subcommands, the
// golden tests, and the rendering layer. JSON throughout, except matrix
// payloads which travel as CSV.

namespace infoflow {

std::string histogram_to_json(const PossiblyGappedHistogram& hist);
PossiblyGappedHistogram histogram_from_json(const std::string& text);

std::string histograms_to_json(const std::map<std::string, PossiblyGappedHistogram>& hists);

std::string coded_matrix_to_json(const DigitalCodedMatrix& mat);
DigitalCodedMatrix coded_matrix_from_json(const std::string& text);
std::string coded_matrix_to_csv(const DigitalCodedMatrix& mat);

std::string entropy_matrix_to_csv(const EntropyMatrix& xi);
std::string entropy_matrix_meta_json(const EntropyMatrix& xi);
EntropyMatrix entropy_matrix_from_csv(const std::string& csv_text, LogBase base);

std::string tree_to_json(const UltrametricTree& tree);
UltrametricTree tree_from_json(const std::string& text);

std::string geometry_to_json(const CouplingGeometry& geom);
CouplingGeometry geometry_from_json(const std::string& text);
std::string geometry_matrix_to_csv(const CouplingGeometry& geom);

std::string groups_to_json(const std::vector<FeatureGroup>& groups);
std::vector<FeatureGroup> groups_from_json(const std::string& text);

std::string flow_to_json(const InformationFlow& flow);

/// Atomic write: to a temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace infoflow
