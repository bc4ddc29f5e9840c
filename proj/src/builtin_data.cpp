#include "infoflow/error.hpp"
#include "infoflow/ingest.hpp"

#include "builtin_data.inc"

namespace infoflow {

std::vector<std::string> builtin_dataset_names() {
    return {"brain", "electricity", "andes", "stature", "heart"};
}

RawTable builtin_dataset(const std::string& name) {
    if (name == "brain") return load_table_text(builtin::brain_csv, builtin::brain_manifest);
    if (name == "electricity")
        return load_table_text(builtin::electricity_csv, builtin::electricity_manifest);
    if (name == "andes") return load_table_text(builtin::andes_csv, builtin::andes_manifest);
    if (name == "stature")
        return load_table_text(builtin::stature_csv, builtin::stature_manifest);
    if (name == "heart") return load_table_text(builtin::heart_csv, builtin::heart_manifest);
    raise(ErrorKind::UnknownDataset,
          "'" + name + "' is not a builtin dataset (brain, electricity, andes, stature, heart)");
}

} // namespace infoflow
