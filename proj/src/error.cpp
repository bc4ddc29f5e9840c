#include "infoflow/error.hpp"

namespace infoflow {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::TypeParseError: return "TypeParseError";
        case ErrorKind::DuplicateFeature: return "DuplicateFeature";
        case ErrorKind::EmptyTable: return "EmptyTable";
        case ErrorKind::UnknownDataset: return "UnknownDataset";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::ValueOutsideBins: return "ValueOutsideBins";
        case ErrorKind::UnmappedLabel: return "UnmappedLabel";
        case ErrorKind::NoCodingSource: return "NoCodingSource";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::AsymmetricInput: return "AsymmetricInput";
        case ErrorKind::NegativeDistance: return "NegativeDistance";
        case ErrorKind::KTooLarge: return "KTooLarge";
        case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorKind::SubjectMismatch: return "SubjectMismatch";
        case ErrorKind::EmptyStages: return "EmptyStages";
        case ErrorKind::UnknownSubject: return "UnknownSubject";
        case ErrorKind::Separation: return "Separation";
        case ErrorKind::SingularHessian: return "SingularHessian";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Error";
}

} // namespace infoflow
