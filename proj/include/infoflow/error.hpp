#pragma once

#include <stdexcept>
#include <string>

namespace infoflow {

// Every failure the library can raise, one kind per contract violation.
enum class ErrorKind {
    // ingest
    MissingColumn,
    TypeParseError,
    DuplicateFeature,
    EmptyTable,
    UnknownDataset,
    // renorm
    EmptyInput,
    ValueOutsideBins,
    UnmappedLabel,
    NoCodingSource,
    // entropy
    LengthMismatch,
    // trees
    AsymmetricInput,
    NegativeDistance,
    KTooLarge,
    // mechanics
    DimensionTooSmall,
    // flow
    SubjectMismatch,
    EmptyStages,
    UnknownSubject,
    // baseline
    Separation,
    SingularHessian,
    // io / config
    IoError,
    ConfigError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Process exit code the CLI maps this error to: 2 for I/O, 3 for
    // configuration, 1 for anything analytic.
    int exit_code() const noexcept {
        if (kind_ == ErrorKind::IoError) return 2;
        if (kind_ == ErrorKind::ConfigError || kind_ == ErrorKind::UnknownDataset) return 3;
        return 1;
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace infoflow
