#pragma once

#include "infoflow/entropy.hpp"
#include "infoflow/ingest.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace infoflow {

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0; // bins are [lo, hi) except the last, which is closed
    long count = 0;
};

struct HistogramGap {
    double lo = 0.0;
    double hi = 0.0; // open interval strictly between two bins, no data inside
};

/// Histogram whose consecutive bins may be separated by empty intervals
/// ("gaps") reflecting real holes in the data's support.
struct PossiblyGappedHistogram {
    std::vector<HistogramBin> bins;
    std::vector<HistogramGap> gaps;
    long source_n = 0;

    int bin_of(double value) const; // -1 when the value lies in no bin
};

/// What one digital code stands for: a bin range for continuous
/// features, a set of raw labels for coded ones.
struct CodeMeaning {
    std::optional<std::pair<double, double>> bin_range;
    std::vector<std::string> categories;
};

struct DigitalColumn {
    std::vector<int> codes;
    std::map<int, CodeMeaning> code_meaning;
    std::string source_feature;
};

/// The renormalized n x m matrix of digital codes, column order matching
/// the source manifest.
struct DigitalCodedMatrix {
    std::vector<std::string> subjects;
    std::vector<DigitalColumn> columns;
    std::vector<FeatureSpec> manifest;

    size_t n() const { return subjects.size(); }
    size_t m() const { return columns.size(); }

    int feature_index(const std::string& name) const;
    std::vector<std::string> feature_names() const;
    /// Restrict to the named features (keeping given order).
    DigitalCodedMatrix submatrix(const std::vector<std::string>& names) const;
    /// Row of codes for one subject across all columns.
    std::vector<int> row_codes(size_t subject_idx) const;
    std::vector<int> response_indices() const;
    std::vector<int> covariate_indices() const;
};

/// Fit a possibly-gapped histogram to `values`.
///
/// Candidate cut points for k bins are the k-1 widest empty intervals
/// between consecutive sorted values. Each candidate k <= max_bins is
/// scored by sup-norm distance between the piecewise-uniform histogram
/// CDF and the empirical CDF, plus k/sqrt(n); the minimizing k wins.
/// An empty interval wider than gap_factor times the median inter-point
/// spacing is recorded as a gap.
PossiblyGappedHistogram build_gapped_histogram(const std::vector<double>& values,
                                               int max_bins = 10,
                                               double gap_factor = 4.0);

/// Codes = 0-based bin index, monotone in the raw value.
DigitalColumn code_continuous(const std::vector<double>& values,
                              const PossiblyGappedHistogram& hist,
                              const std::string& feature_name = "");

/// Code a binary/categorical column. Priority: explicit coding_map,
/// then ordinal_hint (evenly spaced over [0,9] in hint order), then the
/// default binary map {0->0, 1->5}, then the anchor rule (each category
/// gets the rounded mean anchor code of its subjects).
DigitalColumn code_categorical(const std::vector<std::string>& values,
                               const FeatureSpec& spec,
                               const DigitalColumn* anchor = nullptr);

/// Renormalize every column of a table (algorithm Step 1). Numeric
/// columns first; categorical columns without an explicit coding source
/// are then anchored to the coded non-categorical column with lowest
/// mutual conditional entropy against them.
DigitalCodedMatrix renormalize_matrix(const RawTable& table, int max_bins = 10,
                                      double gap_factor = 4.0,
                                      LogBase base = LogBase::natural);

/// Histograms fitted for each numeric column during renormalization,
/// keyed by feature name (for dumps and rendering).
std::map<std::string, PossiblyGappedHistogram>
fit_column_histograms(const RawTable& table, int max_bins = 10, double gap_factor = 4.0);

} // namespace infoflow
