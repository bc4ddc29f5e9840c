#include "infoflow/renorm.hpp"

#include "infoflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace infoflow {

namespace {

struct Spacing {
    double width;
    size_t left; // index into the distinct-value array
};

// Median of the positive spacings between consecutive distinct values;
// 0 when fewer than two distinct values exist.
double median_positive_spacing(const std::vector<double>& distinct) {
    std::vector<double> widths;
    for (size_t i = 0; i + 1 < distinct.size(); ++i)
        widths.push_back(distinct[i + 1] - distinct[i]);
    if (widths.empty()) return 0.0;
    std::sort(widths.begin(), widths.end());
    const size_t mid = widths.size() / 2;
    return widths.size() % 2 == 1 ? widths[mid] : 0.5 * (widths[mid - 1] + widths[mid]);
}

// Sup-norm distance between the histogram's piecewise-uniform CDF and
// the empirical CDF, evaluated at both sides of every data jump.
double cdf_sup_error(const std::vector<double>& distinct, const std::vector<long>& multiplicity,
                     const PossiblyGappedHistogram& hist) {
    const double n = static_cast<double>(hist.source_n);
    // cumulative counts strictly before each bin
    std::vector<double> cum_before(hist.bins.size(), 0.0);
    double running = 0.0;
    for (size_t b = 0; b < hist.bins.size(); ++b) {
        cum_before[b] = running;
        running += static_cast<double>(hist.bins[b].count);
    }
    auto hist_cdf = [&](double x) {
        if (hist.bins.empty()) return 0.0;
        if (x < hist.bins.front().lo) return 0.0;
        for (size_t b = 0; b < hist.bins.size(); ++b) {
            const auto& bin = hist.bins[b];
            if (x < bin.lo) return cum_before[b] / n; // inside the space before bin b
            if (x < bin.hi || (b + 1 == hist.bins.size() && x <= bin.hi)) {
                const double width = bin.hi - bin.lo;
                const double frac = width > 0.0 ? (x - bin.lo) / width : 1.0;
                return (cum_before[b] + frac * static_cast<double>(bin.count)) / n;
            }
        }
        return 1.0;
    };
    double err = 0.0;
    long seen = 0;
    for (size_t i = 0; i < distinct.size(); ++i) {
        const double before = static_cast<double>(seen) / n;
        seen += multiplicity[i];
        const double after = static_cast<double>(seen) / n;
        const double h = hist_cdf(distinct[i]);
        err = std::max(err, std::abs(h - before));
        err = std::max(err, std::abs(h - after));
    }
    return err;
}

PossiblyGappedHistogram assemble_histogram(const std::vector<double>& distinct,
                                           const std::vector<long>& multiplicity,
                                           const std::vector<size_t>& cuts, // sorted, cut after index
                                           long source_n, double gap_threshold,
                                           double median_spacing) {
    PossiblyGappedHistogram hist;
    hist.source_n = source_n;

    std::vector<size_t> starts{0};
    for (size_t cut : cuts) starts.push_back(cut + 1);
    starts.push_back(distinct.size());

    struct Segment {
        double first, last;
        long count;
    };
    std::vector<Segment> segments;
    for (size_t s = 0; s + 1 < starts.size(); ++s) {
        Segment seg{distinct[starts[s]], distinct[starts[s + 1] - 1], 0};
        for (size_t i = starts[s]; i < starts[s + 1]; ++i) seg.count += multiplicity[i];
        segments.push_back(seg);
    }

    for (size_t s = 0; s < segments.size(); ++s) {
        HistogramBin bin;
        bin.count = segments[s].count;
        if (s == 0) {
            bin.lo = segments[s].first;
        } else {
            const double space = segments[s].first - segments[s - 1].last;
            if (space > gap_threshold) {
                bin.lo = segments[s].first;
            } else {
                bin.lo = 0.5 * (segments[s - 1].last + segments[s].first);
            }
        }
        if (s + 1 == segments.size()) {
            bin.hi = segments[s].last;
        } else {
            const double space = segments[s + 1].first - segments[s].last;
            if (space > gap_threshold) {
                // nudge the right edge past the data so the half-open bin
                // keeps its own maximum; the rest of the space is the gap
                const double pad = std::min(0.5 * median_spacing, 0.25 * space);
                bin.hi = segments[s].last + (pad > 0.0 ? pad : 0.25 * space);
                hist.gaps.push_back({bin.hi, segments[s + 1].first});
            } else {
                bin.hi = 0.5 * (segments[s].last + segments[s + 1].first);
            }
        }
        hist.bins.push_back(bin);
    }

    // all values identical: give the single bin a token width
    if (hist.bins.size() == 1 && hist.bins[0].lo == hist.bins[0].hi) {
        hist.bins[0].lo -= 0.5;
        hist.bins[0].hi += 0.5;
    }
    return hist;
}

} // namespace

int PossiblyGappedHistogram::bin_of(double value) const {
    for (size_t b = 0; b < bins.size(); ++b) {
        const bool last = b + 1 == bins.size();
        if (value >= bins[b].lo && (value < bins[b].hi || (last && value <= bins[b].hi)))
            return static_cast<int>(b);
    }
    return -1;
}

PossiblyGappedHistogram build_gapped_histogram(const std::vector<double>& values, int max_bins,
                                               double gap_factor) {
    if (values.empty()) raise(ErrorKind::EmptyInput, "histogram over empty value vector");
    if (max_bins < 1) raise(ErrorKind::ConfigError, "max_bins must be >= 1");
    if (!(gap_factor > 0.0)) raise(ErrorKind::ConfigError, "gap_factor must be > 0");
    for (double v : values)
        if (!std::isfinite(v)) raise(ErrorKind::TypeParseError, "non-finite value in histogram input");

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct;
    std::vector<long> multiplicity;
    for (double v : sorted) {
        if (!distinct.empty() && v == distinct.back()) {
            multiplicity.back()++;
        } else {
            distinct.push_back(v);
            multiplicity.push_back(1);
        }
    }

    const double med = median_positive_spacing(distinct);
    const double gap_threshold = med > 0.0 ? gap_factor * med : std::numeric_limits<double>::max();

    // spacings sorted widest first; ties broken by position (leftmost first)
    std::vector<Spacing> spacings;
    for (size_t i = 0; i + 1 < distinct.size(); ++i)
        spacings.push_back({distinct[i + 1] - distinct[i], i});
    std::sort(spacings.begin(), spacings.end(), [](const Spacing& a, const Spacing& b) {
        if (a.width != b.width) return a.width > b.width;
        return a.left < b.left;
    });

    const long n = static_cast<long>(values.size());
    const double lambda = 1.0 / std::sqrt(static_cast<double>(n));
    const int k_max = std::min<int>(max_bins, static_cast<int>(distinct.size()));

    PossiblyGappedHistogram best;
    double best_score = std::numeric_limits<double>::max();
    std::vector<size_t> cuts;
    for (int k = 1; k <= k_max; ++k) {
        if (k > 1) {
            const Spacing& next = spacings[static_cast<size_t>(k) - 2];
            if (next.width <= 0.0) break; // no empty interval left to cut
            cuts.push_back(next.left);
        }
        std::vector<size_t> sorted_cuts(cuts);
        std::sort(sorted_cuts.begin(), sorted_cuts.end());
        PossiblyGappedHistogram cand =
            assemble_histogram(distinct, multiplicity, sorted_cuts, n, gap_threshold, med);
        const double score = cdf_sup_error(distinct, multiplicity, cand) + lambda * k;
        if (score < best_score) {
            best_score = score;
            best = std::move(cand);
        }
    }
    return best;
}

DigitalColumn code_continuous(const std::vector<double>& values,
                              const PossiblyGappedHistogram& hist,
                              const std::string& feature_name) {
    DigitalColumn col;
    col.source_feature = feature_name;
    col.codes.reserve(values.size());
    for (double v : values) {
        const int b = hist.bin_of(v);
        if (b < 0)
            raise(ErrorKind::ValueOutsideBins,
                  "value " + std::to_string(v) + " lies in no histogram bin" +
                      (feature_name.empty() ? "" : " (feature '" + feature_name + "')"));
        col.codes.push_back(b);
    }
    for (size_t b = 0; b < hist.bins.size(); ++b) {
        CodeMeaning meaning;
        meaning.bin_range = {hist.bins[b].lo, hist.bins[b].hi};
        col.code_meaning[static_cast<int>(b)] = std::move(meaning);
    }
    return col;
}

DigitalColumn code_categorical(const std::vector<std::string>& values, const FeatureSpec& spec,
                               const DigitalColumn* anchor) {
    if (spec.dtype != FeatureDtype::binary && spec.dtype != FeatureDtype::categorical)
        raise(ErrorKind::ConfigError,
              "code_categorical on non-categorical feature '" + spec.name + "'");
    if (values.empty()) raise(ErrorKind::EmptyInput, "empty label column '" + spec.name + "'");

    std::set<std::string> observed(values.begin(), values.end());
    std::map<std::string, int> mapping;

    if (spec.coding_map) {
        mapping = *spec.coding_map;
        for (const auto& label : observed)
            if (!mapping.count(label))
                raise(ErrorKind::UnmappedLabel,
                      "label '" + label + "' of feature '" + spec.name + "' missing from coding_map");
    } else if (spec.ordinal_hint) {
        const auto& hint = *spec.ordinal_hint;
        std::set<std::string> hinted(hint.begin(), hint.end());
        if (hinted != observed)
            raise(ErrorKind::ConfigError, "ordinal_hint of feature '" + spec.name +
                                              "' does not cover exactly the observed labels");
        // evenly spaced over the 0..9 digital range, hint order
        for (size_t i = 0; i < hint.size(); ++i) {
            const double t = hint.size() == 1
                                 ? 0.0
                                 : 9.0 * static_cast<double>(i) / (static_cast<double>(hint.size()) - 1.0);
            mapping[hint[i]] = static_cast<int>(std::llround(t));
        }
    } else if (anchor != nullptr) {
        // each category takes the rounded mean anchor code of its subjects
        if (anchor->codes.size() != values.size())
            raise(ErrorKind::LengthMismatch, "anchor column length differs from '" + spec.name + "'");
        std::map<std::string, std::pair<double, long>> sums;
        for (size_t i = 0; i < values.size(); ++i) {
            auto& acc = sums[values[i]];
            acc.first += anchor->codes[i];
            acc.second += 1;
        }
        for (const auto& [label, acc] : sums)
            mapping[label] = static_cast<int>(std::llround(acc.first / static_cast<double>(acc.second)));
    } else if (spec.dtype == FeatureDtype::binary &&
               std::all_of(observed.begin(), observed.end(),
                           [](const std::string& l) { return l == "0" || l == "1"; })) {
        mapping = {{"0", 0}, {"1", 5}};
    } else {
        raise(ErrorKind::NoCodingSource, "feature '" + spec.name +
                                             "' has no coding_map, no ordinal_hint and no anchor");
    }

    DigitalColumn col;
    col.source_feature = spec.name;
    col.codes.reserve(values.size());
    for (const auto& label : values) col.codes.push_back(mapping.at(label));
    for (const auto& [label, code] : mapping) {
        if (!observed.count(label)) continue; // keep meanings to observed categories
        col.code_meaning[code].categories.push_back(label);
    }
    return col;
}

namespace {

// Anchor for a categorical column: the coded numeric column with lowest
// mutual conditional entropy against its labels.
const DigitalColumn* pick_anchor(const std::vector<std::string>& labels,
                                 const std::vector<const DigitalColumn*>& numeric_cols,
                                 LogBase base) {
    if (numeric_cols.empty()) return nullptr;
    // relabel strings to dense ints for the entropy call
    std::map<std::string, int> ids;
    std::vector<int> coded;
    coded.reserve(labels.size());
    for (const auto& l : labels) coded.push_back(ids.emplace(l, static_cast<int>(ids.size())).first->second);

    const DigitalColumn* best = nullptr;
    double best_ce = std::numeric_limits<double>::max();
    for (const DigitalColumn* col : numeric_cols) {
        const double ce = mutual_ce(coded, col->codes, base);
        if (ce < best_ce) {
            best_ce = ce;
            best = col;
        }
    }
    return best;
}

} // namespace

DigitalCodedMatrix renormalize_matrix(const RawTable& table, int max_bins, double gap_factor,
                                      LogBase base) {
    DigitalCodedMatrix coded;
    coded.subjects = table.subjects;
    coded.manifest = table.manifest;
    coded.columns.resize(table.m());

    // phase 1: numeric columns (continuous and discrete share the histogram path)
    std::vector<const DigitalColumn*> numeric_cols;
    for (size_t f = 0; f < table.m(); ++f) {
        const FeatureSpec& spec = table.manifest[f];
        if (!spec.is_numeric()) continue;
        try {
            PossiblyGappedHistogram hist =
                build_gapped_histogram(table.columns[f].numbers, max_bins, gap_factor);
            coded.columns[f] = code_continuous(table.columns[f].numbers, hist, spec.name);
        } catch (const Error& e) {
            raise(e.kind(), "feature '" + spec.name + "': " + e.what());
        }
    }
    for (size_t f = 0; f < table.m(); ++f)
        if (table.manifest[f].is_numeric()) numeric_cols.push_back(&coded.columns[f]);

    // phase 2: label columns, anchored when no explicit source exists
    for (size_t f = 0; f < table.m(); ++f) {
        const FeatureSpec& spec = table.manifest[f];
        if (spec.is_numeric()) continue;
        const std::vector<std::string>& labels = table.columns[f].labels;
        const DigitalColumn* anchor = nullptr;
        const bool self_coding =
            spec.coding_map.has_value() || spec.ordinal_hint.has_value() ||
            (spec.dtype == FeatureDtype::binary &&
             std::all_of(labels.begin(), labels.end(),
                         [](const std::string& l) { return l == "0" || l == "1"; }));
        if (!self_coding) anchor = pick_anchor(labels, numeric_cols, base);
        try {
            coded.columns[f] = code_categorical(labels, spec, anchor);
        } catch (const Error& e) {
            raise(e.kind(), "feature '" + spec.name + "': " + e.what());
        }
    }
    return coded;
}

std::map<std::string, PossiblyGappedHistogram> fit_column_histograms(const RawTable& table,
                                                                     int max_bins,
                                                                     double gap_factor) {
    std::map<std::string, PossiblyGappedHistogram> hists;
    for (size_t f = 0; f < table.m(); ++f) {
        const FeatureSpec& spec = table.manifest[f];
        if (!spec.is_numeric()) continue;
        hists[spec.name] = build_gapped_histogram(table.columns[f].numbers, max_bins, gap_factor);
    }
    return hists;
}

int DigitalCodedMatrix::feature_index(const std::string& name) const {
    for (size_t i = 0; i < manifest.size(); ++i)
        if (manifest[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> DigitalCodedMatrix::feature_names() const {
    std::vector<std::string> names;
    names.reserve(manifest.size());
    for (const auto& spec : manifest) names.push_back(spec.name);
    return names;
}

DigitalCodedMatrix DigitalCodedMatrix::submatrix(const std::vector<std::string>& names) const {
    DigitalCodedMatrix out;
    out.subjects = subjects;
    for (const auto& name : names) {
        const int idx = feature_index(name);
        if (idx < 0) raise(ErrorKind::MissingColumn, "feature '" + name + "' not in coded matrix");
        out.columns.push_back(columns[static_cast<size_t>(idx)]);
        out.manifest.push_back(manifest[static_cast<size_t>(idx)]);
    }
    return out;
}

std::vector<int> DigitalCodedMatrix::row_codes(size_t subject_idx) const {
    std::vector<int> row;
    row.reserve(columns.size());
    for (const auto& col : columns) row.push_back(col.codes[subject_idx]);
    return row;
}

std::vector<int> DigitalCodedMatrix::response_indices() const {
    std::vector<int> idx;
    for (size_t i = 0; i < manifest.size(); ++i)
        if (manifest[i].role == FeatureRole::response) idx.push_back(static_cast<int>(i));
    return idx;
}

std::vector<int> DigitalCodedMatrix::covariate_indices() const {
    std::vector<int> idx;
    for (size_t i = 0; i < manifest.size(); ++i)
        if (manifest[i].role == FeatureRole::covariate) idx.push_back(static_cast<int>(i));
    return idx;
}

} // namespace infoflow
