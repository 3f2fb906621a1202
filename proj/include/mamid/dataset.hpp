#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mamid/matrix.hpp"

namespace mamid {

enum class LabelLevel { binary, category, subcategory };

const char* level_name(LabelLevel level);
LabelLevel level_from_name(const std::string& name);

/// One flow record: numeric feature values (names live on the owning
/// Dataset) plus the three-level label.
struct FlowRecord {
    std::vector<double> values;
    std::string label_binary;       // Normal | Anomaly
    std::string label_category;     // one of 5
    std::string label_subcategory;  // one of 9

    const std::string& label(LabelLevel level) const;
};

/// Flow records sharing one ordered feature-name list.
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<FlowRecord> records;

    std::size_t size() const { return records.size(); }
};

/// Parse diagnostics: cells that failed numeric parsing (stored as NaN).
struct ParseIssue {
    std::size_t row;
    std::string column;
    std::string value;
};

struct LoadResult {
    Dataset dataset;
    std::vector<ParseIssue> issues;
};

/// Reads an IoTID20-shaped CSV (header row; Label / Cat / Sub_Cat label
/// columns). Malformed numeric cells become NaN and are recorded with their
/// row index. Throws SchemaError if a label column is missing, IoError if
/// the file cannot be read.
LoadResult load_csv(const std::string& path);

/// Preprocessed numeric block: every column has >=2 distinct values, no
/// NaN/Inf, all values min-max scaled to [0,1]. Labels ride along so later
/// stages can restart from a persisted matrix.
struct FeatureMatrix {
    std::vector<std::string> column_names;
    Matrix values;
    std::vector<double> scale_min;  // per column, pre-scaling
    std::vector<double> scale_max;
    std::vector<std::string> labels_binary;
    std::vector<std::string> labels_category;
    std::vector<std::string> labels_subcategory;

    std::size_t rows() const { return values.rows(); }
    std::size_t cols() const { return values.cols(); }
    const std::vector<std::string>& labels(LabelLevel level) const;

    /// Undo the min-max scaling for one column value.
    double unscale(std::size_t col, double scaled) const;
};

/// What preprocessing did: dropped columns and sanitization counts.
struct ProvenanceLog {
    std::vector<std::string> dropped_identifiers;       // the 5 listed identifier columns
    std::vector<std::string> dropped_listed_constants;  // the 10 listed constant columns
    std::vector<std::string> dropped_data_constants;    // constant in the given data
    std::vector<std::string> dropped_degenerate;        // no finite values at all
    std::map<std::string, std::size_t> inf_replacements;
    std::map<std::string, std::size_t> nan_replacements;

    std::size_t dropped_count() const {
        return dropped_identifiers.size() + dropped_listed_constants.size() +
               dropped_data_constants.size() + dropped_degenerate.size();
    }
};

/// IoTID20 columns dropped up front: connection identifiers and the fields
/// known to be single-valued across the corpus.
const std::vector<std::string>& identifier_columns();
const std::vector<std::string>& listed_constant_columns();

/// Fitted preprocessing: column selection, Inf->finite-column-max,
/// NaN->column-median, min-max scaling. Fit on one dataset (train), apply
/// to others (test) with the same parameters.
class Preprocessor {
public:
    /// Learns columns to keep, sanitization values and scaling params.
    /// Throws DataError if no usable feature column remains.
    void fit(const Dataset& data);
    FeatureMatrix transform(const Dataset& data) const;
    FeatureMatrix fit_transform(const Dataset& data);

    const ProvenanceLog& provenance() const { return provenance_; }
    bool fitted() const { return !kept_columns_.empty(); }

private:
    std::vector<std::string> kept_columns_;
    std::vector<std::size_t> kept_indices_;
    std::vector<double> inf_substitute_;   // finite column max
    std::vector<double> nan_substitute_;   // column median
    std::vector<double> scale_min_;
    std::vector<double> scale_max_;
    ProvenanceLog provenance_;
};

/// One-shot convenience: fit and transform on the same records.
FeatureMatrix preprocess(const Dataset& data, ProvenanceLog* log = nullptr);

/// Class names (alphabetical), per-class supports.
struct LabelHierarchy {
    LabelLevel level;
    std::vector<std::string> class_names;
    std::vector<std::size_t> counts;

    std::size_t num_classes() const { return class_names.size(); }
    std::size_t index_of(const std::string& name) const;  // throws LabelError
};

/// Builds the hierarchy for a level: class names sorted alphabetically.
LabelHierarchy label_hierarchy(const std::vector<std::string>& labels, LabelLevel level);

/// One-hot label matrix in hierarchy order. With a provided hierarchy,
/// unseen labels raise LabelError with the row index.
Matrix encode_labels(const std::vector<std::string>& labels, const LabelHierarchy& hierarchy);
std::pair<Matrix, LabelHierarchy> encode_labels(const std::vector<std::string>& labels,
                                                LabelLevel level);

/// Collapses a 2-class one-hot matrix to the single 0/1 column used by the
/// sigmoid+BCE pairing (value = membership of class index 1).
Matrix collapse_binary_targets(const Matrix& onehot);

/// Checks that subcategory -> category -> binary is a function (each
/// subcategory maps to exactly one category and binary label, and Normal
/// levels agree). Throws LabelError on violation.
void validate_hierarchy(const Dataset& data);

/// Stratified n-record sample: per-class counts within +-1 of exact
/// proportion; any class with proportion*n >= 0.5 keeps at least one record.
/// Deterministic per seed.
Dataset stratified_subset(const Dataset& data, LabelLevel level, std::size_t n,
                          std::uint64_t seed);

/// Stratified disjoint split; test gets round(test_fraction * n) records.
std::pair<Dataset, Dataset> stratified_split(const Dataset& data, LabelLevel level,
                                             double test_fraction, std::uint64_t seed);

/// Row-subset views of an already-preprocessed matrix.
FeatureMatrix select_rows(const FeatureMatrix& m, const std::vector<std::size_t>& rows);
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split_indices(
    const std::vector<std::string>& labels, double test_fraction, std::uint64_t seed);
std::vector<std::size_t> stratified_subset_indices(const std::vector<std::string>& labels,
                                                   std::size_t n, std::uint64_t seed);

/// Synthetic-data class description: subcategory name (category/binary are
/// derived from the builtin hierarchy), mixing proportion, per-feature
/// Gaussian mean, shared standard deviation.
struct SynthClass {
    std::string subcategory;
    double proportion = 0.0;
    std::vector<double> mean;
    double stddev = 1.0;
};

struct SynthSpec {
    std::vector<std::string> feature_names;
    std::vector<SynthClass> classes;
};

/// IoTID20's nine subcategories with their category and binary parents.
struct SubcategoryInfo {
    std::string subcategory;
    std::string category;
    std::string binary;
};
const std::vector<SubcategoryInfo>& iotid20_hierarchy();

/// Deterministic Gaussian mixture with the IoTID20 label hierarchy.
/// Proportions must sum to 1 (+-1e-9); class counts are within +-1 of
/// proportion * n.
Dataset synth_generate(const SynthSpec& spec, std::size_t n, std::uint64_t seed);

/// Ready-made 9-class spec: IoTID20 subcategory proportions, `dims`
/// features, class means `separation` apart (well separated when
/// separation >> 1).
SynthSpec iotid20_like_synth_spec(std::size_t dims, double separation);

/// Persistence for raw records and preprocessed matrices (CSV with the three
/// label columns appended) and provenance logs (JSON).
void save_dataset_csv(const Dataset& data, const std::string& path);
void save_feature_matrix(const FeatureMatrix& m, const std::string& path);
FeatureMatrix load_feature_matrix(const std::string& path);
void save_provenance(const ProvenanceLog& log,
                     const std::vector<std::pair<std::string, std::pair<double, double>>>& scaling,
                     const std::string& path);

}  // namespace mamid
