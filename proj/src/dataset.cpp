#include "mamid/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mamid/errors.hpp"
#include "mamid/rng.hpp"

namespace mamid {

namespace {

const char* kLabelBinaryCol = "Label";
const char* kLabelCategoryCol = "Cat";
const char* kLabelSubcategoryCol = "Sub_Cat";

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t') ++end;
    return *end == '\0';
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

/// Largest-remainder apportionment of n slots over class counts. Any class
/// whose exact quota is >= 0.5 is guaranteed at least one slot.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& counts, std::size_t n) {
    const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (n > total) {
        throw InvalidArgumentError("requested " + std::to_string(n) + " of " +
                                   std::to_string(total) + " records");
    }
    const std::size_t k = counts.size();
    std::vector<double> quota(k);
    std::vector<std::size_t> alloc(k);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
        quota[c] = static_cast<double>(counts[c]) * static_cast<double>(n) /
                   static_cast<double>(total);
        alloc[c] = static_cast<std::size_t>(std::floor(quota[c]));
        assigned += alloc[c];
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return quota[a] - std::floor(quota[a]) > quota[b] - std::floor(quota[b]);
    });
    for (std::size_t i = 0; i < k && assigned < n; ++i) {
        alloc[order[i]] += 1;
        ++assigned;
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (alloc[c] == 0 && quota[c] >= 0.5) {
            std::size_t donor = k;
            for (std::size_t d = 0; d < k; ++d) {
                if (alloc[d] > 1 && (donor == k || alloc[d] > alloc[donor])) donor = d;
            }
            if (donor != k) {
                alloc[donor] -= 1;
                alloc[c] = 1;
            }
        }
    }
    return alloc;
}

std::map<std::string, std::vector<std::size_t>> group_by_label(
    const std::vector<std::string>& labels) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    return groups;
}

}  // namespace

const char* level_name(LabelLevel level) {
    switch (level) {
        case LabelLevel::binary: return "binary";
        case LabelLevel::category: return "category";
        case LabelLevel::subcategory: return "subcategory";
    }
    return "?";
}

LabelLevel level_from_name(const std::string& name) {
    if (name == "binary") return LabelLevel::binary;
    if (name == "category") return LabelLevel::category;
    if (name == "subcategory") return LabelLevel::subcategory;
    throw InvalidArgumentError("unknown label level: " + name);
}

const std::string& FlowRecord::label(LabelLevel level) const {
    switch (level) {
        case LabelLevel::binary: return label_binary;
        case LabelLevel::category: return label_category;
        case LabelLevel::subcategory: return label_subcategory;
    }
    return label_binary;
}

const std::vector<std::string>& FeatureMatrix::labels(LabelLevel level) const {
    switch (level) {
        case LabelLevel::binary: return labels_binary;
        case LabelLevel::category: return labels_category;
        case LabelLevel::subcategory: return labels_subcategory;
    }
    return labels_binary;
}

double FeatureMatrix::unscale(std::size_t col, double scaled) const {
    return scale_min[col] + scaled * (scale_max[col] - scale_min[col]);
}

LoadResult load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty file: " + path);
    const std::vector<std::string> header = split_csv_line(line);

    std::size_t bin_idx = header.size(), cat_idx = header.size(), sub_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == kLabelBinaryCol) bin_idx = i;
        else if (header[i] == kLabelCategoryCol) cat_idx = i;
        else if (header[i] == kLabelSubcategoryCol) sub_idx = i;
    }
    if (bin_idx == header.size()) throw SchemaError("missing label column 'Label' in " + path);
    if (cat_idx == header.size()) throw SchemaError("missing label column 'Cat' in " + path);
    if (sub_idx == header.size()) throw SchemaError("missing label column 'Sub_Cat' in " + path);

    LoadResult result;
    std::vector<std::size_t> feature_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != bin_idx && i != cat_idx && i != sub_idx) {
            feature_cols.push_back(i);
            result.dataset.feature_names.push_back(header[i]);
        }
    }

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw SchemaError("row " + std::to_string(row) + " has " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(header.size()));
        }
        FlowRecord rec;
        rec.values.reserve(feature_cols.size());
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            const std::string& cell = cells[feature_cols[f]];
            double v;
            if (parse_double(cell, v)) {
                rec.values.push_back(v);
            } else {
                rec.values.push_back(std::numeric_limits<double>::quiet_NaN());
                result.issues.push_back({row, result.dataset.feature_names[f], cell});
            }
        }
        rec.label_binary = cells[bin_idx];
        rec.label_category = cells[cat_idx];
        rec.label_subcategory = cells[sub_idx];
        result.dataset.records.push_back(std::move(rec));
        ++row;
    }
    return result;
}

const std::vector<std::string>& identifier_columns() {
    static const std::vector<std::string> cols = {"Flow_ID", "Src_IP", "Dst_IP",
                                                  "Dst_Port", "Protocol"};
    return cols;
}

const std::vector<std::string>& listed_constant_columns() {
    static const std::vector<std::string> cols = {
        "Fwd_PSH_Flags",  "Fwd_URG_Flags",    "Fwd_Byts/b_Avg", "Fwd_Pkts/b_Avg",
        "Fwd_Blk_Rate_Avg", "Bwd_Byts/b_Avg", "Bwd_Pkts/b_Avg", "Bwd_Blk_Rate_Avg",
        "Init_Fwd_Win_Byts", "Fwd_Seg_Size_Min"};
    return cols;
}

void Preprocessor::fit(const Dataset& data) {
    if (data.records.empty()) throw DataError("preprocess: empty input");

    kept_columns_.clear();
    kept_indices_.clear();
    inf_substitute_.clear();
    nan_substitute_.clear();
    scale_min_.clear();
    scale_max_.clear();
    provenance_ = ProvenanceLog{};

    const std::set<std::string> identifiers(identifier_columns().begin(),
                                            identifier_columns().end());
    const std::set<std::string> listed(listed_constant_columns().begin(),
                                       listed_constant_columns().end());

    for (std::size_t col = 0; col < data.feature_names.size(); ++col) {
        const std::string& name = data.feature_names[col];
        if (identifiers.count(name)) {
            provenance_.dropped_identifiers.push_back(name);
            continue;
        }
        if (listed.count(name)) {
            provenance_.dropped_listed_constants.push_back(name);
            continue;
        }

        std::vector<double> finite;
        finite.reserve(data.records.size());
        double fin_min = 0.0, fin_max = 0.0;
        std::size_t n_inf = 0, n_nan = 0;
        for (const FlowRecord& rec : data.records) {
            const double v = rec.values[col];
            if (std::isnan(v)) {
                ++n_nan;
            } else if (std::isinf(v)) {
                ++n_inf;
            } else {
                if (finite.empty()) {
                    fin_min = fin_max = v;
                } else {
                    fin_min = std::min(fin_min, v);
                    fin_max = std::max(fin_max, v);
                }
                finite.push_back(v);
            }
        }
        if (finite.empty()) {
            provenance_.dropped_degenerate.push_back(name);
            continue;
        }
        const double nan_sub = median_of(finite);

        // Distinct check on sanitized values.
        double lo = fin_min, hi = fin_max;
        if (n_nan > 0) {
            lo = std::min(lo, nan_sub);
            hi = std::max(hi, nan_sub);
        }
        if (lo == hi) {
            provenance_.dropped_data_constants.push_back(name);
            continue;
        }

        kept_columns_.push_back(name);
        kept_indices_.push_back(col);
        inf_substitute_.push_back(fin_max);
        nan_substitute_.push_back(nan_sub);
        scale_min_.push_back(lo);
        scale_max_.push_back(hi);
        if (n_inf > 0) provenance_.inf_replacements[name] = n_inf;
        if (n_nan > 0) provenance_.nan_replacements[name] = n_nan;
    }

    if (kept_columns_.empty()) {
        throw DataError("preprocess: no usable feature column remains");
    }
}

FeatureMatrix Preprocessor::transform(const Dataset& data) const {
    if (kept_columns_.empty()) throw InvalidArgumentError("Preprocessor not fitted");

    FeatureMatrix out;
    out.column_names = kept_columns_;
    out.scale_min = scale_min_;
    out.scale_max = scale_max_;
    out.values = Matrix(data.records.size(), kept_columns_.size());
    out.labels_binary.reserve(data.records.size());
    out.labels_category.reserve(data.records.size());
    out.labels_subcategory.reserve(data.records.size());

    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const FlowRecord& rec = data.records[i];
        if (rec.values.size() != data.feature_names.size()) {
            throw DimensionError("record " + std::to_string(i) + " has wrong width");
        }
        double* row = out.values.row_ptr(i);
        for (std::size_t c = 0; c < kept_indices_.size(); ++c) {
            double v = rec.values[kept_indices_[c]];
            if (std::isnan(v)) {
                v = nan_substitute_[c];
            } else if (std::isinf(v)) {
                v = v > 0 ? inf_substitute_[c] : scale_min_[c];
            }
            const double span = scale_max_[c] - scale_min_[c];
            v = (v - scale_min_[c]) / span;
            row[c] = std::clamp(v, 0.0, 1.0);
        }
        out.labels_binary.push_back(rec.label_binary);
        out.labels_category.push_back(rec.label_category);
        out.labels_subcategory.push_back(rec.label_subcategory);
    }
    return out;
}

FeatureMatrix Preprocessor::fit_transform(const Dataset& data) {
    fit(data);
    return transform(data);
}

FeatureMatrix preprocess(const Dataset& data, ProvenanceLog* log) {
    Preprocessor prep;
    FeatureMatrix out = prep.fit_transform(data);
    if (log) *log = prep.provenance();
    return out;
}

std::size_t LabelHierarchy::index_of(const std::string& name) const {
    const auto it = std::lower_bound(class_names.begin(), class_names.end(), name);
    if (it == class_names.end() || *it != name) {
        throw LabelError("unknown " + std::string(level_name(level)) + " label: " + name);
    }
    return static_cast<std::size_t>(it - class_names.begin());
}

LabelHierarchy label_hierarchy(const std::vector<std::string>& labels, LabelLevel level) {
    std::map<std::string, std::size_t> counts;
    for (const std::string& l : labels) counts[l] += 1;
    LabelHierarchy h;
    h.level = level;
    for (const auto& [name, count] : counts) {
        h.class_names.push_back(name);  // std::map iterates alphabetically
        h.counts.push_back(count);
    }
    return h;
}

Matrix encode_labels(const std::vector<std::string>& labels, const LabelHierarchy& hierarchy) {
    Matrix onehot(labels.size(), hierarchy.num_classes());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto it = std::lower_bound(hierarchy.class_names.begin(),
                                         hierarchy.class_names.end(), labels[i]);
        if (it == hierarchy.class_names.end() || *it != labels[i]) {
            throw LabelError("unknown " + std::string(level_name(hierarchy.level)) +
                             " label '" + labels[i] + "' at row " + std::to_string(i));
        }
        onehot(i, static_cast<std::size_t>(it - hierarchy.class_names.begin())) = 1.0;
    }
    return onehot;
}

std::pair<Matrix, LabelHierarchy> encode_labels(const std::vector<std::string>& labels,
                                                LabelLevel level) {
    LabelHierarchy h = label_hierarchy(labels, level);
    return {encode_labels(labels, h), std::move(h)};
}

Matrix collapse_binary_targets(const Matrix& onehot) {
    if (onehot.cols() != 2) {
        throw DimensionError("collapse_binary_targets needs exactly 2 classes, got " +
                             std::to_string(onehot.cols()));
    }
    Matrix col(onehot.rows(), 1);
    for (std::size_t i = 0; i < onehot.rows(); ++i) col(i, 0) = onehot(i, 1);
    return col;
}

void validate_hierarchy(const Dataset& data) {
    std::map<std::string, std::pair<std::string, std::string>> sub_to_parents;
    std::map<std::string, std::string> cat_to_bin;
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const FlowRecord& rec = data.records[i];
        const auto parents = std::make_pair(rec.label_category, rec.label_binary);
        const auto [it, inserted] = sub_to_parents.emplace(rec.label_subcategory, parents);
        if (!inserted && it->second != parents) {
            throw LabelError("subcategory '" + rec.label_subcategory +
                             "' maps to conflicting parents at row " + std::to_string(i));
        }
        const auto [cit, cinserted] = cat_to_bin.emplace(rec.label_category, rec.label_binary);
        if (!cinserted && cit->second != rec.label_binary) {
            throw LabelError("category '" + rec.label_category +
                             "' maps to conflicting binary labels at row " + std::to_string(i));
        }
    }
}

std::vector<std::size_t> stratified_subset_indices(const std::vector<std::string>& labels,
                                                   std::size_t n, std::uint64_t seed) {
    const auto groups = group_by_label(labels);
    std::vector<std::size_t> counts;
    counts.reserve(groups.size());
    for (const auto& [name, members] : groups) counts.push_back(members.size());

    const std::vector<std::size_t> alloc = apportion(counts, n);

    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    std::size_t class_idx = 0;
    for (const auto& [name, members] : groups) {
        std::vector<std::size_t> pool = members;
        Rng class_rng = rng.fork(class_idx);
        class_rng.shuffle(pool);
        chosen.insert(chosen.end(), pool.begin(), pool.begin() + alloc[class_idx]);
        ++class_idx;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split_indices(
    const std::vector<std::string>& labels, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
        throw InvalidArgumentError("test_fraction must be in (0, 1)");
    }
    const std::size_t n = labels.size();
    const std::size_t test_n =
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));

    const std::vector<std::size_t> test_idx = stratified_subset_indices(labels, test_n, seed);
    std::vector<bool> in_test(n, false);
    for (std::size_t i : test_idx) in_test[i] = true;
    std::vector<std::size_t> train_idx;
    train_idx.reserve(n - test_n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!in_test[i]) train_idx.push_back(i);
    }
    return {std::move(train_idx), test_idx};
}

namespace {

std::vector<std::string> labels_at(const Dataset& data, LabelLevel level) {
    std::vector<std::string> out;
    out.reserve(data.size());
    for (const FlowRecord& r : data.records) out.push_back(r.label(level));
    return out;
}

Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.feature_names = data.feature_names;
    out.records.reserve(rows.size());
    for (std::size_t i : rows) out.records.push_back(data.records[i]);
    return out;
}

}  // namespace

Dataset stratified_subset(const Dataset& data, LabelLevel level, std::size_t n,
                          std::uint64_t seed) {
    return take_rows(data, stratified_subset_indices(labels_at(data, level), n, seed));
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& data, LabelLevel level,
                                             double test_fraction, std::uint64_t seed) {
    const auto [train_idx, test_idx] =
        stratified_split_indices(labels_at(data, level), test_fraction, seed);
    return {take_rows(data, train_idx), take_rows(data, test_idx)};
}

FeatureMatrix select_rows(const FeatureMatrix& m, const std::vector<std::size_t>& rows) {
    FeatureMatrix out;
    out.column_names = m.column_names;
    out.scale_min = m.scale_min;
    out.scale_max = m.scale_max;
    out.values = Matrix(rows.size(), m.cols());
    out.labels_binary.reserve(rows.size());
    out.labels_category.reserve(rows.size());
    out.labels_subcategory.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t src = rows[r];
        std::copy(m.values.row_ptr(src), m.values.row_ptr(src) + m.cols(),
                  out.values.row_ptr(r));
        out.labels_binary.push_back(m.labels_binary[src]);
        out.labels_category.push_back(m.labels_category[src]);
        out.labels_subcategory.push_back(m.labels_subcategory[src]);
    }
    return out;
}

const std::vector<SubcategoryInfo>& iotid20_hierarchy() {
    static const std::vector<SubcategoryInfo> h = {
        {"DoS-Synflooding", "DoS", "Anomaly"},
        {"MITM ARP Spoofing", "MITM ARP Spoofing", "Anomaly"},
        {"Mirai-Ackflooding", "Mirai", "Anomaly"},
        {"Mirai-HTTP Flooding", "Mirai", "Anomaly"},
        {"Mirai-Hostbruteforceg", "Mirai", "Anomaly"},
        {"Mirai-UDP Flooding", "Mirai", "Anomaly"},
        {"Normal", "Normal", "Normal"},
        {"Scan Hostport", "Scan", "Anomaly"},
        {"Scan Port OS", "Scan", "Anomaly"},
    };
    return h;
}

Dataset synth_generate(const SynthSpec& spec, std::size_t n, std::uint64_t seed) {
    double prop_sum = 0.0;
    for (const SynthClass& c : spec.classes) prop_sum += c.proportion;
    if (std::abs(prop_sum - 1.0) > 1e-9) {
        throw InvalidArgumentError("class proportions must sum to 1, got " +
                                   fmt_double(prop_sum));
    }
    for (const SynthClass& c : spec.classes) {
        if (c.mean.size() != spec.feature_names.size()) {
            throw DimensionError("class '" + c.subcategory + "' mean has wrong width");
        }
    }

    // Integer pseudo-counts large enough to respect the proportions.
    std::vector<std::size_t> weights;
    weights.reserve(spec.classes.size());
    for (const SynthClass& c : spec.classes) {
        weights.push_back(static_cast<std::size_t>(std::llround(c.proportion * 1e9)));
    }
    std::vector<std::size_t> alloc =
        n == 0 ? std::vector<std::size_t>(spec.classes.size(), 0) : apportion(weights, n);

    Dataset out;
    out.feature_names = spec.feature_names;
    out.records.reserve(n);
    Rng rng(seed);
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const SynthClass& cls = spec.classes[c];
        const SubcategoryInfo* info = nullptr;
        for (const SubcategoryInfo& s : iotid20_hierarchy()) {
            if (s.subcategory == cls.subcategory) {
                info = &s;
                break;
            }
        }
        if (!info) throw LabelError("unknown subcategory in synth spec: " + cls.subcategory);

        Rng class_rng = rng.fork(c);
        for (std::size_t i = 0; i < alloc[c]; ++i) {
            FlowRecord rec;
            rec.values.reserve(cls.mean.size());
            for (double mu : cls.mean) rec.values.push_back(class_rng.gaussian(mu, cls.stddev));
            rec.label_binary = info->binary;
            rec.label_category = info->category;
            rec.label_subcategory = info->subcategory;
            out.records.push_back(std::move(rec));
        }
    }
    rng.shuffle(out.records);
    return out;
}

SynthSpec iotid20_like_synth_spec(std::size_t dims, double separation) {
    if (dims == 0) throw InvalidArgumentError("synth spec needs at least 1 feature");
    static const std::vector<std::pair<const char*, std::size_t>> supports = {
        {"DoS-Synflooding", 59391},      {"MITM ARP Spoofing", 35377},
        {"Mirai-Ackflooding", 55124},    {"Mirai-HTTP Flooding", 55818},
        {"Mirai-Hostbruteforceg", 121181}, {"Mirai-UDP Flooding", 183554},
        {"Normal", 40073},               {"Scan Hostport", 22192},
        {"Scan Port OS", 53073},
    };
    const double total = 625783.0;

    SynthSpec spec;
    for (std::size_t j = 0; j < dims; ++j) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "synth_f%02zu", j);
        spec.feature_names.emplace_back(buf);
    }
    for (std::size_t c = 0; c < supports.size(); ++c) {
        SynthClass cls;
        cls.subcategory = supports[c].first;
        cls.proportion = static_cast<double>(supports[c].second) / total;
        cls.mean.assign(dims, 0.0);
        // Distinct mean per class even when dims < 9: classes sharing an
        // axis sit at different multiples of the separation.
        cls.mean[c % dims] = separation * (1.0 + static_cast<double>(c / dims));
        cls.stddev = 1.0;
        spec.classes.push_back(std::move(cls));
    }
    // Proportions must sum to exactly 1 for validation.
    double sum = 0.0;
    for (const SynthClass& c : spec.classes) sum += c.proportion;
    spec.classes.back().proportion += 1.0 - sum;
    return spec;
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const std::string& name : data.feature_names) out << name << ",";
    out << kLabelBinaryCol << "," << kLabelCategoryCol << "," << kLabelSubcategoryCol << "\n";
    for (const FlowRecord& rec : data.records) {
        for (double v : rec.values) out << fmt_double(v) << ",";
        out << rec.label_binary << "," << rec.label_category << "," << rec.label_subcategory
            << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void save_feature_matrix(const FeatureMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (std::size_t c = 0; c < m.column_names.size(); ++c) {
        out << m.column_names[c] << ",";
    }
    out << kLabelBinaryCol << "," << kLabelCategoryCol << "," << kLabelSubcategoryCol << "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* row = m.values.row_ptr(i);
        for (std::size_t c = 0; c < m.cols(); ++c) out << fmt_double(row[c]) << ",";
        out << m.labels_binary[i] << "," << m.labels_category[i] << ","
            << m.labels_subcategory[i] << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

FeatureMatrix load_feature_matrix(const std::string& path) {
    const LoadResult loaded = load_csv(path);
    if (!loaded.issues.empty()) {
        throw SchemaError("non-numeric cell in preprocessed matrix " + path + " at row " +
                          std::to_string(loaded.issues.front().row));
    }
    FeatureMatrix m;
    m.column_names = loaded.dataset.feature_names;
    m.scale_min.assign(m.column_names.size(), 0.0);
    m.scale_max.assign(m.column_names.size(), 1.0);
    m.values = Matrix(loaded.dataset.size(), m.column_names.size());
    for (std::size_t i = 0; i < loaded.dataset.size(); ++i) {
        const FlowRecord& rec = loaded.dataset.records[i];
        m.values.set_row(i, rec.values);
        m.labels_binary.push_back(rec.label_binary);
        m.labels_category.push_back(rec.label_category);
        m.labels_subcategory.push_back(rec.label_subcategory);
    }
    return m;
}

void save_provenance(const ProvenanceLog& log,
                     const std::vector<std::pair<std::string, std::pair<double, double>>>& scaling,
                     const std::string& path) {
    nlohmann::json j;
    j["dropped_identifiers"] = log.dropped_identifiers;
    j["dropped_listed_constants"] = log.dropped_listed_constants;
    j["dropped_data_constants"] = log.dropped_data_constants;
    j["dropped_degenerate"] = log.dropped_degenerate;
    j["dropped_count"] = log.dropped_count();
    j["inf_replacements"] = log.inf_replacements;
    j["nan_replacements"] = log.nan_replacements;
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& [name, minmax] : scaling) {
        cols.push_back({{"column", name}, {"min", minmax.first}, {"max", minmax.second}});
    }
    j["scaling"] = std::move(cols);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace mamid
