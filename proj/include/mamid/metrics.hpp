#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mamid {

/// k x k count matrix; entry (t, p) counts samples of true class t predicted
/// as class p.
struct ConfusionMatrix {
    std::vector<std::string> class_names;
    std::vector<std::vector<std::uint64_t>> counts;

    std::size_t num_classes() const { return class_names.size(); }
    std::uint64_t total() const;
};

ConfusionMatrix confusion(const std::vector<std::size_t>& predictions,
                          const std::vector<std::size_t>& truth,
                          const std::vector<std::string>& class_names);

struct PerClassMetrics {
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
    bool zero_division = false;  // precision or recall hit 0/0 (reported as 0)
};

/// Both metric families: the one-vs-rest forms (mean OvR accuracy; harmonic
/// mean of the averaged precision/recall) and the conventional ones
/// (trace/total accuracy; averaged per-class F1).
struct ClassificationReport {
    std::vector<PerClassMetrics> per_class;
    std::uint64_t total = 0;

    double accuracy_plain = 0.0;  // trace / total
    double accuracy_ovr = 0.0;    // mean over classes of (TP_i+TN_i)/total

    double precision_macro = 0.0;
    double precision_weighted = 0.0;
    double recall_macro = 0.0;
    double recall_weighted = 0.0;  // equals accuracy_plain for any matrix

    double f1_macro_pr = 0.0;       // 2*Pm*Rm/(Pm+Rm)
    double f1_macro_std = 0.0;      // mean of per-class F1
    double f1_weighted_pr = 0.0;    // 2*Pw*Rw/(Pw+Rw)
    double f1_weighted_std = 0.0;   // support-weighted mean of per-class F1
};

/// Throws InvalidArgumentError on an empty matrix. 0/0 ratios become 0 with
/// the per-class zero_division flag set.
ClassificationReport report(const ConfusionMatrix& cm);

/// Table-shaped text: accuracy header, then Macro / Weighted / per-class rows
/// with precision, recall, f1-score and support columns.
std::string format_report(const ClassificationReport& rep, const std::string& source_name);

}  // namespace mamid
