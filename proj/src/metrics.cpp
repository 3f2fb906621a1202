#include "mamid/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "mamid/errors.hpp"

namespace mamid {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t n = 0;
    for (const auto& row : counts) {
        for (std::uint64_t c : row) n += c;
    }
    return n;
}

ConfusionMatrix confusion(const std::vector<std::size_t>& predictions,
                          const std::vector<std::size_t>& truth,
                          const std::vector<std::string>& class_names) {
    if (predictions.size() != truth.size()) {
        throw DimensionError("confusion: prediction/truth length mismatch");
    }
    const std::size_t k = class_names.size();
    ConfusionMatrix cm;
    cm.class_names = class_names;
    cm.counts.assign(k, std::vector<std::uint64_t>(k, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= k || predictions[i] >= k) {
            throw InvalidArgumentError("confusion: class index out of range at row " +
                                       std::to_string(i));
        }
        cm.counts[truth[i]][predictions[i]] += 1;
    }
    return cm;
}

namespace {

double ratio_or_zero(double num, double den, bool& zero_div) {
    if (den == 0.0) {
        zero_div = true;  // tp <= den, so this is always 0/0
        return 0.0;
    }
    return num / den;
}

double harmonic_f1(double p, double r) {
    return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

ClassificationReport report(const ConfusionMatrix& cm) {
    const std::size_t k = cm.num_classes();
    if (k == 0) throw InvalidArgumentError("report: empty confusion matrix");
    const double total = static_cast<double>(cm.total());
    if (total == 0.0) throw InvalidArgumentError("report: confusion matrix has no samples");

    ClassificationReport rep;
    rep.total = cm.total();
    rep.per_class.reserve(k);

    double trace = 0.0;
    double ovr_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double tp = static_cast<double>(cm.counts[i][i]);
        double fn = 0.0, fp = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            fn += static_cast<double>(cm.counts[i][j]);
            fp += static_cast<double>(cm.counts[j][i]);
        }
        const double tn = total - tp - fn - fp;
        trace += tp;
        ovr_sum += (tp + tn) / total;

        PerClassMetrics pc;
        pc.name = cm.class_names[i];
        pc.support = static_cast<std::uint64_t>(tp + fn);
        bool zero_div = false;
        pc.precision = ratio_or_zero(tp, tp + fp, zero_div);
        pc.recall = ratio_or_zero(tp, tp + fn, zero_div);
        pc.zero_division = zero_div;
        pc.f1 = harmonic_f1(pc.precision, pc.recall);
        rep.per_class.push_back(std::move(pc));
    }

    rep.accuracy_plain = trace / total;
    rep.accuracy_ovr = ovr_sum / static_cast<double>(k);

    double pm = 0.0, rm = 0.0, pw = 0.0, f1m = 0.0, f1w = 0.0;
    for (const PerClassMetrics& pc : rep.per_class) {
        const double weight = static_cast<double>(pc.support) / total;
        pm += pc.precision;
        rm += pc.recall;
        pw += pc.precision * weight;
        f1m += pc.f1;
        f1w += pc.f1 * weight;
    }
    rep.precision_macro = pm / static_cast<double>(k);
    rep.recall_macro = rm / static_cast<double>(k);
    rep.precision_weighted = pw;
    // Support-weighted recall telescopes to trace/total (support = tp + fn,
    // and 0-support classes contribute 0); computing it that way keeps the
    // identity with plain accuracy exact.
    rep.recall_weighted = trace / total;
    rep.f1_macro_pr = harmonic_f1(rep.precision_macro, rep.recall_macro);
    rep.f1_weighted_pr = harmonic_f1(rep.precision_weighted, rep.recall_weighted);
    rep.f1_macro_std = f1m / static_cast<double>(k);
    rep.f1_weighted_std = f1w;
    return rep;
}

std::string format_report(const ClassificationReport& rep, const std::string& source_name) {
    std::ostringstream out;
    char buf[160];

    out << "Source : " << source_name << "\n";
    std::snprintf(buf, sizeof(buf), "Accuracy : %.6f\n", rep.accuracy_plain);
    out << buf;
    std::snprintf(buf, sizeof(buf), "Accuracy (one-vs-rest mean) : %.6f\n\n", rep.accuracy_ovr);
    out << buf;

    std::snprintf(buf, sizeof(buf), "%-24s %10s %10s %10s %10s\n", "", "Precision", "Recall",
                  "f1-score", "Support");
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-24s %10.6f %10.6f %10.6f %10llu\n", "Macro",
                  rep.precision_macro, rep.recall_macro, rep.f1_macro_std,
                  static_cast<unsigned long long>(rep.total));
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-24s %10.6f %10.6f %10.6f %10llu\n", "Weighted",
                  rep.precision_weighted, rep.recall_weighted, rep.f1_weighted_std,
                  static_cast<unsigned long long>(rep.total));
    out << buf;
    for (const PerClassMetrics& pc : rep.per_class) {
        std::snprintf(buf, sizeof(buf), "%-24s %10.6f %10.6f %10.6f %10llu%s\n",
                      pc.name.c_str(), pc.precision, pc.recall, pc.f1,
                      static_cast<unsigned long long>(pc.support),
                      pc.zero_division ? "  (zero division)" : "");
        out << buf;
    }
    return out.str();
}

}  // namespace mamid
