#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mamid/matrix.hpp"

namespace mamid {

/// Batch predictor: n x d feature rows in, n x n_outputs rows out.
using PredictFn = std::function<Matrix(const Matrix&)>;

/// Attribution of one instance: shap(feature, output_class) plus the
/// per-class base value (expected model output over the background set).
struct Attribution {
    Matrix shap;                     // d x n_outputs
    std::vector<double> base_value;  // n_outputs
    std::vector<double> prediction;  // n_outputs, f(instance)
    bool regularized = false;        // WLS system was singular, ridge applied
};

struct KernelShapOptions {
    /// Coalition budget when sampling; ignored under full enumeration.
    std::size_t n_coalition_samples = 2048;
    /// Full enumeration whenever the explained-feature count is <= this.
    std::size_t full_enumeration_limit = 12;
    std::uint64_t seed = 0;
    /// Explain only these feature indices (empty = all). Features outside
    /// the subset keep the instance's own values in every coalition.
    std::vector<std::size_t> feature_subset;
};

/// Kernel SHAP for one instance: solves the Shapley-kernel-weighted least
/// squares over coalitions, marginalizing missing features by background
/// averaging. The efficiency identity base + sum(shap) = f(x) holds by
/// construction (the constraint is eliminated, not penalized).
Attribution kernel_shap(const PredictFn& model, const Matrix& background,
                        const std::vector<double>& instance, const KernelShapOptions& opts);

/// Attributions for many instances plus the shared metadata the report
/// writers need.
struct AttributionReport {
    std::vector<std::string> feature_names;
    std::vector<std::size_t> explained_features;  // indices into feature_names
    std::vector<Attribution> samples;
    Matrix instances;  // the explained rows (full width)

    std::size_t num_classes() const {
        return samples.empty() ? 0 : samples.front().base_value.size();
    }
};

AttributionReport explain_instances(const PredictFn& model, const Matrix& background,
                                    const Matrix& instances,
                                    const std::vector<std::string>& feature_names,
                                    const KernelShapOptions& opts);

/// Features ranked by summed per-class mean |shap|, descending.
struct FeatureImportance {
    std::string feature;
    std::vector<double> mean_abs_shap;  // per class
    double total = 0.0;
};
std::vector<FeatureImportance> feature_importance(const AttributionReport& report);

/// Force-plot record for one (sample, class): contributions ordered by
/// |value| descending, near-zero ones dropped; base + sum = prediction.
struct ForceEntry {
    std::string feature;
    double feature_value = 0.0;
    double contribution = 0.0;
};
struct ForceData {
    std::vector<ForceEntry> contributions;
    double base_value = 0.0;
    double prediction = 0.0;
};
ForceData force_data(const AttributionReport& report, std::size_t sample_index,
                     std::size_t class_index);

/// Picks the `count` highest-variance columns (for bounding explanation
/// width on wide datasets).
std::vector<std::size_t> top_variance_features(const Matrix& data, std::size_t count);

/// Plot-data sinks (CSV).
void save_importance_csv(const std::vector<FeatureImportance>& ranking,
                         const std::string& path);
void save_summary_csv(const AttributionReport& report, const Matrix& reference,
                      std::size_t class_index, const std::string& path);
void save_force_csv(const ForceData& force, const std::string& path);

}  // namespace mamid
