#include "mamid/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "mamid/errors.hpp"
#include "mamid/rng.hpp"

namespace mamid {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double result = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        result *= static_cast<double>(n - i + 1) / static_cast<double>(i);
    }
    return result;
}

/// Shapley kernel weight for a coalition of size s out of m players.
double shapley_kernel_weight(std::size_t m, std::size_t s) {
    return static_cast<double>(m - 1) /
           (binomial(m, s) * static_cast<double>(s) * static_cast<double>(m - s));
}

/// Mean model output over the background set with the coalition's absent
/// features replaced by background values. Appends one row per class to
/// `out`.
std::vector<double> coalition_value(const PredictFn& model, const Matrix& background,
                                    const std::vector<double>& instance,
                                    const std::vector<std::size_t>& subset,
                                    std::uint64_t mask) {
    const std::size_t b = background.rows();
    Matrix batch(b, instance.size());
    for (std::size_t r = 0; r < b; ++r) {
        batch.set_row(r, instance);
        for (std::size_t j = 0; j < subset.size(); ++j) {
            if (!(mask & (std::uint64_t{1} << j))) {
                batch(r, subset[j]) = background(r, subset[j]);
            }
        }
    }
    const Matrix preds = model(batch);
    std::vector<double> mean(preds.cols(), 0.0);
    for (std::size_t r = 0; r < b; ++r) {
        for (std::size_t c = 0; c < preds.cols(); ++c) mean[c] += preds(r, c);
    }
    for (double& v : mean) v /= static_cast<double>(b);
    return mean;
}

/// Gaussian elimination with partial pivoting; returns false if a pivot
/// degenerates.
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> y,
                 std::vector<double>& out) {
    const std::size_t n = y.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-12) return false;
        std::swap(a[col], a[pivot]);
        std::swap(y[col], y[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a[r][col] / a[col][col];
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
            y[r] -= factor * y[col];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double sum = y[r];
        for (std::size_t c = r + 1; c < n; ++c) sum -= a[r][c] * out[c];
        out[r] = sum / a[r][r];
    }
    return true;
}

}  // namespace

Attribution kernel_shap(const PredictFn& model, const Matrix& background,
                        const std::vector<double>& instance, const KernelShapOptions& opts) {
    if (background.rows() == 0) throw InvalidArgumentError("kernel_shap: empty background");
    if (background.cols() != instance.size()) {
        throw DimensionError("kernel_shap: instance width " + std::to_string(instance.size()) +
                             " vs background width " + std::to_string(background.cols()));
    }

    std::vector<std::size_t> subset = opts.feature_subset;
    if (subset.empty()) {
        subset.resize(instance.size());
        std::iota(subset.begin(), subset.end(), 0);
    }
    for (std::size_t idx : subset) {
        if (idx >= instance.size()) {
            throw InvalidArgumentError("kernel_shap: feature index out of range");
        }
    }
    const std::size_t m = subset.size();
    if (m > 64) throw InvalidArgumentError("kernel_shap: at most 64 explained features");

    Attribution result;

    // v(empty) and v(full) anchor the regression.
    result.base_value = coalition_value(model, background, instance, subset, 0);
    {
        Matrix one(1, instance.size());
        one.set_row(0, instance);
        const Matrix pred = model(one);
        result.prediction = pred.row(0);
    }
    const std::size_t n_classes = result.base_value.size();
    result.shap = Matrix(m, n_classes);

    std::vector<double> delta(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        delta[c] = result.prediction[c] - result.base_value[c];
    }

    if (m == 1) {
        for (std::size_t c = 0; c < n_classes; ++c) result.shap(0, c) = delta[c];
        return result;
    }

    // Coalition list: (mask, weight). Full enumeration below the limit,
    // kernel-distributed sampling above it.
    std::map<std::uint64_t, double> coalitions;
    const bool enumerate = m <= opts.full_enumeration_limit;
    if (enumerate) {
        const std::uint64_t full = (std::uint64_t{1} << m) - 1;
        for (std::uint64_t mask = 1; mask < full; ++mask) {
            const auto size = static_cast<std::size_t>(std::popcount(mask));
            coalitions[mask] = shapley_kernel_weight(m, size);
        }
    } else {
        // Sampling sizes with probability proportional to kernel_weight *
        // C(m, s) makes a plain unweighted regression unbiased.
        std::vector<double> size_prob(m - 1);
        double norm = 0.0;
        for (std::size_t s = 1; s < m; ++s) {
            size_prob[s - 1] = 1.0 / (static_cast<double>(s) * static_cast<double>(m - s));
            norm += size_prob[s - 1];
        }
        Rng rng(opts.seed);
        std::vector<std::size_t> positions(m);
        std::iota(positions.begin(), positions.end(), 0);
        for (std::size_t draw = 0; draw < opts.n_coalition_samples; ++draw) {
            double u = rng.uniform() * norm;
            std::size_t s = 1;
            for (; s < m - 1; ++s) {
                if (u < size_prob[s - 1]) break;
                u -= size_prob[s - 1];
            }
            rng.shuffle(positions);
            std::uint64_t mask = 0;
            for (std::size_t j = 0; j < s; ++j) mask |= std::uint64_t{1} << positions[j];
            coalitions[mask] += 1.0;
        }
    }

    // Per-coalition values, per class.
    const std::size_t n_coal = coalitions.size();
    std::vector<std::uint64_t> masks;
    std::vector<double> weights;
    masks.reserve(n_coal);
    weights.reserve(n_coal);
    Matrix values(n_coal, n_classes);
    {
        std::size_t row = 0;
        for (const auto& [mask, weight] : coalitions) {
            masks.push_back(mask);
            weights.push_back(weight);
            values.set_row(row, coalition_value(model, background, instance, subset, mask));
            ++row;
        }
    }

    // Constrained WLS with the efficiency constraint eliminated through the
    // last explained feature: phi_last = delta - sum(phi_1..m-1). The normal
    // matrix is shared across classes.
    const std::size_t dim = m - 1;
    std::vector<std::vector<double>> ata(dim, std::vector<double>(dim, 0.0));
    std::vector<std::vector<double>> aty(dim, std::vector<double>(n_classes, 0.0));
    std::vector<double> arow(dim);
    for (std::size_t i = 0; i < n_coal; ++i) {
        const std::uint64_t mask = masks[i];
        const double w = weights[i];
        const double z_last = (mask >> (m - 1)) & 1 ? 1.0 : 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            arow[j] = (((mask >> j) & 1) ? 1.0 : 0.0) - z_last;
        }
        for (std::size_t j = 0; j < dim; ++j) {
            if (arow[j] == 0.0) continue;
            const double wj = w * arow[j];
            for (std::size_t k2 = 0; k2 < dim; ++k2) ata[j][k2] += wj * arow[k2];
            for (std::size_t c = 0; c < n_classes; ++c) {
                const double y = values(i, c) - result.base_value[c] - z_last * delta[c];
                aty[j][c] += wj * y;
            }
        }
    }

    for (std::size_t c = 0; c < n_classes; ++c) {
        std::vector<double> rhs(dim);
        for (std::size_t j = 0; j < dim; ++j) rhs[j] = aty[j][c];
        std::vector<double> phi;
        if (!solve_dense(ata, rhs, phi)) {
            // Singular system (e.g. too few distinct coalitions): ridge.
            result.regularized = true;
            std::vector<std::vector<double>> ridged = ata;
            double trace = 0.0;
            for (std::size_t j = 0; j < dim; ++j) trace += ata[j][j];
            const double lambda = std::max(1e-10, 1e-10 * trace);
            for (std::size_t j = 0; j < dim; ++j) ridged[j][j] += lambda;
            if (!solve_dense(ridged, rhs, phi)) {
                throw NumericError("kernel_shap: regression system unsolvable");
            }
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            result.shap(j, c) = phi[j];
            sum += phi[j];
        }
        result.shap(dim, c) = delta[c] - sum;
    }
    return result;
}

AttributionReport explain_instances(const PredictFn& model, const Matrix& background,
                                    const Matrix& instances,
                                    const std::vector<std::string>& feature_names,
                                    const KernelShapOptions& opts) {
    AttributionReport report;
    report.feature_names = feature_names;
    report.instances = instances;
    report.explained_features = opts.feature_subset;
    if (report.explained_features.empty()) {
        report.explained_features.resize(instances.cols());
        std::iota(report.explained_features.begin(), report.explained_features.end(), 0);
    }
    report.samples.reserve(instances.rows());
    for (std::size_t i = 0; i < instances.rows(); ++i) {
        KernelShapOptions per_sample = opts;
        per_sample.seed = opts.seed + i;
        report.samples.push_back(kernel_shap(model, background, instances.row(i), per_sample));
    }
    return report;
}

std::vector<FeatureImportance> feature_importance(const AttributionReport& report) {
    const std::size_t m = report.explained_features.size();
    const std::size_t k = report.num_classes();
    std::vector<FeatureImportance> ranking(m);
    for (std::size_t j = 0; j < m; ++j) {
        ranking[j].feature = report.feature_names[report.explained_features[j]];
        ranking[j].mean_abs_shap.assign(k, 0.0);
    }
    if (report.samples.empty()) return ranking;
    for (const Attribution& attr : report.samples) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t c = 0; c < k; ++c) {
                ranking[j].mean_abs_shap[c] += std::abs(attr.shap(j, c));
            }
        }
    }
    const double n = static_cast<double>(report.samples.size());
    for (std::size_t j = 0; j < m; ++j) {
        for (double& v : ranking[j].mean_abs_shap) v /= n;
        ranking[j].total = std::accumulate(ranking[j].mean_abs_shap.begin(),
                                           ranking[j].mean_abs_shap.end(), 0.0);
    }
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const FeatureImportance& a, const FeatureImportance& b) {
                         return a.total > b.total;
                     });
    return ranking;
}

ForceData force_data(const AttributionReport& report, std::size_t sample_index,
                     std::size_t class_index) {
    if (sample_index >= report.samples.size()) {
        throw InvalidArgumentError("force_data: sample index out of range");
    }
    const Attribution& attr = report.samples[sample_index];
    if (class_index >= attr.base_value.size()) {
        throw InvalidArgumentError("force_data: class index out of range");
    }
    ForceData out;
    out.base_value = attr.base_value[class_index];
    out.prediction = attr.prediction[class_index];
    for (std::size_t j = 0; j < report.explained_features.size(); ++j) {
        const double contribution = attr.shap(j, class_index);
        if (std::abs(contribution) <= 1e-12) continue;
        const std::size_t col = report.explained_features[j];
        out.contributions.push_back(
            {report.feature_names[col], report.instances(sample_index, col), contribution});
    }
    std::stable_sort(out.contributions.begin(), out.contributions.end(),
                     [](const ForceEntry& a, const ForceEntry& b) {
                         return std::abs(a.contribution) > std::abs(b.contribution);
                     });
    return out;
}

std::vector<std::size_t> top_variance_features(const Matrix& data, std::size_t count) {
    const std::size_t d = data.cols();
    std::vector<double> variance(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < data.rows(); ++i) mean += data(i, j);
        mean /= static_cast<double>(data.rows());
        double var = 0.0;
        for (std::size_t i = 0; i < data.rows(); ++i) {
            const double diff = data(i, j) - mean;
            var += diff * diff;
        }
        variance[j] = var;
    }
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return variance[a] > variance[b]; });
    order.resize(std::min(count, d));
    std::sort(order.begin(), order.end());
    return order;
}

void save_importance_csv(const std::vector<FeatureImportance>& ranking,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    const std::size_t k = ranking.empty() ? 0 : ranking.front().mean_abs_shap.size();
    out << "rank,feature,total_mean_abs_shap";
    for (std::size_t c = 0; c < k; ++c) out << ",class_" << c;
    out << "\n";
    for (std::size_t r = 0; r < ranking.size(); ++r) {
        out << r + 1 << "," << ranking[r].feature << "," << fmt_double(ranking[r].total);
        for (double v : ranking[r].mean_abs_shap) out << "," << fmt_double(v);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void save_summary_csv(const AttributionReport& report, const Matrix& reference,
                      std::size_t class_index, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "sample,feature,feature_value,feature_percentile,shap_value\n";
    for (std::size_t i = 0; i < report.samples.size(); ++i) {
        for (std::size_t j = 0; j < report.explained_features.size(); ++j) {
            const std::size_t col = report.explained_features[j];
            const double value = report.instances(i, col);
            std::size_t below = 0;
            for (std::size_t r = 0; r < reference.rows(); ++r) {
                if (reference(r, col) <= value) ++below;
            }
            const double percentile =
                reference.rows() ? static_cast<double>(below) / static_cast<double>(reference.rows())
                                 : 0.0;
            out << i << "," << report.feature_names[col] << "," << fmt_double(value) << ","
                << fmt_double(percentile) << ","
                << fmt_double(report.samples[i].shap(j, class_index)) << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

void save_force_csv(const ForceData& force, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "feature,feature_value,contribution\n";
    out << "__base__,," << fmt_double(force.base_value) << "\n";
    out << "__prediction__,," << fmt_double(force.prediction) << "\n";
    for (const ForceEntry& e : force.contributions) {
        out << e.feature << "," << fmt_double(e.feature_value) << ","
            << fmt_double(e.contribution) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace mamid
