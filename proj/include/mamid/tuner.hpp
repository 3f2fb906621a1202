#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mamid/dataset.hpp"
#include "mamid/metrics.hpp"
#include "mamid/network.hpp"
#include "mamid/train.hpp"

namespace mamid {

/// One grid point.
struct Hyperparameters {
    std::size_t epochs = 100;
    std::size_t batch_size = 10;
    std::size_t neurons = 100;
    OptimizerKind optimizer = OptimizerKind::sgd;
    ActivationKind activation_hidden = ActivationKind::relu;
    ActivationKind activation_output = ActivationKind::relu;

    bool operator==(const Hyperparameters&) const = default;
};

/// The search space: 2 x 2 x 2 x 5 x 5 x 5 = 1000 points by default.
struct GridSpace {
    std::vector<std::size_t> epochs_options = {100, 200};
    std::vector<std::size_t> batch_options = {10, 100};
    std::vector<std::size_t> neurons_options = {100, 200};
    std::vector<OptimizerKind> optimizer_options = all_optimizers();
    std::vector<ActivationKind> activation_hidden_options = all_activations();
    std::vector<ActivationKind> activation_output_options = all_activations();

    std::size_t cardinality() const;
};

/// Deterministic lexicographic enumeration (epochs, batch, neurons,
/// optimizer, hidden activation, output activation).
std::vector<Hyperparameters> enumerate_grid(const GridSpace& space);

enum class FailureReason { incompatible_configuration, training_diverged };
const char* failure_reason_name(FailureReason reason);

struct ExperimentResult {
    std::size_t config_index = 0;
    Hyperparameters config;
    LabelLevel level = LabelLevel::binary;
    std::uint64_t seed = 0;
    bool success = false;
    std::optional<ClassificationReport> report;
    std::optional<FailureReason> failure;
    double wall_time_s = 0.0;

    double accuracy() const { return report ? report->accuracy_plain : 0.0; }
};

/// Encoded labels for one level, shared across a grid run.
struct LevelData {
    LabelHierarchy hierarchy;
    Matrix train_targets_onehot;
    Matrix test_targets_onehot;
    std::vector<std::size_t> test_truth;  // class indices
};

/// Prepared train/test matrices + per-level encodings.
struct ExperimentData {
    Matrix train_features;
    Matrix test_features;
    LevelData level_data;
};

ExperimentData prepare_experiment_data(const FeatureMatrix& train, const FeatureMatrix& test,
                                       LabelLevel level);

/// The throwing core of one experiment: trains the configuration and
/// evaluates on the test split, keeping the network. Throws
/// IncompatibleConfigError / TrainingDivergedError.
struct TrainedExperiment {
    Network net;
    ConfusionMatrix cm;
    ClassificationReport report;
    TrainHistory history;
};
TrainedExperiment train_and_evaluate(const Hyperparameters& config, const ExperimentData& data,
                                     std::uint64_t seed);

/// Trains one configuration and evaluates it on the test split. Declared-
/// incompatible pairings (output activation without a loss, softmax on one
/// unit) come back as failed(incompatible_configuration) without training;
/// non-finite training comes back as failed(training_diverged).
ExperimentResult run_experiment(const Hyperparameters& config, const ExperimentData& data,
                                LabelLevel level, std::uint64_t seed);

/// Runs every config in the space; results are returned in config order
/// regardless of scheduling. parallelism >= 1 worker threads.
std::vector<ExperimentResult> run_grid(const GridSpace& space, const ExperimentData& data,
                                       LabelLevel level, std::uint64_t seed,
                                       std::size_t parallelism);

/// Successful results sorted by accuracy descending, ties by config order.
std::vector<ExperimentResult> top_k(const std::vector<ExperimentResult>& results,
                                    std::size_t k);

/// Per hyperparameter option: mean accuracy over successful experiments.
struct OptionStat {
    std::string option;
    double mean_accuracy = 0.0;
    std::size_t successes = 0;
};

struct OptionSummary {
    std::size_t total_successes = 0;
    std::vector<OptionStat> epochs;
    std::vector<OptionStat> batch;
    std::vector<OptionStat> neurons;
    std::vector<OptionStat> optimizer;
    std::vector<OptionStat> activation_hidden;
    std::vector<OptionStat> activation_output;
};

OptionSummary option_summary(const std::vector<ExperimentResult>& results);

/// Combines the two approaches: categorical axes (optimizer, activations) by
/// majority count over the pooled top-10 tables; numeric axes (epochs,
/// batch, neurons) by the higher mean accuracy over the pooled summaries,
/// ties broken toward the larger option. `decision_log` (optional) receives
/// one line per axis with the counts behind the choice.
Hyperparameters select_optimal(const std::vector<std::vector<ExperimentResult>>& topk_tables,
                               const std::vector<OptionSummary>& summaries,
                               std::vector<std::string>* decision_log = nullptr);

/// Ledger persistence: one JSON record per line.
void save_ledger(const std::vector<ExperimentResult>& results, const std::string& path);
std::vector<ExperimentResult> load_ledger(const std::string& path);

}  // namespace mamid
