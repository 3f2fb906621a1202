#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mamid/dataset.hpp"
#include "mamid/tuner.hpp"

namespace mamid {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything a pipeline stage needs; every run writes a manifest capturing
/// this config plus the tool version.
struct PipelineConfig {
    std::string data_path;
    std::vector<LabelLevel> levels = {LabelLevel::binary, LabelLevel::category,
                                      LabelLevel::subcategory};
    std::size_t subset_size = 10000;
    double test_fraction = 0.25;
    std::uint64_t seed = 1;
    std::size_t parallelism = 0;  // 0 = MAMID_THREADS env or hardware
    std::string out_dir = "out";
    std::string grid_path;        // optional grid-space JSON

    // synth stage
    std::size_t synth_n = 10000;
    std::size_t synth_dims = 16;
    double synth_separation = 6.0;

    // explain stage
    std::string model_path;
    std::size_t explain_samples = 20;
    std::size_t background_size = 100;
    std::size_t coalition_samples = 2048;
    std::size_t explain_features = 12;

    std::size_t effective_parallelism() const;
};

/// JSON grid-space file ({"epochs": [...], "batch": [...], ...}).
GridSpace load_grid_space(const std::string& path);
void save_grid_space(const GridSpace& space, const std::string& path);

/// preprocess: CSV in, preprocessed matrix + provenance log out.
void cmd_preprocess(const PipelineConfig& config);

/// synth: deterministic 9-class Gaussian dataset in raw CSV form.
void cmd_synth(const PipelineConfig& config);

/// tune: stratified subset, grid run per level, top-10 tables, option
/// summaries, combined optimal selection.
struct TuneOutcome {
    Hyperparameters selected;
    std::vector<std::string> decision_log;
    std::vector<std::size_t> successes_per_level;
};
TuneOutcome cmd_tune(const PipelineConfig& config);

/// validate: trains the selected configuration per level and writes
/// paper-shaped reports plus the trained models.
struct ValidateOutcome {
    std::vector<std::pair<LabelLevel, ClassificationReport>> reports;
};
ValidateOutcome cmd_validate(const PipelineConfig& config, const Hyperparameters& selected);

/// Reads selected.json produced by cmd_tune.
Hyperparameters load_selected(const std::string& path);

/// explain: Kernel SHAP attribution CSVs for a trained model.
void cmd_explain(const PipelineConfig& config);

/// report: consolidated human-readable summary over whatever stages ran.
std::string cmd_report(const std::string& out_dir);

}  // namespace mamid
