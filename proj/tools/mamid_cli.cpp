// mamid — multi-tiered ANN intrusion-detection pipeline CLI.
//
// Subcommands: preprocess, synth, tune, validate, explain, report.
// Exit codes: 0 success, 1 usage, 2 data error, 3 internal error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mamid/errors.hpp"
#include "mamid/pipeline.hpp"

namespace {

std::vector<mamid::LabelLevel> parse_levels(const std::string& level) {
    if (level == "all") {
        return {mamid::LabelLevel::binary, mamid::LabelLevel::category,
                mamid::LabelLevel::subcategory};
    }
    return {mamid::level_from_name(level)};
}

void add_common_flags(CLI::App* cmd, mamid::PipelineConfig& config, std::string& level) {
    cmd->add_option("--data", config.data_path, "Input CSV path");
    cmd->add_option("--level", level, "binary|category|subcategory|all")
        ->check(CLI::IsMember({"binary", "category", "subcategory", "all"}));
    cmd->add_option("--subset-size", config.subset_size,
                    "Stratified subset size (0 = use every record)");
    cmd->add_option("--test-fraction", config.test_fraction, "Held-out test fraction");
    cmd->add_option("--seed", config.seed, "Seed for every random draw");
    cmd->add_option("--parallelism", config.parallelism,
                    "Worker threads (0 = MAMID_THREADS or hardware)");
    cmd->add_option("--out", config.out_dir, "Output directory");
    cmd->add_option("--grid", config.grid_path, "Grid-space JSON path");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mamid: tiered ANN intrusion detection on IoT flow records"};
    app.require_subcommand(1);
    app.set_version_flag("--version", mamid::kToolVersion);

    mamid::PipelineConfig config;
    std::string level = "all";

    CLI::App* preprocess = app.add_subcommand("preprocess", "Clean, sanitize and scale a CSV");
    add_common_flags(preprocess, config, level);
    preprocess->get_option("--data")->required();

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic 9-class dataset");
    add_common_flags(synth, config, level);
    synth->add_option("--n", config.synth_n, "Number of records");
    synth->add_option("--dims", config.synth_dims, "Feature count");
    synth->add_option("--separation", config.synth_separation,
                      "Distance between class means (stddev units)");

    CLI::App* tune = app.add_subcommand("tune", "Grid-search hyperparameters on a subset");
    add_common_flags(tune, config, level);

    CLI::App* validate = app.add_subcommand("validate", "Train and evaluate a selected config");
    add_common_flags(validate, config, level);
    std::string selected_path;
    validate->add_option("--selected", selected_path,
                         "selected.json path (default <out>/selected.json)");

    CLI::App* explain = app.add_subcommand("explain", "Shapley attributions for a trained model");
    add_common_flags(explain, config, level);
    explain->add_option("--model", config.model_path, "Trained model JSON")->required();
    explain->add_option("--explain-samples", config.explain_samples, "Test rows to explain");
    explain->add_option("--background", config.background_size, "Background sample size");
    explain->add_option("--coalitions", config.coalition_samples,
                        "Coalition samples when not enumerating");
    explain->add_option("--explain-features", config.explain_features,
                        "Explain only the top-variance N features (0 = all)");

    CLI::App* report = app.add_subcommand("report", "Consolidate a run directory");
    add_common_flags(report, config, level);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    config.levels = parse_levels(level);

    try {
        if (preprocess->parsed()) {
            mamid::cmd_preprocess(config);
            std::cout << "preprocess: wrote " << config.out_dir << "/preprocessed.csv\n";
        } else if (synth->parsed()) {
            mamid::cmd_synth(config);
            std::cout << "synth: wrote " << config.out_dir << "/synth.csv\n";
        } else if (tune->parsed()) {
            const mamid::TuneOutcome outcome = mamid::cmd_tune(config);
            std::cout << "tune: selected epochs " << outcome.selected.epochs << ", batch "
                      << outcome.selected.batch_size << ", neurons " << outcome.selected.neurons
                      << ", " << mamid::optimizer_name(outcome.selected.optimizer) << ", "
                      << mamid::activation_name(outcome.selected.activation_hidden) << " / "
                      << mamid::activation_name(outcome.selected.activation_output) << "\n";
            for (const std::string& line : outcome.decision_log) {
                std::cout << "  " << line << "\n";
            }
        } else if (validate->parsed()) {
            if (selected_path.empty()) selected_path = config.out_dir + "/selected.json";
            const mamid::Hyperparameters selected = mamid::load_selected(selected_path);
            const mamid::ValidateOutcome outcome = mamid::cmd_validate(config, selected);
            for (const auto& [lvl, rep] : outcome.reports) {
                std::printf("validate %-11s accuracy %.6f  macro-f1 %.6f\n",
                            mamid::level_name(lvl), rep.accuracy_plain, rep.f1_macro_std);
            }
        } else if (explain->parsed()) {
            mamid::cmd_explain(config);
            std::cout << "explain: wrote attribution CSVs to " << config.out_dir << "\n";
        } else if (report->parsed()) {
            std::cout << mamid::cmd_report(config.out_dir);
        }
    } catch (const mamid::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mamid::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mamid::LabelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mamid::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mamid::InvalidArgumentError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const mamid::Error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
