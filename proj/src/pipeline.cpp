#include "mamid/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mamid/errors.hpp"
#include "mamid/metrics.hpp"
#include "mamid/network.hpp"
#include "mamid/shap.hpp"

namespace fs = std::filesystem;

namespace mamid {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

nlohmann::json config_json(const PipelineConfig& c) {
    nlohmann::json j;
    j["data"] = c.data_path;
    nlohmann::json levels = nlohmann::json::array();
    for (LabelLevel l : c.levels) levels.push_back(level_name(l));
    j["levels"] = std::move(levels);
    j["subset_size"] = c.subset_size;
    j["test_fraction"] = c.test_fraction;
    j["seed"] = c.seed;
    j["parallelism"] = c.parallelism;
    j["out"] = c.out_dir;
    j["grid"] = c.grid_path;
    j["synth_n"] = c.synth_n;
    j["synth_dims"] = c.synth_dims;
    j["synth_separation"] = c.synth_separation;
    j["model"] = c.model_path;
    j["explain_samples"] = c.explain_samples;
    j["background_size"] = c.background_size;
    j["coalition_samples"] = c.coalition_samples;
    j["explain_features"] = c.explain_features;
    return j;
}

void write_manifest(const PipelineConfig& config, const std::string& stage,
                    const std::vector<std::string>& artifacts) {
    nlohmann::json j;
    j["tool"] = "mamid";
    j["version"] = kToolVersion;
    j["stage"] = stage;
    j["config"] = config_json(config);
    j["artifacts"] = artifacts;
    const std::string path = join_path(config.out_dir, stage + "_manifest.json");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

/// Re-fits the min-max scaling on the training rows only and applies it to
/// both splits (clamped), so evaluation never leaks test statistics.
void rescale_train_test(FeatureMatrix& train, FeatureMatrix& test) {
    for (std::size_t c = 0; c < train.cols(); ++c) {
        double lo = train.values(0, c), hi = lo;
        for (std::size_t i = 1; i < train.rows(); ++i) {
            lo = std::min(lo, train.values(i, c));
            hi = std::max(hi, train.values(i, c));
        }
        const double span = hi - lo;
        if (span == 0.0) continue;
        for (std::size_t i = 0; i < train.rows(); ++i) {
            train.values(i, c) = (train.values(i, c) - lo) / span;
        }
        for (std::size_t i = 0; i < test.rows(); ++i) {
            test.values(i, c) = std::clamp((test.values(i, c) - lo) / span, 0.0, 1.0);
        }
        // Keep the inverse-transform chain intact.
        train.scale_min[c] = train.unscale(c, lo);
        test.scale_min[c] = train.scale_min[c];
        const double unscaled_hi = train.unscale(c, hi);
        train.scale_max[c] = unscaled_hi;
        test.scale_max[c] = unscaled_hi;
    }
}

std::vector<ActivationKind> activations_from_json(const nlohmann::json& arr) {
    std::vector<ActivationKind> out;
    for (const auto& v : arr) out.push_back(activation_from_name(v.get<std::string>()));
    return out;
}

}  // namespace

std::size_t PipelineConfig::effective_parallelism() const {
    if (parallelism > 0) return parallelism;
    if (const char* env = std::getenv("MAMID_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<std::size_t>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

GridSpace load_grid_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open grid file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        GridSpace space;
        if (j.contains("epochs")) space.epochs_options = j["epochs"].get<std::vector<std::size_t>>();
        if (j.contains("batch")) space.batch_options = j["batch"].get<std::vector<std::size_t>>();
        if (j.contains("neurons"))
            space.neurons_options = j["neurons"].get<std::vector<std::size_t>>();
        if (j.contains("optimizers")) {
            space.optimizer_options.clear();
            for (const auto& v : j["optimizers"]) {
                space.optimizer_options.push_back(optimizer_from_name(v.get<std::string>()));
            }
        }
        if (j.contains("activations_hidden")) {
            space.activation_hidden_options = activations_from_json(j["activations_hidden"]);
        }
        if (j.contains("activations_output")) {
            space.activation_output_options = activations_from_json(j["activations_output"]);
        }
        if (space.cardinality() == 0) throw InvalidArgumentError("grid space is empty: " + path);
        return space;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed grid file " + path + ": " + e.what());
    }
}

void save_grid_space(const GridSpace& space, const std::string& path) {
    nlohmann::json j;
    j["epochs"] = space.epochs_options;
    j["batch"] = space.batch_options;
    j["neurons"] = space.neurons_options;
    nlohmann::json opts = nlohmann::json::array();
    for (OptimizerKind k : space.optimizer_options) opts.push_back(optimizer_name(k));
    j["optimizers"] = std::move(opts);
    nlohmann::json ah = nlohmann::json::array();
    for (ActivationKind k : space.activation_hidden_options) ah.push_back(activation_name(k));
    j["activations_hidden"] = std::move(ah);
    nlohmann::json ao = nlohmann::json::array();
    for (ActivationKind k : space.activation_output_options) ao.push_back(activation_name(k));
    j["activations_output"] = std::move(ao);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

void cmd_preprocess(const PipelineConfig& config) {
    ensure_out_dir(config.out_dir);
    const LoadResult loaded = load_csv(config.data_path);
    if (loaded.dataset.records.empty()) throw DataError("no records in " + config.data_path);
    validate_hierarchy(loaded.dataset);

    Preprocessor prep;
    const FeatureMatrix matrix = prep.fit_transform(loaded.dataset);

    const std::string matrix_path = join_path(config.out_dir, "preprocessed.csv");
    save_feature_matrix(matrix, matrix_path);

    std::vector<std::pair<std::string, std::pair<double, double>>> scaling;
    for (std::size_t c = 0; c < matrix.column_names.size(); ++c) {
        scaling.push_back({matrix.column_names[c], {matrix.scale_min[c], matrix.scale_max[c]}});
    }
    const std::string prov_path = join_path(config.out_dir, "provenance.json");
    save_provenance(prep.provenance(), scaling, prov_path);

    write_manifest(config, "preprocess", {"preprocessed.csv", "provenance.json"});
}

void cmd_synth(const PipelineConfig& config) {
    ensure_out_dir(config.out_dir);
    const SynthSpec spec = iotid20_like_synth_spec(config.synth_dims, config.synth_separation);
    const Dataset data = synth_generate(spec, config.synth_n, config.seed);
    const std::string path = join_path(config.out_dir, "synth.csv");
    save_dataset_csv(data, path);
    write_manifest(config, "synth", {"synth.csv"});
}

namespace {

void save_top10_csv(const std::vector<ExperimentResult>& top, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "accuracy,neurons,batch,epoch,optimizer,activation_i,activation_ii\n";
    for (const ExperimentResult& r : top) {
        out << fmt_double(r.accuracy()) << "," << r.config.neurons << "," << r.config.batch_size
            << "," << r.config.epochs << "," << optimizer_name(r.config.optimizer) << ","
            << activation_name(r.config.activation_hidden) << ","
            << activation_name(r.config.activation_output) << "\n";
    }
}

void save_scatter_csv(const std::vector<ExperimentResult>& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "experiment_index,accuracy,status\n";
    for (const ExperimentResult& r : results) {
        out << r.config_index << ",";
        if (r.success) {
            out << fmt_double(r.accuracy()) << ",success";
        } else {
            out << ",failed-" << failure_reason_name(*r.failure);
        }
        out << "\n";
    }
}

void save_options_csv(const OptionSummary& summary, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "hyperparameter,option,mean_accuracy,successes\n";
    const auto dump = [&](const char* axis, const std::vector<OptionStat>& stats) {
        for (const OptionStat& s : stats) {
            out << axis << "," << s.option << "," << fmt_double(s.mean_accuracy) << ","
                << s.successes << "\n";
        }
    };
    dump("epochs", summary.epochs);
    dump("batch", summary.batch);
    dump("neurons", summary.neurons);
    dump("optimizer", summary.optimizer);
    dump("activation_i", summary.activation_hidden);
    dump("activation_ii", summary.activation_output);
}

nlohmann::json hyperparameters_json(const Hyperparameters& h) {
    nlohmann::json j;
    j["epochs"] = h.epochs;
    j["batch"] = h.batch_size;
    j["neurons"] = h.neurons;
    j["optimizer"] = optimizer_name(h.optimizer);
    j["activation_hidden"] = activation_name(h.activation_hidden);
    j["activation_output"] = activation_name(h.activation_output);
    return j;
}

/// Loads the preprocessed matrix, draws the working subset, splits it and
/// re-scales on train only.
std::pair<FeatureMatrix, FeatureMatrix> load_and_split(const PipelineConfig& config,
                                                       std::size_t subset_size) {
    const std::string matrix_path = join_path(config.out_dir, "preprocessed.csv");
    FeatureMatrix matrix = load_feature_matrix(
        fs::exists(matrix_path) ? matrix_path : config.data_path);

    if (subset_size > 0 && subset_size < matrix.rows()) {
        const std::vector<std::size_t> keep =
            stratified_subset_indices(matrix.labels_subcategory, subset_size, config.seed);
        matrix = select_rows(matrix, keep);
    }
    const auto [train_idx, test_idx] =
        stratified_split_indices(matrix.labels_subcategory, config.test_fraction, config.seed);
    FeatureMatrix train = select_rows(matrix, train_idx);
    FeatureMatrix test = select_rows(matrix, test_idx);
    rescale_train_test(train, test);
    return {std::move(train), std::move(test)};
}

}  // namespace

TuneOutcome cmd_tune(const PipelineConfig& config) {
    ensure_out_dir(config.out_dir);
    const GridSpace space =
        config.grid_path.empty() ? GridSpace{} : load_grid_space(config.grid_path);

    const auto [train, test] = load_and_split(config, config.subset_size);

    TuneOutcome outcome;
    std::vector<std::vector<ExperimentResult>> topk_tables;
    std::vector<OptionSummary> summaries;
    std::vector<std::string> artifacts;

    for (LabelLevel level : config.levels) {
        const ExperimentData data = prepare_experiment_data(train, test, level);
        const std::vector<ExperimentResult> results =
            run_grid(space, data, level, config.seed, config.effective_parallelism());

        const std::string suffix = level_name(level);
        save_ledger(results, join_path(config.out_dir, "ledger_" + suffix + ".jsonl"));
        save_scatter_csv(results, join_path(config.out_dir, "scatter_" + suffix + ".csv"));

        const std::vector<ExperimentResult> top = top_k(results, 10);
        save_top10_csv(top, join_path(config.out_dir, "top10_" + suffix + ".csv"));

        const OptionSummary summary = option_summary(results);
        save_options_csv(summary, join_path(config.out_dir, "options_" + suffix + ".csv"));

        outcome.successes_per_level.push_back(summary.total_successes);
        topk_tables.push_back(top);
        summaries.push_back(summary);
        artifacts.push_back("ledger_" + suffix + ".jsonl");
        artifacts.push_back("scatter_" + suffix + ".csv");
        artifacts.push_back("top10_" + suffix + ".csv");
        artifacts.push_back("options_" + suffix + ".csv");
    }

    outcome.selected = select_optimal(topk_tables, summaries, &outcome.decision_log);

    nlohmann::json j;
    j["selected"] = hyperparameters_json(outcome.selected);
    j["decision_log"] = outcome.decision_log;
    nlohmann::json succ = nlohmann::json::array();
    for (std::size_t i = 0; i < config.levels.size(); ++i) {
        succ.push_back({{"level", level_name(config.levels[i])},
                        {"successes", outcome.successes_per_level[i]},
                        {"experiments", space.cardinality()}});
    }
    j["successes"] = std::move(succ);
    const std::string selected_path = join_path(config.out_dir, "selected.json");
    std::ofstream out(selected_path);
    if (!out) throw IoError("cannot open for writing: " + selected_path);
    out << j.dump(2) << "\n";
    artifacts.push_back("selected.json");

    write_manifest(config, "tune", artifacts);
    return outcome;
}

Hyperparameters load_selected(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    try {
        nlohmann::json j;
        in >> j;
        const nlohmann::json& s = j.contains("selected") ? j["selected"] : j;
        Hyperparameters h;
        h.epochs = s.at("epochs").get<std::size_t>();
        h.batch_size = s.at("batch").get<std::size_t>();
        h.neurons = s.at("neurons").get<std::size_t>();
        h.optimizer = optimizer_from_name(s.at("optimizer").get<std::string>());
        h.activation_hidden = activation_from_name(s.at("activation_hidden").get<std::string>());
        h.activation_output = activation_from_name(s.at("activation_output").get<std::string>());
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed selection file " + path + ": " + e.what());
    }
}

namespace {

void save_confusion_csv(const ConfusionMatrix& cm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "truth\\predicted";
    for (const std::string& name : cm.class_names) out << "," << name;
    out << "\n";
    for (std::size_t i = 0; i < cm.num_classes(); ++i) {
        out << cm.class_names[i];
        for (std::size_t j = 0; j < cm.num_classes(); ++j) out << "," << cm.counts[i][j];
        out << "\n";
    }
}

nlohmann::json report_json(const ClassificationReport& rep) {
    nlohmann::json j;
    j["accuracy"] = rep.accuracy_plain;
    j["accuracy_ovr"] = rep.accuracy_ovr;
    j["precision_macro"] = rep.precision_macro;
    j["precision_weighted"] = rep.precision_weighted;
    j["recall_macro"] = rep.recall_macro;
    j["recall_weighted"] = rep.recall_weighted;
    j["f1_macro"] = rep.f1_macro_std;
    j["f1_macro_pr"] = rep.f1_macro_pr;
    j["f1_weighted"] = rep.f1_weighted_std;
    j["f1_weighted_pr"] = rep.f1_weighted_pr;
    j["support"] = rep.total;
    nlohmann::json per_class = nlohmann::json::array();
    for (const PerClassMetrics& pc : rep.per_class) {
        per_class.push_back({{"class", pc.name},
                             {"precision", pc.precision},
                             {"recall", pc.recall},
                             {"f1", pc.f1},
                             {"support", pc.support},
                             {"zero_division", pc.zero_division}});
    }
    j["per_class"] = std::move(per_class);
    return j;
}

}  // namespace

ValidateOutcome cmd_validate(const PipelineConfig& config, const Hyperparameters& selected) {
    ensure_out_dir(config.out_dir);
    const auto [train, test] = load_and_split(config, config.subset_size);

    ValidateOutcome outcome;
    std::vector<std::string> artifacts;
    for (LabelLevel level : config.levels) {
        const ExperimentData data = prepare_experiment_data(train, test, level);
        const TrainedExperiment trained = train_and_evaluate(selected, data, config.seed);
        const std::string suffix = level_name(level);

        const std::string source = config.subset_size > 0 ? "Subset Dataset" : "Full Dataset";
        {
            const std::string path = join_path(config.out_dir, "report_" + suffix + ".txt");
            std::ofstream out(path);
            if (!out) throw IoError("cannot open for writing: " + path);
            out << format_report(trained.report, source);
        }
        {
            const std::string path = join_path(config.out_dir, "report_" + suffix + ".json");
            std::ofstream out(path);
            if (!out) throw IoError("cannot open for writing: " + path);
            nlohmann::json j;
            j["level"] = suffix;
            j["source"] = source;
            j["config"] = hyperparameters_json(selected);
            j["seed"] = config.seed;
            j["report"] = report_json(trained.report);
            out << j.dump(2) << "\n";
        }
        save_confusion_csv(trained.cm, join_path(config.out_dir, "confusion_" + suffix + ".csv"));
        save_network(trained.net, join_path(config.out_dir, "model_" + suffix + ".json"));

        artifacts.push_back("report_" + suffix + ".txt");
        artifacts.push_back("report_" + suffix + ".json");
        artifacts.push_back("confusion_" + suffix + ".csv");
        artifacts.push_back("model_" + suffix + ".json");
        outcome.reports.push_back({level, trained.report});
    }
    write_manifest(config, "validate", artifacts);
    return outcome;
}

void cmd_explain(const PipelineConfig& config) {
    ensure_out_dir(config.out_dir);
    if (config.model_path.empty()) throw InvalidArgumentError("explain needs a model path");
    const Network net = load_network(config.model_path);

    const auto [train, test] = load_and_split(config, config.subset_size);
    if (train.cols() != net.input_dim) {
        throw DimensionError("model expects " + std::to_string(net.input_dim) +
                             " features, data has " + std::to_string(train.cols()));
    }

    // Background: stratified sample of training rows.
    const std::size_t bg_n = std::min(config.background_size, train.rows());
    const std::vector<std::size_t> bg_idx =
        stratified_subset_indices(train.labels_subcategory, bg_n, config.seed);
    Matrix background(bg_idx.size(), train.cols());
    for (std::size_t i = 0; i < bg_idx.size(); ++i) {
        std::copy(train.values.row_ptr(bg_idx[i]), train.values.row_ptr(bg_idx[i]) + train.cols(),
                  background.row_ptr(i));
    }

    const std::size_t n_explain = std::min(config.explain_samples, test.rows());
    Matrix instances(n_explain, test.cols());
    for (std::size_t i = 0; i < n_explain; ++i) {
        std::copy(test.values.row_ptr(i), test.values.row_ptr(i) + test.cols(),
                  instances.row_ptr(i));
    }

    KernelShapOptions opts;
    opts.seed = config.seed;
    opts.n_coalition_samples = config.coalition_samples;
    if (config.explain_features > 0 && config.explain_features < train.cols()) {
        opts.feature_subset = top_variance_features(train.values, config.explain_features);
    }

    const PredictFn model = [&net](const Matrix& x) { return forward(net, x); };
    const AttributionReport attributions =
        explain_instances(model, background, instances, train.column_names, opts);

    const std::vector<FeatureImportance> ranking = feature_importance(attributions);
    save_importance_csv(ranking, join_path(config.out_dir, "importance.csv"));

    // Summary/force plots are per class; emit class 0 (single-output models
    // have only that one).
    const std::size_t plot_class = 0;
    save_summary_csv(attributions, background, plot_class,
                     join_path(config.out_dir, "summary.csv"));

    std::vector<std::string> artifacts = {"importance.csv", "summary.csv"};
    const std::size_t n_force = std::min<std::size_t>(3, attributions.samples.size());
    for (std::size_t i = 0; i < n_force; ++i) {
        const ForceData force = force_data(attributions, i, plot_class);
        const std::string name = "force_" + std::to_string(i) + ".csv";
        save_force_csv(force, join_path(config.out_dir, name));
        artifacts.push_back(name);
    }
    write_manifest(config, "explain", artifacts);
}

std::string cmd_report(const std::string& out_dir) {
    std::ostringstream out;
    if (!fs::exists(out_dir) || !fs::is_directory(out_dir)) {
        return "nothing to report: " + out_dir + " does not exist\n";
    }

    const auto stage_manifest = [&](const std::string& stage) -> std::optional<nlohmann::json> {
        const std::string path = join_path(out_dir, stage + "_manifest.json");
        std::ifstream in(path);
        if (!in) return std::nullopt;
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;
        }
        return j;
    };

    const auto preprocess = stage_manifest("preprocess");
    const auto synth = stage_manifest("synth");
    const auto tune = stage_manifest("tune");
    const auto validate = stage_manifest("validate");
    const auto explain = stage_manifest("explain");
    if (!preprocess && !synth && !tune && !validate && !explain) {
        return "nothing to report: no stage manifests in " + out_dir + "\n";
    }

    out << "MAMID run summary (" << out_dir << ")\n";
    out << "=================================================\n\n";

    if (synth) out << "[synth] generated dataset: synth.csv\n\n";

    if (preprocess) {
        out << "[preprocess]\n";
        std::ifstream in(join_path(out_dir, "provenance.json"));
        nlohmann::json prov;
        if (in) {
            try {
                in >> prov;
                out << "  dropped columns: " << prov.value("dropped_count", 0) << "\n";
                out << "  inf replacements in " << prov["inf_replacements"].size()
                    << " column(s), nan replacements in " << prov["nan_replacements"].size()
                    << " column(s)\n";
            } catch (const nlohmann::json::exception&) {
                out << "  (provenance.json unreadable)\n";
            }
        }
        out << "\n";
    } else {
        out << "[preprocess] MISSING\n\n";
    }

    if (tune) {
        out << "[tune]\n";
        std::ifstream in(join_path(out_dir, "selected.json"));
        nlohmann::json sel;
        if (in) {
            try {
                in >> sel;
                const auto& s = sel["selected"];
                out << "  selected: epochs " << s.value("epochs", 0) << ", batch "
                    << s.value("batch", 0) << ", neurons " << s.value("neurons", 0) << ", "
                    << s.value("optimizer", "?") << ", " << s.value("activation_hidden", "?")
                    << " / " << s.value("activation_output", "?") << "\n";
                if (sel.contains("successes")) {
                    for (const auto& row : sel["successes"]) {
                        out << "  " << row.value("level", "?") << ": "
                            << row.value("successes", 0) << "/" << row.value("experiments", 0)
                            << " successful experiments\n";
                    }
                }
            } catch (const nlohmann::json::exception&) {
                out << "  (selected.json unreadable)\n";
            }
        }
        out << "\n";
    } else {
        out << "[tune] MISSING\n\n";
    }

    if (validate) {
        out << "[validate]\n";
        for (const char* level : {"binary", "category", "subcategory"}) {
            std::ifstream in(join_path(out_dir, std::string("report_") + level + ".json"));
            if (!in) continue;
            try {
                nlohmann::json j;
                in >> j;
                const auto& rep = j["report"];
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "  %-11s accuracy %.6f  macro-f1 %.6f  weighted-f1 %.6f\n", level,
                              rep.value("accuracy", 0.0), rep.value("f1_macro", 0.0),
                              rep.value("f1_weighted", 0.0));
                out << buf;
            } catch (const nlohmann::json::exception&) {
                out << "  (report_" << level << ".json unreadable)\n";
            }
        }
        out << "\n";
    } else {
        out << "[validate] MISSING\n\n";
    }

    if (explain) {
        out << "[explain]\n";
        std::ifstream in(join_path(out_dir, "importance.csv"));
        if (in) {
            std::string line;
            std::getline(in, line);  // header
            for (int i = 0; i < 3 && std::getline(in, line); ++i) {
                out << "  " << line << "\n";
            }
        }
        out << "\n";
    } else {
        out << "[explain] MISSING\n\n";
    }

    const std::string summary = out.str();
    std::ofstream file(join_path(out_dir, "summary.txt"));
    if (file) file << summary;
    return summary;
}

}  // namespace mamid
