#include "mamid/tuner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "mamid/errors.hpp"
#include "mamid/train.hpp"

namespace mamid {

std::size_t GridSpace::cardinality() const {
    return epochs_options.size() * batch_options.size() * neurons_options.size() *
           optimizer_options.size() * activation_hidden_options.size() *
           activation_output_options.size();
}

std::vector<Hyperparameters> enumerate_grid(const GridSpace& space) {
    std::vector<Hyperparameters> grid;
    grid.reserve(space.cardinality());
    for (std::size_t e : space.epochs_options)
        for (std::size_t b : space.batch_options)
            for (std::size_t n : space.neurons_options)
                for (OptimizerKind o : space.optimizer_options)
                    for (ActivationKind ah : space.activation_hidden_options)
                        for (ActivationKind ao : space.activation_output_options)
                            grid.push_back({e, b, n, o, ah, ao});
    return grid;
}

const char* failure_reason_name(FailureReason reason) {
    return reason == FailureReason::incompatible_configuration ? "incompatible-configuration"
                                                               : "training-diverged";
}

ExperimentData prepare_experiment_data(const FeatureMatrix& train, const FeatureMatrix& test,
                                       LabelLevel level) {
    ExperimentData data;
    data.train_features = train.values;
    data.test_features = test.values;

    auto [train_onehot, hierarchy] = encode_labels(train.labels(level), level);
    data.level_data.train_targets_onehot = std::move(train_onehot);
    data.level_data.test_targets_onehot = encode_labels(test.labels(level), hierarchy);
    data.level_data.test_truth.reserve(test.rows());
    for (const std::string& label : test.labels(level)) {
        data.level_data.test_truth.push_back(hierarchy.index_of(label));
    }
    data.level_data.hierarchy = std::move(hierarchy);
    return data;
}

namespace {

/// Forward in fixed-size blocks so full-dataset evaluation stays flat in
/// memory; returns predicted class indices.
std::vector<std::size_t> predict_classes_chunked(const Network& net, const Matrix& features,
                                                 std::size_t chunk = 4096) {
    std::vector<std::size_t> out;
    out.reserve(features.rows());
    for (std::size_t start = 0; start < features.rows(); start += chunk) {
        const std::size_t count = std::min(chunk, features.rows() - start);
        Matrix block(count, features.cols());
        std::copy(features.row_ptr(start), features.row_ptr(start + count - 1) + features.cols(),
                  block.row_ptr(0));
        const Matrix preds = forward(net, block);
        const std::vector<std::size_t> classes = predict_classes(preds);
        out.insert(out.end(), classes.begin(), classes.end());
    }
    return out;
}

}  // namespace

TrainedExperiment train_and_evaluate(const Hyperparameters& config, const ExperimentData& data,
                                     std::uint64_t seed) {
    const std::size_t k = data.level_data.hierarchy.num_classes();

    // Output-layer pairing: sigmoid -> 1 unit + BCE (binary only),
    // softmax -> k units + CCE. Everything else cannot train a classifier.
    std::size_t output_dim = 0;
    LossKind loss;
    if (config.activation_output == ActivationKind::sigmoid && k == 2) {
        output_dim = 1;
        loss = LossKind::binary_cross_entropy;
    } else if (config.activation_output == ActivationKind::softmax && k >= 2) {
        output_dim = k;
        loss = LossKind::categorical_cross_entropy;
    } else {
        throw IncompatibleConfigError(std::string("output activation ") +
                                      activation_name(config.activation_output) +
                                      " cannot classify " + std::to_string(k) + " classes");
    }
    if (config.batch_size > data.train_features.rows()) {
        throw IncompatibleConfigError("batch size exceeds training set size");
    }

    TrainedExperiment out;
    out.net = init_network(data.train_features.cols(), {config.neurons}, output_dim,
                           config.activation_hidden, config.activation_output, seed);
    const Matrix targets = output_dim == 1
                               ? collapse_binary_targets(data.level_data.train_targets_onehot)
                               : data.level_data.train_targets_onehot;
    TrainConfig cfg;
    cfg.epochs = config.epochs;
    cfg.batch_size = config.batch_size;
    cfg.shuffle_seed = seed;
    cfg.loss = loss;
    out.history =
        train(out.net, data.train_features, targets, cfg, Optimizer::defaults(config.optimizer));

    const std::vector<std::size_t> predicted =
        predict_classes_chunked(out.net, data.test_features);
    out.cm =
        confusion(predicted, data.level_data.test_truth, data.level_data.hierarchy.class_names);
    out.report = report(out.cm);
    return out;
}

ExperimentResult run_experiment(const Hyperparameters& config, const ExperimentData& data,
                                LabelLevel level, std::uint64_t seed) {
    ExperimentResult result;
    result.config = config;
    result.level = level;
    result.seed = seed;

    const auto t0 = std::chrono::steady_clock::now();
    try {
        result.report = train_and_evaluate(config, data, seed).report;
        result.success = true;
    } catch (const IncompatibleConfigError&) {
        result.failure = FailureReason::incompatible_configuration;
        return result;
    } catch (const TrainingDivergedError&) {
        result.failure = FailureReason::training_diverged;
        return result;
    }
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::vector<ExperimentResult> run_grid(const GridSpace& space, const ExperimentData& data,
                                       LabelLevel level, std::uint64_t seed,
                                       std::size_t parallelism) {
    if (parallelism < 1) throw InvalidArgumentError("parallelism must be >= 1");
    const std::vector<Hyperparameters> grid = enumerate_grid(space);
    std::vector<ExperimentResult> results(grid.size());

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            results[i] = run_experiment(grid[i], data, level, seed);
            results[i].config_index = i;
        }
    };

    const std::size_t workers = std::min(parallelism, std::max<std::size_t>(grid.size(), 1));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return results;
}

std::vector<ExperimentResult> top_k(const std::vector<ExperimentResult>& results,
                                    std::size_t k) {
    std::vector<ExperimentResult> successes;
    for (const ExperimentResult& r : results) {
        if (r.success) successes.push_back(r);
    }
    std::stable_sort(successes.begin(), successes.end(),
                     [](const ExperimentResult& a, const ExperimentResult& b) {
                         if (a.accuracy() != b.accuracy()) return a.accuracy() > b.accuracy();
                         return a.config_index < b.config_index;
                     });
    if (successes.size() > k) successes.resize(k);
    return successes;
}

namespace {

struct OptionAccumulator {
    std::vector<std::string> order;
    std::map<std::string, std::pair<double, std::size_t>> sums;  // sum accuracy, count

    void add(const std::string& option, double accuracy) {
        auto [it, inserted] = sums.emplace(option, std::make_pair(0.0, std::size_t{0}));
        if (inserted) order.push_back(option);
        it->second.first += accuracy;
        it->second.second += 1;
    }

    std::vector<OptionStat> stats() const {
        std::vector<OptionStat> out;
        for (const std::string& opt : order) {
            const auto& [sum, count] = sums.at(opt);
            out.push_back({opt, sum / static_cast<double>(count), count});
        }
        return out;
    }
};

}  // namespace

OptionSummary option_summary(const std::vector<ExperimentResult>& results) {
    OptionAccumulator epochs, batch, neurons, optimizer, act_hidden, act_output;
    OptionSummary summary;
    for (const ExperimentResult& r : results) {
        if (!r.success) continue;
        const double acc = r.accuracy();
        epochs.add(std::to_string(r.config.epochs), acc);
        batch.add(std::to_string(r.config.batch_size), acc);
        neurons.add(std::to_string(r.config.neurons), acc);
        optimizer.add(optimizer_name(r.config.optimizer), acc);
        act_hidden.add(activation_name(r.config.activation_hidden), acc);
        act_output.add(activation_name(r.config.activation_output), acc);
        summary.total_successes += 1;
    }
    summary.epochs = epochs.stats();
    summary.batch = batch.stats();
    summary.neurons = neurons.stats();
    summary.optimizer = optimizer.stats();
    summary.activation_hidden = act_hidden.stats();
    summary.activation_output = act_output.stats();
    return summary;
}

namespace {

template <typename T, typename Getter, typename Namer>
T majority_option(const std::vector<std::vector<ExperimentResult>>& tables,
                  const std::vector<T>& canonical_order, Getter get, Namer name,
                  const char* axis, std::vector<std::string>* log) {
    std::map<T, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& table : tables) {
        for (const ExperimentResult& r : table) {
            counts[get(r.config)] += 1;
            ++total;
        }
    }
    T best = canonical_order.front();
    std::size_t best_count = 0;
    for (T option : canonical_order) {
        const auto it = counts.find(option);
        const std::size_t c = it == counts.end() ? 0 : it->second;
        if (c > best_count) {
            best = option;
            best_count = c;
        }
    }
    if (log) {
        std::string line = std::string(axis) + ": " + name(best) + " chosen by majority (" +
                           std::to_string(best_count) + "/" + std::to_string(total) +
                           " top-table rows)";
        log->push_back(std::move(line));
    }
    return best;
}

std::size_t best_numeric_option(const std::vector<OptionSummary>& summaries,
                                std::vector<OptionStat> OptionSummary::* axis_member,
                                const char* axis, std::vector<std::string>* log) {
    // Pool the per-level summaries, weighting each option mean by its
    // success count.
    std::map<std::size_t, std::pair<double, std::size_t>> pooled;  // sum, count
    for (const OptionSummary& s : summaries) {
        for (const OptionStat& stat : s.*axis_member) {
            auto& slot = pooled[static_cast<std::size_t>(std::stoull(stat.option))];
            slot.first += stat.mean_accuracy * static_cast<double>(stat.successes);
            slot.second += stat.successes;
        }
    }
    if (pooled.empty()) {
        throw InvalidArgumentError(std::string("select_optimal: no successes to rank axis ") +
                                   axis);
    }
    std::size_t best = 0;
    double best_mean = -1.0;
    bool first = true;
    for (const auto& [option, slot] : pooled) {  // ascending option order
        const double mean =
            slot.second == 0 ? -1.0 : slot.first / static_cast<double>(slot.second);
        // Means within 1e-12 count as a tie, which falls to the larger
        // option (the documented choice ordering).
        if (first || mean > best_mean - 1e-12) {
            best = option;
            best_mean = std::max(best_mean, mean);
            first = false;
        }
    }
    if (log) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s: %zu chosen by mean accuracy %.6f over successes",
                      axis, best, best_mean);
        log->push_back(buf);
    }
    return best;
}

}  // namespace

Hyperparameters select_optimal(const std::vector<std::vector<ExperimentResult>>& topk_tables,
                               const std::vector<OptionSummary>& summaries,
                               std::vector<std::string>* decision_log) {
    std::size_t rows = 0;
    for (const auto& t : topk_tables) rows += t.size();
    if (rows == 0) throw InvalidArgumentError("select_optimal: empty top-k tables");

    Hyperparameters selected;
    selected.optimizer = majority_option(
        topk_tables, all_optimizers(), [](const Hyperparameters& h) { return h.optimizer; },
        [](OptimizerKind k) { return optimizer_name(k); }, "optimizer", decision_log);
    selected.activation_hidden = majority_option(
        topk_tables, all_activations(),
        [](const Hyperparameters& h) { return h.activation_hidden; },
        [](ActivationKind k) { return activation_name(k); }, "activation_hidden", decision_log);
    selected.activation_output = majority_option(
        topk_tables, all_activations(),
        [](const Hyperparameters& h) { return h.activation_output; },
        [](ActivationKind k) { return activation_name(k); }, "activation_output", decision_log);

    selected.epochs =
        best_numeric_option(summaries, &OptionSummary::epochs, "epochs", decision_log);
    selected.batch_size =
        best_numeric_option(summaries, &OptionSummary::batch, "batch", decision_log);
    selected.neurons =
        best_numeric_option(summaries, &OptionSummary::neurons, "neurons", decision_log);
    return selected;
}

namespace {

nlohmann::json result_to_json(const ExperimentResult& r) {
    nlohmann::json j;
    j["config_index"] = r.config_index;
    j["epochs"] = r.config.epochs;
    j["batch"] = r.config.batch_size;
    j["neurons"] = r.config.neurons;
    j["optimizer"] = optimizer_name(r.config.optimizer);
    j["activation_hidden"] = activation_name(r.config.activation_hidden);
    j["activation_output"] = activation_name(r.config.activation_output);
    j["level"] = level_name(r.level);
    j["seed"] = r.seed;
    j["status"] = r.success ? "success" : "failed";
    if (r.failure) j["reason"] = failure_reason_name(*r.failure);
    if (r.report) {
        const ClassificationReport& rep = *r.report;
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
        j["wall_time_s"] = r.wall_time_s;
    }
    return j;
}

}  // namespace

void save_ledger(const std::vector<ExperimentResult>& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const ExperimentResult& r : results) out << result_to_json(r).dump() << "\n";
    if (!out) throw IoError("write failed: " + path);
}

std::vector<ExperimentResult> load_ledger(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<ExperimentResult> results;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            ExperimentResult r;
            r.config_index = j.at("config_index").get<std::size_t>();
            r.config.epochs = j.at("epochs").get<std::size_t>();
            r.config.batch_size = j.at("batch").get<std::size_t>();
            r.config.neurons = j.at("neurons").get<std::size_t>();
            r.config.optimizer = optimizer_from_name(j.at("optimizer").get<std::string>());
            r.config.activation_hidden =
                activation_from_name(j.at("activation_hidden").get<std::string>());
            r.config.activation_output =
                activation_from_name(j.at("activation_output").get<std::string>());
            r.level = level_from_name(j.at("level").get<std::string>());
            r.seed = j.at("seed").get<std::uint64_t>();
            r.success = j.at("status").get<std::string>() == "success";
            if (j.contains("reason")) {
                const std::string reason = j["reason"].get<std::string>();
                r.failure = reason == "training-diverged"
                                ? FailureReason::training_diverged
                                : FailureReason::incompatible_configuration;
            }
            if (r.success) {
                ClassificationReport rep;
                rep.accuracy_plain = j.at("accuracy").get<double>();
                rep.accuracy_ovr = j.value("accuracy_ovr", 0.0);
                rep.precision_macro = j.value("precision_macro", 0.0);
                rep.precision_weighted = j.value("precision_weighted", 0.0);
                rep.recall_macro = j.value("recall_macro", 0.0);
                rep.recall_weighted = j.value("recall_weighted", 0.0);
                rep.f1_macro_std = j.value("f1_macro", 0.0);
                rep.f1_macro_pr = j.value("f1_macro_pr", 0.0);
                rep.f1_weighted_std = j.value("f1_weighted", 0.0);
                rep.f1_weighted_pr = j.value("f1_weighted_pr", 0.0);
                rep.total = j.value("support", std::uint64_t{0});
                r.report = std::move(rep);
                r.wall_time_s = j.value("wall_time_s", 0.0);
            }
            results.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw IoError("malformed ledger line " + std::to_string(line_no) + " in " + path +
                          ": " + e.what());
        }
    }
    return results;
}

}  // namespace mamid
