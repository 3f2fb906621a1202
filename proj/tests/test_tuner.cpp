#include <doctest.h>

#include <cmath>
#include <map>

#include "mamid/errors.hpp"
#include "mamid/tuner.hpp"

using namespace mamid;

namespace {

ExperimentResult success_row(std::size_t index, double accuracy, std::size_t neurons,
                             std::size_t batch, std::size_t epochs, OptimizerKind opt,
                             ActivationKind act_i, ActivationKind act_ii) {
    ExperimentResult r;
    r.config_index = index;
    r.config = {epochs, batch, neurons, opt, act_i, act_ii};
    r.success = true;
    ClassificationReport rep;
    rep.accuracy_plain = accuracy;
    r.report = rep;
    return r;
}

constexpr OptimizerKind kAdam = OptimizerKind::adam;
constexpr OptimizerKind kAdamax = OptimizerKind::adamax;
constexpr OptimizerKind kRmsprop = OptimizerKind::rmsprop;
constexpr ActivationKind kTanh = ActivationKind::tanh;
constexpr ActivationKind kSigmoid = ActivationKind::sigmoid;
constexpr ActivationKind kRelu = ActivationKind::relu;
constexpr ActivationKind kSoftmax = ActivationKind::softmax;

// Reference top-10 tables for the selection fixtures, entered row by row.
std::vector<ExperimentResult> paper_top10_binary() {
    return {
        success_row(0, 0.9988, 100, 10, 200, kAdam, kTanh, kSigmoid),
        success_row(1, 0.9986, 100, 100, 200, kRmsprop, kTanh, kSigmoid),
        success_row(2, 0.9985, 200, 100, 200, kAdam, kTanh, kSigmoid),
        success_row(3, 0.9984, 200, 10, 100, kAdam, kTanh, kSigmoid),
        success_row(4, 0.9984, 100, 10, 100, kAdam, kTanh, kSigmoid),
        success_row(5, 0.9984, 200, 100, 100, kAdam, kTanh, kSigmoid),
        success_row(6, 0.9983, 100, 100, 200, kAdam, kTanh, kSigmoid),
        success_row(7, 0.9983, 200, 100, 200, kRmsprop, kTanh, kSoftmax),
        success_row(8, 0.9982, 200, 100, 100, kAdam, kTanh, kSoftmax),
        success_row(9, 0.9982, 200, 100, 200, kRmsprop, kTanh, kSigmoid),
    };
}

std::vector<ExperimentResult> paper_top10_category() {
    return {
        success_row(0, 0.9904, 200, 10, 200, kAdamax, kTanh, kSoftmax),
        success_row(1, 0.9903, 100, 100, 200, kAdam, kTanh, kSoftmax),
        success_row(2, 0.9900, 200, 10, 100, kAdam, kSigmoid, kSoftmax),
        success_row(3, 0.9898, 100, 10, 200, kAdam, kSigmoid, kSoftmax),
        success_row(4, 0.9896, 100, 10, 200, kAdamax, kTanh, kSoftmax),
        success_row(5, 0.9893, 200, 100, 200, kAdam, kTanh, kSoftmax),
        success_row(6, 0.9893, 200, 100, 100, kAdam, kTanh, kSoftmax),
        success_row(7, 0.9892, 200, 10, 100, kAdam, kTanh, kSoftmax),
        success_row(8, 0.9892, 200, 10, 100, kAdamax, kTanh, kSoftmax),
        success_row(9, 0.9889, 200, 10, 200, kAdamax, kRelu, kSoftmax),
    };
}

std::vector<ExperimentResult> paper_top10_subcategory() {
    return {
        success_row(0, 0.9565, 100, 10, 200, kAdamax, kTanh, kSoftmax),
        success_row(1, 0.9563, 200, 10, 100, kAdam, kSigmoid, kSoftmax),
        success_row(2, 0.9562, 100, 10, 200, kAdam, kSigmoid, kSoftmax),
        success_row(3, 0.9561, 100, 100, 200, kAdam, kTanh, kSoftmax),
        success_row(4, 0.9558, 100, 10, 100, kAdam, kTanh, kSoftmax),
        success_row(5, 0.9556, 100, 100, 200, kRmsprop, kTanh, kSoftmax),
        success_row(6, 0.9555, 200, 100, 100, kAdam, kTanh, kSoftmax),
        success_row(7, 0.9553, 100, 10, 100, kAdam, kSigmoid, kSoftmax),
        success_row(8, 0.9550, 200, 10, 200, kAdamax, kTanh, kSoftmax),
        success_row(9, 0.9549, 100, 10, 100, kRmsprop, kTanh, kSoftmax),
    };
}

// "Almost no difference" in the per-option bar charts: equal means make the
// numeric axes fall to the documented tie-break (the larger option).
OptionSummary flat_summary() {
    OptionSummary s;
    s.total_successes = 4;
    s.epochs = {{"100", 0.95, 2}, {"200", 0.95, 2}};
    s.batch = {{"10", 0.95, 2}, {"100", 0.95, 2}};
    s.neurons = {{"100", 0.95, 2}, {"200", 0.95, 2}};
    s.optimizer = {{"adam", 0.95, 4}};
    s.activation_hidden = {{"tanh", 0.95, 4}};
    s.activation_output = {{"softmax", 0.95, 4}};
    return s;
}

ExperimentData tiny_experiment_data(LabelLevel level, std::size_t n = 240) {
    const SynthSpec spec = iotid20_like_synth_spec(4, 6.0);
    const Dataset data = synth_generate(spec, n, 5);
    const auto [train, test] = stratified_split(data, LabelLevel::subcategory, 0.25, 5);
    const FeatureMatrix train_m = preprocess(train);
    const FeatureMatrix test_m = preprocess(test);
    return prepare_experiment_data(train_m, test_m, level);
}

}  // namespace

TEST_CASE("the default grid has exactly 1000 points") {
    const GridSpace space;
    CHECK(space.cardinality() == 1000);
    const std::vector<Hyperparameters> grid = enumerate_grid(space);
    CHECK(grid.size() == 1000);

    // Every config appears exactly once.
    std::map<std::string, int> seen;
    for (const Hyperparameters& h : grid) {
        std::string key = std::to_string(h.epochs) + "/" + std::to_string(h.batch_size) + "/" +
                          std::to_string(h.neurons) + "/" + optimizer_name(h.optimizer) + "/" +
                          activation_name(h.activation_hidden) + "/" +
                          activation_name(h.activation_output);
        seen[key] += 1;
    }
    CHECK(seen.size() == 1000);
}

TEST_CASE("grid enumeration order is lexicographic over the option lists") {
    const GridSpace space;
    const std::vector<Hyperparameters> grid = enumerate_grid(space);
    const Hyperparameters first = grid.front();
    CHECK(first.epochs == 100);
    CHECK(first.batch_size == 10);
    CHECK(first.neurons == 100);
    CHECK(first.optimizer == OptimizerKind::sgd);
    CHECK(first.activation_hidden == ActivationKind::relu);
    CHECK(first.activation_output == ActivationKind::relu);

    // The last axis varies fastest.
    CHECK(grid[1].activation_output == ActivationKind::tanh);
    CHECK(grid[1].activation_hidden == ActivationKind::relu);
}

TEST_CASE("a single-option space enumerates one config") {
    GridSpace space;
    space.epochs_options = {3};
    space.batch_options = {8};
    space.neurons_options = {4};
    space.optimizer_options = {OptimizerKind::adam};
    space.activation_hidden_options = {ActivationKind::tanh};
    space.activation_output_options = {ActivationKind::softmax};
    CHECK(enumerate_grid(space).size() == 1);
}

TEST_CASE("relu output on a categorical task fails as incompatible without training") {
    const ExperimentData data = tiny_experiment_data(LabelLevel::category);
    Hyperparameters config{2, 16, 4, OptimizerKind::adam, ActivationKind::tanh,
                           ActivationKind::relu};
    const ExperimentResult result = run_experiment(config, data, LabelLevel::category, 1);
    CHECK_FALSE(result.success);
    REQUIRE(result.failure.has_value());
    CHECK(*result.failure == FailureReason::incompatible_configuration);
}

TEST_CASE("sigmoid output is valid only for the binary task") {
    Hyperparameters config{2, 16, 4, OptimizerKind::adam, ActivationKind::tanh,
                           ActivationKind::sigmoid};
    const ExperimentResult binary =
        run_experiment(config, tiny_experiment_data(LabelLevel::binary), LabelLevel::binary, 1);
    CHECK(binary.success);

    const ExperimentResult category = run_experiment(
        config, tiny_experiment_data(LabelLevel::category), LabelLevel::category, 1);
    CHECK_FALSE(category.success);
}

TEST_CASE("the same config and seed reproduce an identical report") {
    const ExperimentData data = tiny_experiment_data(LabelLevel::subcategory);
    Hyperparameters config{3, 16, 6, OptimizerKind::adam, ActivationKind::tanh,
                           ActivationKind::softmax};
    const ExperimentResult a = run_experiment(config, data, LabelLevel::subcategory, 9);
    const ExperimentResult b = run_experiment(config, data, LabelLevel::subcategory, 9);
    REQUIRE(a.success);
    REQUIRE(b.success);
    CHECK(a.report->accuracy_plain == b.report->accuracy_plain);
    CHECK(a.report->f1_macro_std == b.report->f1_macro_std);
    CHECK(a.report->precision_weighted == b.report->precision_weighted);
}

TEST_CASE("run_grid is invariant under the parallelism degree") {
    const ExperimentData data = tiny_experiment_data(LabelLevel::binary);
    GridSpace space;
    space.epochs_options = {2, 3};
    space.batch_options = {16};
    space.neurons_options = {4};
    space.optimizer_options = {OptimizerKind::sgd, OptimizerKind::adam};
    space.activation_hidden_options = {ActivationKind::tanh};
    space.activation_output_options = {ActivationKind::sigmoid, ActivationKind::softmax};

    const auto serial = run_grid(space, data, LabelLevel::binary, 3, 1);
    const auto parallel = run_grid(space, data, LabelLevel::binary, 3, 4);
    REQUIRE(serial.size() == 8);
    REQUIRE(parallel.size() == 8);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].config_index == i);
        CHECK(serial[i].config == parallel[i].config);
        CHECK(serial[i].success == parallel[i].success);
        if (serial[i].success) {
            CHECK(serial[i].report->accuracy_plain == parallel[i].report->accuracy_plain);
        }
    }
    CHECK_THROWS_AS(run_grid(space, data, LabelLevel::binary, 3, 0), InvalidArgumentError);
}

TEST_CASE("an all-softplus-output space fails every experiment") {
    const ExperimentData data = tiny_experiment_data(LabelLevel::binary);
    GridSpace space;
    space.epochs_options = {2};
    space.batch_options = {16};
    space.neurons_options = {4};
    space.optimizer_options = {OptimizerKind::sgd};
    space.activation_hidden_options = {ActivationKind::tanh, ActivationKind::relu};
    space.activation_output_options = {ActivationKind::softplus};
    const auto results = run_grid(space, data, LabelLevel::binary, 1, 2);
    for (const ExperimentResult& r : results) {
        CHECK_FALSE(r.success);
        CHECK(*r.failure == FailureReason::incompatible_configuration);
    }
    const OptionSummary summary = option_summary(results);
    CHECK(summary.total_successes == 0);
    CHECK(summary.epochs.empty());
}

TEST_CASE("top_k ranks by accuracy with config-order tie-breaking") {
    std::vector<ExperimentResult> results;
    results.push_back(success_row(0, 0.90, 100, 10, 100, kAdam, kTanh, kSoftmax));
    results.push_back(success_row(1, 0.95, 100, 10, 100, kAdam, kTanh, kSoftmax));
    results.push_back(success_row(2, 0.95, 200, 10, 100, kAdam, kTanh, kSoftmax));
    ExperimentResult failed;
    failed.config_index = 3;
    failed.success = false;
    failed.failure = FailureReason::training_diverged;
    results.push_back(failed);

    const auto top = top_k(results, 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].config_index == 1);  // earlier config wins the tie
    CHECK(top[1].config_index == 2);

    const auto all = top_k(results, 10);
    CHECK(all.size() == 3);  // k larger than successes returns all successes
}

TEST_CASE("top_k on the reference full-dataset binary rows keeps the leader") {
    // The reference ten rows, entered out of order.
    std::vector<ExperimentResult> results;
    results.push_back(success_row(0, 0.999553, 200, 10, 200, OptimizerKind::sgd, kRelu, kSigmoid));
    results.push_back(success_row(1, 0.999559, 200, 100, 200, kAdamax, kRelu, kSigmoid));
    results.push_back(success_row(2, 0.999550, 200, 100, 100, kAdamax, kRelu, kSigmoid));
    results.push_back(success_row(3, 0.999540, 100, 10, 200, OptimizerKind::sgd, kRelu, kSigmoid));
    results.push_back(success_row(4, 0.999530, 100, 100, 200, kAdamax, kRelu, kSigmoid));
    results.push_back(success_row(5, 0.999521, 200, 100, 100, kAdam, kSigmoid, kSigmoid));
    results.push_back(success_row(6, 0.999519, 200, 10, 200, OptimizerKind::sgd, kTanh, kSigmoid));
    results.push_back(success_row(7, 0.999515, 100, 100, 100, kAdam, kTanh, kSigmoid));
    results.push_back(success_row(8, 0.999515, 100, 100, 200, kAdam, kSigmoid, kSigmoid));
    results.push_back(success_row(9, 0.999511, 100, 10, 100, OptimizerKind::sgd, kRelu, kSigmoid));

    const auto top = top_k(results, 10);
    REQUIRE(top.size() == 10);
    CHECK(top[0].accuracy() == doctest::Approx(0.999559));
    CHECK(top[0].config.neurons == 200);
    CHECK(top[0].config.batch_size == 100);
    CHECK(top[0].config.epochs == 200);
    CHECK(top[0].config.optimizer == kAdamax);
    CHECK(top[0].config.activation_hidden == kRelu);
    CHECK(top[0].config.activation_output == kSigmoid);
    // The equal-accuracy pair keeps config order.
    CHECK(top[7].config_index == 7);
    CHECK(top[8].config_index == 8);
}

TEST_CASE("option_summary means match an independent group-by oracle") {
    std::vector<ExperimentResult> ledger;
    // 20 synthetic results across two optimizers and two epoch options.
    std::map<std::string, std::pair<double, int>> oracle;
    for (int i = 0; i < 20; ++i) {
        const OptimizerKind opt = i % 2 == 0 ? kAdam : OptimizerKind::sgd;
        const std::size_t epochs = i % 4 < 2 ? 100 : 200;
        const double acc = 0.5 + 0.02 * i;
        ledger.push_back(success_row(i, acc, 100, 10, epochs, opt, kTanh, kSoftmax));
        auto& o = oracle[optimizer_name(opt)];
        o.first += acc;
        o.second += 1;
        auto& e = oracle["e" + std::to_string(epochs)];
        e.first += acc;
        e.second += 1;
    }
    const OptionSummary summary = option_summary(ledger);
    CHECK(summary.total_successes == 20);
    for (const OptionStat& stat : summary.optimizer) {
        const auto& [sum, count] = oracle.at(stat.option);
        CHECK(stat.successes == static_cast<std::size_t>(count));
        CHECK(stat.mean_accuracy == doctest::Approx(sum / count).epsilon(1e-15));
    }
    for (const OptionStat& stat : summary.epochs) {
        const auto& [sum, count] = oracle.at("e" + stat.option);
        CHECK(stat.mean_accuracy == doctest::Approx(sum / count).epsilon(1e-15));
    }
}

TEST_CASE("two-success summary example") {
    std::vector<ExperimentResult> ledger;
    ledger.push_back(success_row(0, 0.9, 100, 10, 100, kAdam, kTanh, kSoftmax));
    ledger.push_back(success_row(1, 0.8, 100, 10, 100, OptimizerKind::sgd, kTanh, kSoftmax));
    const OptionSummary summary = option_summary(ledger);
    REQUIRE(summary.optimizer.size() == 2);
    CHECK(summary.optimizer[0].option == "adam");
    CHECK(summary.optimizer[0].mean_accuracy == doctest::Approx(0.9));
    CHECK(summary.optimizer[1].option == "sgd");
    CHECK(summary.optimizer[1].mean_accuracy == doctest::Approx(0.8));
}

TEST_CASE("select_optimal on the reference top-10 tables returns the reference selection") {
    const std::vector<std::vector<ExperimentResult>> tables = {
        paper_top10_binary(), paper_top10_category(), paper_top10_subcategory()};
    const std::vector<OptionSummary> summaries = {flat_summary(), flat_summary(),
                                                  flat_summary()};
    std::vector<std::string> log;
    const Hyperparameters selected = select_optimal(tables, summaries, &log);
    CHECK(selected.epochs == 200);
    CHECK(selected.batch_size == 100);
    CHECK(selected.neurons == 200);
    CHECK(selected.optimizer == OptimizerKind::adam);
    CHECK(selected.activation_hidden == ActivationKind::tanh);
    CHECK(selected.activation_output == ActivationKind::softmax);
    CHECK(log.size() == 6);

    // Majority counts visible in the decision log: adam 19/30, tanh 24/30,
    // softmax 22/30.
    CHECK(log[0].find("adam") != std::string::npos);
    CHECK(log[0].find("19/30") != std::string::npos);
    CHECK(log[1].find("24/30") != std::string::npos);
    CHECK(log[2].find("22/30") != std::string::npos);
}

TEST_CASE("unanimous tables select the unanimous option") {
    std::vector<ExperimentResult> table;
    for (int i = 0; i < 10; ++i) {
        table.push_back(success_row(i, 0.9, 100, 10, 100, kRmsprop, kRelu, kSoftmax));
    }
    OptionSummary s;
    s.total_successes = 10;
    s.epochs = {{"100", 0.9, 10}};
    s.batch = {{"10", 0.9, 10}};
    s.neurons = {{"100", 0.9, 10}};
    const Hyperparameters selected = select_optimal({table}, {s}, nullptr);
    CHECK(selected.optimizer == OptimizerKind::rmsprop);
    CHECK(selected.activation_hidden == ActivationKind::relu);
    CHECK(selected.epochs == 100);
    CHECK(selected.batch_size == 10);
}

TEST_CASE("a 21-of-30 adam majority selects adam") {
    std::vector<std::vector<ExperimentResult>> tables(3);
    int index = 0;
    for (int t = 0; t < 3; ++t) {
        for (int i = 0; i < 10; ++i) {  // 7 adam rows per table, 21/30 total
            const OptimizerKind opt = i < 7 ? kAdam : kAdamax;
            tables[t].push_back(success_row(index++, 0.9, 100, 10, 100, opt, kTanh, kSoftmax));
        }
    }
    const std::vector<OptionSummary> summaries = {flat_summary()};
    const Hyperparameters selected = select_optimal(tables, summaries, nullptr);
    CHECK(selected.optimizer == OptimizerKind::adam);
}

TEST_CASE("numeric axes follow the higher pooled mean accuracy") {
    OptionSummary s = flat_summary();
    s.epochs = {{"100", 0.97, 2}, {"200", 0.91, 2}};   // 100 clearly better
    s.batch = {{"10", 0.80, 2}, {"100", 0.95, 2}};     // 100 clearly better
    s.neurons = {{"100", 0.95, 1}, {"200", 0.95, 3}};  // exact tie -> larger
    const Hyperparameters selected =
        select_optimal({paper_top10_binary()}, {s}, nullptr);
    CHECK(selected.epochs == 100);
    CHECK(selected.batch_size == 100);
    CHECK(selected.neurons == 200);
}

TEST_CASE("ledger survives a save/load round trip") {
    const ExperimentData data = tiny_experiment_data(LabelLevel::binary);
    GridSpace space;
    space.epochs_options = {2};
    space.batch_options = {16};
    space.neurons_options = {4};
    space.optimizer_options = {OptimizerKind::adam};
    space.activation_hidden_options = {ActivationKind::tanh};
    space.activation_output_options = {ActivationKind::sigmoid, ActivationKind::relu};
    const auto results = run_grid(space, data, LabelLevel::binary, 2, 1);

    const std::string path = "test_ledger_roundtrip.jsonl";
    save_ledger(results, path);
    const auto back = load_ledger(path);
    std::remove(path.c_str());

    REQUIRE(back.size() == results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        CHECK(back[i].config == results[i].config);
        CHECK(back[i].success == results[i].success);
        if (results[i].success) {
            CHECK(back[i].report->accuracy_plain == results[i].report->accuracy_plain);
        } else {
            CHECK(*back[i].failure == *results[i].failure);
        }
    }
}
