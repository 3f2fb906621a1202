#include <doctest.h>

#include <cmath>

#include "mamid/errors.hpp"
#include "mamid/metrics.hpp"
#include "mamid/rng.hpp"

using namespace mamid;

namespace {

// Direct-formula oracle: every quantity computed straight from TP/TN/FP/FN
// definitions, independent of the report() implementation.
struct FormulaOracle {
    std::size_t k;
    double total = 0.0;
    std::vector<double> tp, fp, fn, tn, support;

    explicit FormulaOracle(const ConfusionMatrix& cm) : k(cm.num_classes()) {
        tp.assign(k, 0.0);
        fp.assign(k, 0.0);
        fn.assign(k, 0.0);
        tn.assign(k, 0.0);
        support.assign(k, 0.0);
        for (std::size_t t = 0; t < k; ++t)
            for (std::size_t p = 0; p < k; ++p) total += static_cast<double>(cm.counts[t][p]);
        for (std::size_t i = 0; i < k; ++i) {
            tp[i] = static_cast<double>(cm.counts[i][i]);
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i) continue;
                fn[i] += static_cast<double>(cm.counts[i][j]);
                fp[i] += static_cast<double>(cm.counts[j][i]);
            }
            tn[i] = total - tp[i] - fn[i] - fp[i];
            support[i] = tp[i] + fn[i];
        }
    }

    double div(double a, double b) const { return b == 0.0 ? 0.0 : a / b; }

    double accuracy_ovr() const {  // mean one-vs-rest accuracy
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            sum += (tp[i] + tn[i]) / (tp[i] + tn[i] + fp[i] + fn[i]);
        }
        return sum / static_cast<double>(k);
    }
    double precision_macro() const {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += div(tp[i], tp[i] + fp[i]);
        return sum / static_cast<double>(k);
    }
    double precision_weighted() const {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            sum += div(tp[i], tp[i] + fp[i]) * (support[i] / total);
        }
        return sum;
    }
    double recall_macro() const {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += div(tp[i], tp[i] + fn[i]);
        return sum / static_cast<double>(k);
    }
    double recall_weighted() const {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            sum += div(tp[i], tp[i] + fn[i]) * (support[i] / total);
        }
        return sum;
    }
    double f1_from(double p, double r) const { return p + r == 0.0 ? 0.0 : 2 * p * r / (p + r); }
    double trace_over_total() const {
        double tr = 0.0;
        for (std::size_t i = 0; i < k; ++i) tr += tp[i];
        return tr / total;
    }
};

ConfusionMatrix random_cm(std::size_t k, Rng& rng) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < k; ++i) names.push_back("c" + std::to_string(i));
    ConfusionMatrix cm;
    cm.class_names = names;
    cm.counts.assign(k, std::vector<std::uint64_t>(k, 0));
    for (auto& row : cm.counts)
        for (auto& cell : row) cell = rng.below(40);
    // Keep the diagonal populated so totals are never zero.
    for (std::size_t i = 0; i < k; ++i) cm.counts[i][i] += 1 + rng.below(60);
    return cm;
}

}  // namespace

TEST_CASE("confusion counts land at (truth, predicted)") {
    const ConfusionMatrix cm = confusion({0, 1, 1}, {0, 0, 1}, {"a", "b"});
    CHECK(cm.counts[0][0] == 1);
    CHECK(cm.counts[0][1] == 1);
    CHECK(cm.counts[1][0] == 0);
    CHECK(cm.counts[1][1] == 1);
    CHECK(cm.total() == 3);
}

TEST_CASE("perfect predictions give a diagonal matrix and all-ones metrics") {
    const std::vector<std::size_t> truth = {0, 1, 2, 0, 1, 2};
    const ConfusionMatrix cm = confusion(truth, truth, {"a", "b", "c"});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(cm.counts[i][j] == (i == j ? 2 : 0));

    const ClassificationReport rep = report(cm);
    CHECK(rep.accuracy_plain == 1.0);
    CHECK(rep.accuracy_ovr == 1.0);
    CHECK(rep.precision_macro == 1.0);
    CHECK(rep.recall_weighted == 1.0);
    CHECK(rep.f1_macro_std == 1.0);
    CHECK(rep.f1_weighted_pr == 1.0);
}

TEST_CASE("confusion matches a brute-force tally on a random 1000-sample case") {
    Rng rng(31);
    const std::size_t k = 4;
    std::vector<std::size_t> truth(1000), pred(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
        truth[i] = rng.below(k);
        pred[i] = rng.below(k);
    }
    const ConfusionMatrix cm = confusion(pred, truth, {"a", "b", "c", "d"});

    // Independent tally.
    std::vector<std::vector<std::uint64_t>> tally(k, std::vector<std::uint64_t>(k, 0));
    for (std::size_t i = 0; i < 1000; ++i) tally[truth[i]][pred[i]] += 1;
    CHECK(cm.counts == tally);
}

TEST_CASE("confusion validates inputs") {
    CHECK_THROWS_AS(confusion({0}, {0, 1}, {"a", "b"}), DimensionError);
    CHECK_THROWS_AS(confusion({2}, {0}, {"a", "b"}), InvalidArgumentError);
}

TEST_CASE("the binary example matches the direct-formula oracle") {
    ConfusionMatrix cm;
    cm.class_names = {"neg", "pos"};
    cm.counts = {{50, 10}, {5, 35}};
    const ClassificationReport rep = report(cm);
    const FormulaOracle oracle(cm);

    CHECK(rep.accuracy_plain == doctest::Approx(oracle.trace_over_total()).epsilon(1e-15));
    CHECK(rep.accuracy_ovr == doctest::Approx(oracle.accuracy_ovr()).epsilon(1e-15));
    CHECK(rep.precision_macro == doctest::Approx(oracle.precision_macro()).epsilon(1e-15));
    CHECK(rep.precision_weighted == doctest::Approx(oracle.precision_weighted()).epsilon(1e-15));
    CHECK(rep.recall_macro == doctest::Approx(oracle.recall_macro()).epsilon(1e-15));
    CHECK(rep.recall_weighted == doctest::Approx(oracle.recall_weighted()).epsilon(1e-15));
    CHECK(rep.f1_macro_pr ==
          doctest::Approx(oracle.f1_from(oracle.precision_macro(), oracle.recall_macro()))
              .epsilon(1e-15));
    CHECK(rep.f1_weighted_pr ==
          doctest::Approx(oracle.f1_from(oracle.precision_weighted(), oracle.recall_weighted()))
              .epsilon(1e-15));

    // Spot values for this hand-checkable matrix.
    CHECK(rep.accuracy_plain == doctest::Approx(85.0 / 100.0));
    CHECK(rep.per_class[1].precision == doctest::Approx(35.0 / 45.0));
    CHECK(rep.per_class[1].recall == doctest::Approx(35.0 / 40.0));
    CHECK(rep.per_class[0].support == 60);
}

TEST_CASE("weighted recall equals trace/total for any confusion matrix") {
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t k = std::vector<std::size_t>{2, 5, 9}[trial % 3];
        const ConfusionMatrix cm = random_cm(k, rng);
        const ClassificationReport rep = report(cm);
        CHECK(rep.recall_weighted == doctest::Approx(rep.accuracy_plain).epsilon(1e-15));
    }
}

TEST_CASE("for two classes the one-vs-rest accuracy equals plain accuracy") {
    Rng rng(78);
    for (int trial = 0; trial < 20; ++trial) {
        const ConfusionMatrix cm = random_cm(2, rng);
        const ClassificationReport rep = report(cm);
        CHECK(rep.accuracy_ovr == doctest::Approx(rep.accuracy_plain).epsilon(1e-14));
    }
}

TEST_CASE("macro equals weighted when supports are balanced") {
    ConfusionMatrix cm;
    cm.class_names = {"a", "b", "c"};
    cm.counts = {{8, 1, 1}, {2, 7, 1}, {3, 0, 7}};  // each support = 10
    const ClassificationReport rep = report(cm);
    CHECK(rep.precision_macro == doctest::Approx(rep.precision_weighted).epsilon(1e-15));
    CHECK(rep.recall_macro == doctest::Approx(rep.recall_weighted).epsilon(1e-15));
    CHECK(rep.f1_macro_std == doctest::Approx(rep.f1_weighted_std).epsilon(1e-15));
}

TEST_CASE("permuting class order leaves the aggregates unchanged") {
    Rng rng(79);
    const ConfusionMatrix cm = random_cm(5, rng);
    // Reverse the class order.
    ConfusionMatrix perm;
    perm.class_names = {cm.class_names.rbegin(), cm.class_names.rend()};
    perm.counts.assign(5, std::vector<std::uint64_t>(5, 0));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) perm.counts[4 - i][4 - j] = cm.counts[i][j];

    const ClassificationReport a = report(cm);
    const ClassificationReport b = report(perm);
    CHECK(a.accuracy_plain == doctest::Approx(b.accuracy_plain).epsilon(1e-15));
    CHECK(a.accuracy_ovr == doctest::Approx(b.accuracy_ovr).epsilon(1e-15));
    CHECK(a.precision_macro == doctest::Approx(b.precision_macro).epsilon(1e-15));
    CHECK(a.recall_weighted == doctest::Approx(b.recall_weighted).epsilon(1e-15));
    CHECK(a.f1_macro_std == doctest::Approx(b.f1_macro_std).epsilon(1e-15));
    CHECK(a.f1_weighted_std == doctest::Approx(b.f1_weighted_std).epsilon(1e-15));
    CHECK(a.per_class[0].precision == doctest::Approx(b.per_class[4].precision).epsilon(1e-15));
}

TEST_CASE("a class never predicted and never present gets the zero-division flag") {
    ConfusionMatrix cm;
    cm.class_names = {"a", "b", "ghost"};
    cm.counts = {{5, 1, 0}, {0, 6, 0}, {0, 0, 0}};
    const ClassificationReport rep = report(cm);
    CHECK(rep.per_class[2].zero_division);
    CHECK(rep.per_class[2].precision == 0.0);
    CHECK(rep.per_class[2].recall == 0.0);
    CHECK_FALSE(rep.per_class[0].zero_division);
}

TEST_CASE("empty matrices are rejected") {
    ConfusionMatrix empty;
    CHECK_THROWS_AS(report(empty), InvalidArgumentError);
    ConfusionMatrix zeros;
    zeros.class_names = {"a", "b"};
    zeros.counts = {{0, 0}, {0, 0}};
    CHECK_THROWS_AS(report(zeros), InvalidArgumentError);
}

TEST_CASE("reference subset-binary row values follow from their confusion matrix") {
    // Counts implied by the reference per-class precision/recall/support:
    // anomaly support 2349 with recall 0.994891 -> 2337 hits; normal support
    // 150 with recall 0.806667 -> 121 hits.
    ConfusionMatrix cm;
    cm.class_names = {"Anomaly", "Normal"};
    cm.counts = {{2337, 12}, {29, 121}};
    const ClassificationReport rep = report(cm);

    CHECK(rep.per_class[0].precision == doctest::Approx(0.987743).epsilon(1e-5));
    CHECK(rep.per_class[0].recall == doctest::Approx(0.994891).epsilon(1e-5));
    CHECK(rep.per_class[0].f1 == doctest::Approx(0.991304).epsilon(1e-5));
    CHECK(rep.per_class[1].precision == doctest::Approx(0.909774).epsilon(1e-5));
    CHECK(rep.per_class[1].recall == doctest::Approx(0.806667).epsilon(1e-5));
    CHECK(rep.per_class[1].f1 == doctest::Approx(0.855124).epsilon(1e-5));
    CHECK(rep.precision_macro == doctest::Approx(0.948759).epsilon(1e-5));
    CHECK(rep.recall_macro == doctest::Approx(0.900779).epsilon(1e-5));
    CHECK(rep.f1_macro_std == doctest::Approx(0.923214).epsilon(1e-5));
    CHECK(rep.precision_weighted == doctest::Approx(0.983063).epsilon(1e-5));
    CHECK(rep.recall_weighted == doctest::Approx(0.983593).epsilon(1e-5));
    CHECK(rep.f1_weighted_std == doctest::Approx(0.98313).epsilon(1e-5));
    CHECK(rep.total == 2499);
}

TEST_CASE("format_report mirrors the table layout") {
    ConfusionMatrix cm;
    cm.class_names = {"Anomaly", "Normal"};
    cm.counts = {{2337, 12}, {29, 121}};
    const std::string text = format_report(report(cm), "Subset Dataset");
    CHECK(text.find("Source : Subset Dataset") != std::string::npos);
    CHECK(text.find("Accuracy :") != std::string::npos);
    CHECK(text.find("Macro") != std::string::npos);
    CHECK(text.find("Weighted") != std::string::npos);
    CHECK(text.find("Anomaly") != std::string::npos);
    CHECK(text.find("Normal") != std::string::npos);
    // Macro comes before Weighted, which comes before the classes.
    CHECK(text.find("Macro") < text.find("Weighted"));
    CHECK(text.find("Weighted") < text.find("Anomaly"));
}
