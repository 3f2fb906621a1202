#include <doctest.h>

#include <cmath>

#include "mamid/errors.hpp"
#include "mamid/rng.hpp"
#include "mamid/train.hpp"

using namespace mamid;

namespace {

// Two 2-d Gaussian blobs far apart: linearly separable by construction.
void separable_binary(std::size_t n, Matrix& x, Matrix& y) {
    Rng rng(123);
    x = Matrix(n, 2);
    y = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = i % 2 == 0;
        const double cx = positive ? 3.0 : -3.0;
        x(i, 0) = rng.gaussian(cx, 0.5);
        x(i, 1) = rng.gaussian(positive ? 2.0 : -2.0, 0.5);
        y(i, 0) = positive ? 1.0 : 0.0;
    }
}

}  // namespace

TEST_CASE("training learns a separable binary problem") {
    Matrix x, y;
    separable_binary(200, x, y);
    Network net = init_network(2, {200}, 1, ActivationKind::tanh, ActivationKind::sigmoid, 1);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = 100;
    cfg.shuffle_seed = 1;
    cfg.loss = LossKind::binary_cross_entropy;
    const TrainHistory history =
        train(net, x, y, cfg, Optimizer::defaults(OptimizerKind::adam));

    REQUIRE(history.accuracy.size() == 20);
    CHECK(history.accuracy.back() >= 0.99);
    CHECK(history.loss.back() < history.loss.front());
}

TEST_CASE("epochs = 0 is rejected") {
    Matrix x(4, 2), y(4, 1);
    Network net = init_network(2, {2}, 1, ActivationKind::tanh, ActivationKind::sigmoid, 0);
    TrainConfig cfg;
    cfg.epochs = 0;
    cfg.batch_size = 2;
    cfg.loss = LossKind::binary_cross_entropy;
    CHECK_THROWS_AS(train(net, x, y, cfg, Optimizer::defaults(OptimizerKind::sgd)),
                    InvalidArgumentError);
}

TEST_CASE("batch size larger than the dataset is rejected") {
    Matrix x(4, 2), y(4, 1);
    Network net = init_network(2, {2}, 1, ActivationKind::tanh, ActivationKind::sigmoid, 0);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 5;
    cfg.loss = LossKind::binary_cross_entropy;
    CHECK_THROWS_AS(train(net, x, y, cfg, Optimizer::defaults(OptimizerKind::sgd)),
                    InvalidArgumentError);
}

TEST_CASE("the same seed trains to bitwise-identical weights") {
    Matrix x, y;
    separable_binary(60, x, y);
    const auto run = [&](std::uint64_t seed) {
        Network net = init_network(2, {8}, 1, ActivationKind::tanh, ActivationKind::sigmoid,
                                   seed);
        TrainConfig cfg;
        cfg.epochs = 5;
        cfg.batch_size = 16;
        cfg.shuffle_seed = seed;
        cfg.loss = LossKind::binary_cross_entropy;
        train(net, x, y, cfg, Optimizer::defaults(OptimizerKind::rmsprop));
        return net;
    };
    const Network a = run(7);
    const Network b = run(7);
    const Network c = run(8);
    CHECK(a.weights[0] == b.weights[0]);
    CHECK(a.weights[1] == b.weights[1]);
    CHECK(a.biases[0] == b.biases[0]);
    CHECK(a.biases[1] == b.biases[1]);
    CHECK(a.weights[0].data() != c.weights[0].data());
}

TEST_CASE("training runs epochs x ceil(n/batch) steps worth of history") {
    Matrix x, y;
    separable_binary(10, x, y);
    Network net = init_network(2, {3}, 1, ActivationKind::relu, ActivationKind::sigmoid, 2);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 4;  // ceil(10/4) = 3 batches per epoch
    cfg.shuffle_seed = 2;
    cfg.loss = LossKind::binary_cross_entropy;
    const TrainHistory history =
        train(net, x, y, cfg, Optimizer::defaults(OptimizerKind::sgd));
    CHECK(history.loss.size() == 3);
    CHECK(history.accuracy.size() == 3);
    CHECK(net.all_parameters_finite());
}

TEST_CASE("divergence surfaces as TrainingDivergedError with the epoch index") {
    Matrix x, y;
    separable_binary(40, x, y);
    // An absurd learning rate reliably overflows tanh-net weights.
    Network net = init_network(2, {8}, 1, ActivationKind::relu, ActivationKind::sigmoid, 3);
    Optimizer opt = Optimizer::defaults(OptimizerKind::sgd);
    opt.learning_rate = 1e18;
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batch_size = 8;
    cfg.shuffle_seed = 3;
    cfg.loss = LossKind::binary_cross_entropy;
    try {
        train(net, x, y, cfg, opt);
        FAIL("expected divergence");
    } catch (const TrainingDivergedError& e) {
        CHECK(e.epoch >= 0);
        CHECK(e.epoch < 50);
    }
}

TEST_CASE("train validates the loss pairing up front") {
    Matrix x(6, 2), y(6, 2);
    Network net = init_network(2, {3}, 2, ActivationKind::tanh, ActivationKind::softmax, 0);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 2;
    cfg.loss = LossKind::binary_cross_entropy;
    CHECK_THROWS_AS(train(net, x, y, cfg, Optimizer::defaults(OptimizerKind::adam)),
                    IncompatibleConfigError);
}
