#include "mamid/train.hpp"

#include <cmath>
#include <numeric>

#include "mamid/errors.hpp"
#include "mamid/rng.hpp"

namespace mamid {

namespace {

std::size_t count_correct(const Matrix& preds, const Matrix& targets) {
    const std::vector<std::size_t> predicted = predict_classes(preds);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.rows(); ++i) {
        std::size_t truth;
        if (targets.cols() == 1) {
            truth = targets(i, 0) >= 0.5 ? 1 : 0;
        } else {
            const double* row = targets.row_ptr(i);
            truth = static_cast<std::size_t>(
                std::max_element(row, row + targets.cols()) - row);
        }
        if (predicted[i] == truth) ++correct;
    }
    return correct;
}

}  // namespace

TrainHistory train(Network& net, const Matrix& features, const Matrix& targets,
                   const TrainConfig& cfg, const Optimizer& opt) {
    const std::size_t n = features.rows();
    if (cfg.epochs < 1) throw InvalidArgumentError("epochs must be >= 1");
    if (cfg.batch_size < 1 || cfg.batch_size > n) {
        throw InvalidArgumentError("batch_size must be in [1, " + std::to_string(n) + "]");
    }
    if (targets.rows() != n) throw DimensionError("train: feature/target row mismatch");
    if (targets.cols() != net.output_dim) {
        throw DimensionError("train: targets have " + std::to_string(targets.cols()) +
                             " columns, network outputs " + std::to_string(net.output_dim));
    }
    // Fail fast on a bad pairing instead of at the first backward call.
    const LossKind canonical = loss_for_output(net.output_activation, net.output_dim);
    if (cfg.loss != canonical) {
        throw IncompatibleConfigError(std::string("loss ") + loss_name(cfg.loss) +
                                      " does not pair with output activation " +
                                      activation_name(net.output_activation));
    }

    std::vector<std::size_t> sizes;
    for (auto* tensor : net.parameter_tensors()) sizes.push_back(tensor->size());
    OptimizerState state = OptimizerState::for_sizes(sizes);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(cfg.shuffle_seed);

    TrainHistory history;
    history.loss.reserve(cfg.epochs);
    history.accuracy.reserve(cfg.epochs);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t epoch_correct = 0;

        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, n - start);
            Matrix xb(count, features.cols());
            Matrix yb(count, targets.cols());
            for (std::size_t r = 0; r < count; ++r) {
                const std::size_t src = order[start + r];
                std::copy(features.row_ptr(src), features.row_ptr(src) + features.cols(),
                          xb.row_ptr(r));
                std::copy(targets.row_ptr(src), targets.row_ptr(src) + targets.cols(),
                          yb.row_ptr(r));
            }

            try {
                const std::vector<Matrix> acts = forward_trace(net, xb);
                const Matrix& preds = acts.back();
                const double batch_loss = compute_loss(cfg.loss, preds, yb);
                if (!std::isfinite(batch_loss)) {
                    throw TrainingDivergedError(static_cast<int>(epoch),
                                                "loss became non-finite at epoch " +
                                                    std::to_string(epoch));
                }
                epoch_loss += batch_loss * static_cast<double>(count);
                epoch_correct += count_correct(preds, yb);

                Gradients grads = backward_from_trace(net, acts, yb, cfg.loss);
                optimizer_step(opt, state, net.parameter_tensors(), grads.tensors());
            } catch (const NumericError& e) {
                // NaN in an activation or gradient mid-training is divergence.
                throw TrainingDivergedError(static_cast<int>(epoch), e.what());
            }
            if (!net.all_parameters_finite()) {
                throw TrainingDivergedError(static_cast<int>(epoch),
                                            "parameters became non-finite at epoch " +
                                                std::to_string(epoch));
            }
        }

        history.loss.push_back(epoch_loss / static_cast<double>(n));
        history.accuracy.push_back(static_cast<double>(epoch_correct) /
                                   static_cast<double>(n));
    }
    return history;
}

}  // namespace mamid
