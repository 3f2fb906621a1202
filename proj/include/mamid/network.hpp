#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mamid/activation.hpp"
#include "mamid/matrix.hpp"

namespace mamid {

enum class LossKind { binary_cross_entropy, categorical_cross_entropy };

const char* loss_name(LossKind kind);
LossKind loss_from_name(const std::string& name);

/// The canonical output pairing: sigmoid -> one unit + BCE,
/// softmax -> >=2 units + CCE. relu/tanh/softplus outputs and softmax on a
/// single unit have no valid loss and are rejected.
LossKind loss_for_output(ActivationKind output_act, std::size_t output_dim);

/// One-hidden-layer (configurable to more) dense feedforward classifier:
/// out = output_act(W_L ... hidden_act(W_1 x + b_1) ... + b_L).
struct Network {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_dims;
    std::size_t output_dim = 0;
    std::vector<Matrix> weights;               // layer i: (out_i x in_i), row-major
    std::vector<std::vector<double>> biases;   // layer i: out_i
    ActivationKind hidden_activation = ActivationKind::tanh;
    ActivationKind output_activation = ActivationKind::softmax;
    std::uint64_t init_seed = 0;

    std::size_t layer_count() const { return weights.size(); }
    std::vector<std::size_t> layer_dims() const;  // input, hidden..., output
    std::size_t parameter_count() const;
    bool all_parameters_finite() const;

    /// Flat parameter-tensor views in a fixed order: W1, b1, W2, b2, ...
    std::vector<std::vector<double>*> parameter_tensors();
};

/// Per-parameter gradients, shapes mirroring Network::weights / biases.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    std::vector<const std::vector<double>*> tensors() const;
};

/// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases,
/// deterministic per seed.
Network init_network(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                     std::size_t output_dim, ActivationKind hidden_act,
                     ActivationKind output_act, std::uint64_t seed);

/// Batch forward pass; rows are independent samples.
Matrix forward(const Network& net, const Matrix& batch);

/// Forward pass keeping every layer's activations (index 0 = input batch).
std::vector<Matrix> forward_trace(const Network& net, const Matrix& batch);

/// Mean cross-entropy over the batch; predictions clipped to
/// [1e-12, 1-1e-12] before the log.
double compute_loss(LossKind kind, const Matrix& predictions, const Matrix& targets);

/// Backpropagation for the canonical pairings. The gradient of the loss
/// w.r.t. the output pre-activation is (prediction - target) / batch_size
/// for both of them.
Gradients backward(const Network& net, const Matrix& batch, const Matrix& targets,
                   LossKind loss_kind);

/// Same, reusing an existing forward_trace result (acts[0] = input batch).
Gradients backward_from_trace(const Network& net, const std::vector<Matrix>& acts,
                              const Matrix& targets, LossKind loss_kind);

/// Predicted class index per row: argmax for multi-column outputs,
/// threshold 0.5 for a single sigmoid column.
std::vector<std::size_t> predict_classes(const Matrix& outputs);

/// JSON-shaped flat text: dims, activation names, row-major weights, biases,
/// init seed.
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace mamid
