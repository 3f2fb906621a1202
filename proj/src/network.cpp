#include "mamid/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mamid/errors.hpp"
#include "mamid/rng.hpp"

namespace mamid {

namespace {
constexpr double kLogClip = 1e-12;
}

const char* loss_name(LossKind kind) {
    return kind == LossKind::binary_cross_entropy ? "binary_cross_entropy"
                                                  : "categorical_cross_entropy";
}

LossKind loss_from_name(const std::string& name) {
    if (name == "binary_cross_entropy") return LossKind::binary_cross_entropy;
    if (name == "categorical_cross_entropy") return LossKind::categorical_cross_entropy;
    throw InvalidArgumentError("unknown loss: " + name);
}

LossKind loss_for_output(ActivationKind output_act, std::size_t output_dim) {
    if (output_act == ActivationKind::sigmoid && output_dim == 1) {
        return LossKind::binary_cross_entropy;
    }
    if (output_act == ActivationKind::softmax && output_dim >= 2) {
        return LossKind::categorical_cross_entropy;
    }
    throw IncompatibleConfigError(std::string("no valid loss for output activation ") +
                                  activation_name(output_act) + " with " +
                                  std::to_string(output_dim) + " unit(s)");
}

std::vector<std::size_t> Network::layer_dims() const {
    std::vector<std::size_t> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(output_dim);
    return dims;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const Matrix& w : weights) n += w.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

bool Network::all_parameters_finite() const {
    for (const Matrix& w : weights) {
        if (!w.all_finite()) return false;
    }
    for (const auto& b : biases) {
        for (double x : b) {
            if (!std::isfinite(x)) return false;
        }
    }
    return true;
}

std::vector<std::vector<double>*> Network::parameter_tensors() {
    std::vector<std::vector<double>*> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.push_back(&weights[l].data());
        out.push_back(&biases[l]);
    }
    return out;
}

std::vector<const std::vector<double>*> Gradients::tensors() const {
    std::vector<const std::vector<double>*> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.push_back(&weights[l].data());
        out.push_back(&biases[l]);
    }
    return out;
}

Network init_network(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                     std::size_t output_dim, ActivationKind hidden_act,
                     ActivationKind output_act, std::uint64_t seed) {
    if (input_dim == 0 || output_dim == 0) {
        throw DimensionError("invalid architecture: zero-sized layer");
    }
    for (std::size_t h : hidden_dims) {
        if (h == 0) throw DimensionError("invalid architecture: zero-sized hidden layer");
    }
    if (output_act == ActivationKind::softmax && output_dim < 2) {
        throw IncompatibleConfigError("softmax output needs at least 2 units");
    }
    if (hidden_act == ActivationKind::softmax) {
        for (std::size_t h : hidden_dims) {
            if (h < 2) throw IncompatibleConfigError("softmax hidden layer needs at least 2 units");
        }
    }

    Network net;
    net.input_dim = input_dim;
    net.hidden_dims = hidden_dims;
    net.output_dim = output_dim;
    net.hidden_activation = hidden_act;
    net.output_activation = output_act;
    net.init_seed = seed;

    const std::vector<std::size_t> dims = net.layer_dims();
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t fan_in = dims[l];
        const std::size_t fan_out = dims[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (double& x : w.data()) x = rng.uniform(-limit, limit);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

std::vector<Matrix> forward_trace(const Network& net, const Matrix& batch) {
    if (batch.cols() != net.input_dim) {
        throw DimensionError("forward: batch has " + std::to_string(batch.cols()) +
                             " columns, network expects " + std::to_string(net.input_dim));
    }
    std::vector<Matrix> acts;
    acts.reserve(net.layer_count() + 1);
    acts.push_back(batch);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        Matrix z = matmul_transb(acts.back(), net.weights[l]);
        add_row_vector(z, net.biases[l]);
        const bool is_output = (l + 1 == net.layer_count());
        apply_activation_rows(is_output ? net.output_activation : net.hidden_activation, z);
        acts.push_back(std::move(z));
    }
    return acts;
}

Matrix forward(const Network& net, const Matrix& batch) {
    return forward_trace(net, batch).back();
}

double compute_loss(LossKind kind, const Matrix& predictions, const Matrix& targets) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
        throw DimensionError("compute_loss: prediction/target shape mismatch");
    }
    if (predictions.rows() == 0) throw InvalidArgumentError("compute_loss: empty batch");

    const std::size_t n = predictions.rows();
    const std::size_t k = predictions.cols();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* p = predictions.row_ptr(i);
        const double* t = targets.row_ptr(i);
        double sample = 0.0;
        if (kind == LossKind::binary_cross_entropy) {
            for (std::size_t j = 0; j < k; ++j) {
                const double pc = std::clamp(p[j], kLogClip, 1.0 - kLogClip);
                sample -= t[j] * std::log(pc) + (1.0 - t[j]) * std::log(1.0 - pc);
            }
            sample /= static_cast<double>(k);
        } else {
            for (std::size_t j = 0; j < k; ++j) {
                if (t[j] != 0.0) sample -= t[j] * std::log(std::clamp(p[j], kLogClip, 1.0));
            }
        }
        total += sample;
    }
    return total / static_cast<double>(n);
}

Gradients backward(const Network& net, const Matrix& batch, const Matrix& targets,
                   LossKind loss_kind) {
    return backward_from_trace(net, forward_trace(net, batch), targets, loss_kind);
}

Gradients backward_from_trace(const Network& net, const std::vector<Matrix>& acts,
                              const Matrix& targets, LossKind loss_kind) {
    const LossKind canonical = loss_for_output(net.output_activation, net.output_dim);
    if (loss_kind != canonical) {
        throw IncompatibleConfigError(std::string("loss ") + loss_name(loss_kind) +
                                      " does not pair with output activation " +
                                      activation_name(net.output_activation));
    }
    if (targets.rows() != acts.front().rows() || targets.cols() != net.output_dim) {
        throw DimensionError("backward: target shape mismatch");
    }

    const std::size_t layers = net.layer_count();
    const double inv_n = 1.0 / static_cast<double>(acts.front().rows());

    Gradients grads;
    grads.weights.resize(layers);
    grads.biases.resize(layers);

    // For sigmoid+BCE and softmax+CCE alike, dL/dz_out = (pred - target)/n.
    Matrix delta = acts.back();
    for (std::size_t idx = 0; idx < delta.size(); ++idx) {
        delta.data()[idx] = (delta.data()[idx] - targets.data()[idx]) * inv_n;
    }

    for (std::size_t l = layers; l-- > 0;) {
        grads.weights[l] = matmul_transa(delta, acts[l]);
        std::vector<double> db(delta.cols(), 0.0);
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            const double* row = delta.row_ptr(i);
            for (std::size_t j = 0; j < delta.cols(); ++j) db[j] += row[j];
        }
        grads.biases[l] = std::move(db);
        if (l > 0) {
            Matrix prev_delta = matmul(delta, net.weights[l]);
            activation_backward_rows(net.hidden_activation, acts[l], prev_delta);
            delta = std::move(prev_delta);
        }
    }
    return grads;
}

std::vector<std::size_t> predict_classes(const Matrix& outputs) {
    std::vector<std::size_t> out(outputs.rows());
    for (std::size_t i = 0; i < outputs.rows(); ++i) {
        if (outputs.cols() == 1) {
            out[i] = outputs(i, 0) >= 0.5 ? 1 : 0;
        } else {
            const double* row = outputs.row_ptr(i);
            out[i] = static_cast<std::size_t>(
                std::max_element(row, row + outputs.cols()) - row);
        }
    }
    return out;
}

void save_network(const Network& net, const std::string& path) {
    nlohmann::json j;
    j["input_dim"] = net.input_dim;
    j["hidden_dims"] = net.hidden_dims;
    j["output_dim"] = net.output_dim;
    j["hidden_activation"] = activation_name(net.hidden_activation);
    j["output_activation"] = activation_name(net.output_activation);
    j["init_seed"] = net.init_seed;
    nlohmann::json weights = nlohmann::json::array();
    for (const Matrix& w : net.weights) weights.push_back(w.data());
    j["weights"] = std::move(weights);
    j["biases"] = net.biases;

    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed network file " + path + ": " + e.what());
    }

    Network net;
    try {
        net.input_dim = j.at("input_dim").get<std::size_t>();
        net.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
        net.output_dim = j.at("output_dim").get<std::size_t>();
        net.hidden_activation = activation_from_name(j.at("hidden_activation").get<std::string>());
        net.output_activation = activation_from_name(j.at("output_activation").get<std::string>());
        net.init_seed = j.at("init_seed").get<std::uint64_t>();
        net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
        const auto& weights = j.at("weights");
        const std::vector<std::size_t> dims = net.layer_dims();
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            Matrix w(dims[l + 1], dims[l]);
            w.data() = weights.at(l).get<std::vector<double>>();
            if (w.data().size() != dims[l + 1] * dims[l]) {
                throw IoError("weight tensor " + std::to_string(l) + " has wrong size in " + path);
            }
            net.weights.push_back(std::move(w));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed network file " + path + ": " + e.what());
    }
    return net;
}

}  // namespace mamid
