#include "mamid/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace mamid {

const char* optimizer_name(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::sgd: return "sgd";
        case OptimizerKind::adam: return "adam";
        case OptimizerKind::adamax: return "adamax";
        case OptimizerKind::adagrad: return "adagrad";
        case OptimizerKind::rmsprop: return "rmsprop";
    }
    return "?";
}

OptimizerKind optimizer_from_name(const std::string& name) {
    for (OptimizerKind k : all_optimizers()) {
        if (name == optimizer_name(k)) return k;
    }
    throw InvalidArgumentError("unknown optimizer: " + name);
}

const std::vector<OptimizerKind>& all_optimizers() {
    static const std::vector<OptimizerKind> kinds = {
        OptimizerKind::sgd, OptimizerKind::adam, OptimizerKind::adamax,
        OptimizerKind::adagrad, OptimizerKind::rmsprop};
    return kinds;
}

Optimizer Optimizer::defaults(OptimizerKind kind) {
    Optimizer opt;
    opt.kind = kind;
    switch (kind) {
        case OptimizerKind::sgd: opt.learning_rate = 0.01; break;
        case OptimizerKind::adam: opt.learning_rate = 0.001; break;
        case OptimizerKind::adamax: opt.learning_rate = 0.001; break;
        case OptimizerKind::adagrad: opt.learning_rate = 0.01; break;
        case OptimizerKind::rmsprop: opt.learning_rate = 0.001; break;
    }
    return opt;
}

void Optimizer::validate() const {
    if (!(learning_rate > 0.0)) throw InvalidArgumentError("learning rate must be > 0");
    if (beta1 < 0.0 || beta1 >= 1.0) throw InvalidArgumentError("beta1 must be in [0,1)");
    if (beta2 < 0.0 || beta2 >= 1.0) throw InvalidArgumentError("beta2 must be in [0,1)");
    if (rho < 0.0 || rho >= 1.0) throw InvalidArgumentError("rho must be in [0,1)");
    if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be > 0");
}

OptimizerState OptimizerState::for_sizes(const std::vector<std::size_t>& sizes) {
    OptimizerState state;
    state.primary.reserve(sizes.size());
    state.secondary.reserve(sizes.size());
    for (std::size_t n : sizes) {
        state.primary.emplace_back(n, 0.0);
        state.secondary.emplace_back(n, 0.0);
    }
    return state;
}

void optimizer_step(const Optimizer& opt, OptimizerState& state,
                    const std::vector<std::vector<double>*>& params,
                    const std::vector<const std::vector<double>*>& grads) {
    opt.validate();
    if (params.size() != grads.size() || params.size() != state.primary.size()) {
        throw DimensionError("optimizer_step: tensor count mismatch");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i]->size() != grads[i]->size() ||
            params[i]->size() != state.primary[i].size()) {
            throw DimensionError("optimizer_step: shape mismatch at tensor " +
                                 std::to_string(i));
        }
        for (double g : *grads[i]) {
            if (!std::isfinite(g)) {
                throw NumericError("optimizer_step refused: non-finite gradient in tensor " +
                                   std::to_string(i));
            }
        }
    }

    state.t += 1;
    const double lr = opt.learning_rate;
    const double eps = opt.epsilon;

    for (std::size_t i = 0; i < params.size(); ++i) {
        std::vector<double>& p = *params[i];
        const std::vector<double>& g = *grads[i];
        std::vector<double>& acc1 = state.primary[i];
        std::vector<double>& acc2 = state.secondary[i];

        switch (opt.kind) {
            case OptimizerKind::sgd:
                for (std::size_t j = 0; j < p.size(); ++j) p[j] -= lr * g[j];
                break;
            case OptimizerKind::adam: {
                const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.t));
                const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.t));
                for (std::size_t j = 0; j < p.size(); ++j) {
                    acc1[j] = opt.beta1 * acc1[j] + (1.0 - opt.beta1) * g[j];
                    acc2[j] = opt.beta2 * acc2[j] + (1.0 - opt.beta2) * g[j] * g[j];
                    const double m_hat = acc1[j] / c1;
                    const double v_hat = acc2[j] / c2;
                    p[j] -= lr * m_hat / (std::sqrt(v_hat) + eps);
                }
                break;
            }
            case OptimizerKind::adamax: {
                const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.t));
                for (std::size_t j = 0; j < p.size(); ++j) {
                    acc1[j] = opt.beta1 * acc1[j] + (1.0 - opt.beta1) * g[j];
                    acc2[j] = std::max(opt.beta2 * acc2[j], std::abs(g[j]));
                    p[j] -= (lr / c1) * acc1[j] / (acc2[j] + eps);
                }
                break;
            }
            case OptimizerKind::adagrad:
                for (std::size_t j = 0; j < p.size(); ++j) {
                    acc1[j] += g[j] * g[j];
                    p[j] -= lr * g[j] / (std::sqrt(acc1[j]) + eps);
                }
                break;
            case OptimizerKind::rmsprop:
                for (std::size_t j = 0; j < p.size(); ++j) {
                    acc1[j] = opt.rho * acc1[j] + (1.0 - opt.rho) * g[j] * g[j];
                    p[j] -= lr * g[j] / (std::sqrt(acc1[j]) + eps);
                }
                break;
        }
    }
}

}  // namespace mamid
