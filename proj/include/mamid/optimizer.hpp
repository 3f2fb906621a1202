#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mamid/errors.hpp"

namespace mamid {

enum class OptimizerKind { sgd, adam, adamax, adagrad, rmsprop };

const char* optimizer_name(OptimizerKind kind);
OptimizerKind optimizer_from_name(const std::string& name);
const std::vector<OptimizerKind>& all_optimizers();

/// One optimizer variant plus its scalar hyperparameters. Unused fields are
/// ignored by kinds that do not need them (e.g. betas for sgd).
struct Optimizer {
    OptimizerKind kind = OptimizerKind::sgd;
    double learning_rate = 0.01;
    double beta1 = 0.9;    // adam/adamax first-moment decay
    double beta2 = 0.999;  // adam second-moment decay, adamax infinity-norm decay
    double rho = 0.9;      // rmsprop decaying average
    double epsilon = 1e-8;

    /// Conventional defaults: sgd 0.01, adam/adamax 0.001, adagrad 0.01,
    /// rmsprop 0.001.
    static Optimizer defaults(OptimizerKind kind);

    void validate() const;
};

/// Per-parameter accumulators. `primary` holds first moments (adam/adamax)
/// or squared-gradient sums/averages (adagrad/rmsprop); `secondary` holds
/// adam second moments and adamax infinity norms. Slot shapes mirror the
/// parameter tensors exactly.
struct OptimizerState {
    std::vector<std::vector<double>> primary;
    std::vector<std::vector<double>> secondary;
    std::int64_t t = 0;

    static OptimizerState for_sizes(const std::vector<std::size_t>& sizes);
};

/// Applies one update to every parameter tensor; increments state.t by 1.
/// Rejects the whole step (state untouched) if any gradient is NaN/Inf.
void optimizer_step(const Optimizer& opt, OptimizerState& state,
                    const std::vector<std::vector<double>*>& params,
                    const std::vector<const std::vector<double>*>& grads);

}  // namespace mamid
