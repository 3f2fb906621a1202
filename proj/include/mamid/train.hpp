#pragma once

#include <cstdint>
#include <vector>

#include "mamid/network.hpp"
#include "mamid/optimizer.hpp"

namespace mamid {

struct TrainConfig {
    std::size_t epochs = 1;
    std::size_t batch_size = 1;
    std::uint64_t shuffle_seed = 0;
    LossKind loss = LossKind::categorical_cross_entropy;
};

/// Per-epoch training loss and accuracy (computed on the pre-update forward
/// pass of each batch).
struct TrainHistory {
    std::vector<double> loss;
    std::vector<double> accuracy;
};

/// Mini-batch training: epochs x ceil(n/batch_size) optimizer steps, data
/// reshuffled each epoch from cfg.shuffle_seed. Fully deterministic.
/// Throws TrainingDivergedError (with the epoch index) if the loss or any
/// parameter goes non-finite.
TrainHistory train(Network& net, const Matrix& features, const Matrix& targets,
                   const TrainConfig& cfg, const Optimizer& opt);

}  // namespace mamid
