#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sinlab/dataset.hpp"
#include "sinlab/network.hpp"

namespace sinlab {

// Full-batch gradient-descent schedule. learning_rate 0 is allowed and
// performs null updates, which is useful for probing recording behaviour.
struct TrainConfig {
    std::size_t epochs = 1;
    double learning_rate = 0.5;
    double dropout_rate = 0.0;
    std::size_t record_every = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

// One measurement row: objective and accuracy on the training set plus
// accuracy on the held-out set, taken with dropout disabled.
struct MetricsRecord {
    std::size_t epoch = 0;
    double objective = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

// Objective and accuracy of params on one dataset, dropout disabled.
std::pair<double, double> evaluate(const NetworkParams& params,
                                   const Dataset& dataset);

// Runs cfg.epochs full-batch gradient steps on train_set. Metrics are
// recorded at epoch 0 (before any update), every record_every epochs, and at
// the final epoch. A non-finite value during an update aborts with a numeric
// error naming the epoch.
std::pair<NetworkParams, std::vector<MetricsRecord>> train(
    const NetworkParams& params, const Dataset& train_set,
    const Dataset& test_set, const TrainConfig& cfg);

}  // namespace sinlab
