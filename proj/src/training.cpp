#include "sinlab/training.hpp"

#include <cmath>
#include <string>

#include "sinlab/errors.hpp"
#include "sinlab/rng.hpp"

namespace sinlab {

void TrainConfig::validate() const {
    if (epochs == 0) throw ParameterError("train: epochs must be positive");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ParameterError("train: learning_rate must be finite and >= 0");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
        throw ParameterError("train: dropout_rate must lie in [0, 1)");
    }
    if (record_every == 0 || record_every > epochs) {
        throw ParameterError("train: record_every must lie in [1, epochs]");
    }
}

namespace {

void check_compat(const NetworkParams& params, const Dataset& dataset,
                  const char* which) {
    dataset.validate();
    if (dataset.features.rows() != params.input_dim()) {
        throw ShapeError(std::string("train: ") + which + " feature dim " +
                         std::to_string(dataset.features.rows()) +
                         " vs network input dim " +
                         std::to_string(params.input_dim()));
    }
    if (dataset.class_count != params.output_dim()) {
        throw ShapeError(std::string("train: ") + which + " has " +
                         std::to_string(dataset.class_count) +
                         " classes, network output dim is " +
                         std::to_string(params.output_dim()));
    }
}

}  // namespace

std::pair<double, double> evaluate(const NetworkParams& params,
                                   const Dataset& dataset) {
    check_compat(params, dataset, "dataset");
    const ForwardCache cache = forward(params, dataset.features);
    const Matrix targets = one_hot(dataset);
    const double objective = objective_mse(cache.output(), targets);
    const double acc = accuracy(cache.output(), dataset.labels);
    return {objective, acc};
}

std::pair<NetworkParams, std::vector<MetricsRecord>> train(
    const NetworkParams& params, const Dataset& train_set,
    const Dataset& test_set, const TrainConfig& cfg) {
    cfg.validate();
    params.validate();
    check_compat(params, train_set, "training set");
    check_compat(params, test_set, "test set");

    NetworkParams current = params;
    const Matrix targets = one_hot(train_set);
    Rng rng(cfg.seed);

    std::vector<MetricsRecord> metrics;
    auto record = [&](std::size_t epoch) {
        try {
            const auto [objective, train_acc] = evaluate(current, train_set);
            const auto [ignored, test_acc] = evaluate(current, test_set);
            (void)ignored;
            if (!std::isfinite(objective)) {
                throw NumericError("objective is not finite");
            }
            metrics.push_back({epoch, objective, train_acc, test_acc});
        } catch (const NumericError& err) {
            throw NumericError("train: diverged at epoch " +
                               std::to_string(epoch) + ": " + err.what());
        }
    };

    record(0);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        try {
            ForwardCache cache =
                cfg.dropout_rate > 0.0
                    ? forward(current, train_set.features, cfg.dropout_rate, &rng)
                    : forward(current, train_set.features);
            const Gradients grads = backward(current, cache, targets);
            for (std::size_t k = 0; k < current.depth(); ++k) {
                Layer& layer = current.layers[k];
                const Matrix& dw = grads.weight[k];
                for (std::size_t i = 0; i < layer.weight.size(); ++i) {
                    layer.weight.data()[i] -= cfg.learning_rate * dw.data()[i];
                }
                for (std::size_t i = 0; i < layer.bias.size(); ++i) {
                    layer.bias[i] -= cfg.learning_rate * grads.bias[k][i];
                }
            }
            for (const Layer& layer : current.layers) {
                ensure_finite(layer.weight, "train: updated weights");
                for (double b : layer.bias) {
                    if (!std::isfinite(b)) {
                        throw NumericError("train: updated bias is not finite");
                    }
                }
            }
        } catch (const NumericError& err) {
            throw NumericError("train: diverged at epoch " +
                               std::to_string(epoch) + ": " + err.what());
        }
        if (epoch % cfg.record_every == 0 || epoch == cfg.epochs) {
            record(epoch);
        }
    }
    return {std::move(current), std::move(metrics)};
}

}  // namespace sinlab
