#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sinlab/matrix.hpp"
#include "sinlab/rng.hpp"

namespace sinlab {

/// Identity exists for oracle/testing paths only; experiment configs
/// refuse it.
enum class ActivationKind { Sigmoid, Tanh, ReLU, Identity };

std::string activation_name(ActivationKind kind);

double activation_scalar(ActivationKind kind, double z);
double activation_derivative_scalar(ActivationKind kind, double z);

/// Entry-wise activation of z.
Matrix activation_apply(ActivationKind kind, const Matrix& z);

struct Layer {
    Matrix weight;             // out_dim x in_dim
    std::vector<double> bias;  // out_dim
    ActivationKind activation = ActivationKind::Sigmoid;
};

struct NetworkParams {
    std::vector<Layer> layers;

    std::size_t depth() const { return layers.size(); }
    std::size_t input_dim() const { return layers.front().weight.cols(); }
    std::size_t output_dim() const { return layers.back().weight.rows(); }

    /// Shape-chains the layers; throws ShapeError/ParameterError on drift.
    void validate() const;
};

/// Everything one forward pass produced: inputs, per-layer pre-activations
/// Z_k = W_k X_{k-1} + b_k, per-layer outputs X_k, and (when dropout ran)
/// the binary keep masks, one per layer with the final layer all ones.
struct ForwardCache {
    Matrix inputs;
    std::vector<Matrix> pre_acts;
    std::vector<Matrix> post_acts;
    std::vector<Matrix> dropout_masks;  // empty when dropout was off
    double dropout_rate = 0.0;

    const Matrix& output() const { return post_acts.back(); }
};

/// Deterministic forward pass, dropout off.
ForwardCache forward(const NetworkParams& params, const Matrix& x0);

/// Forward pass with inverted dropout on hidden layers: each hidden output
/// entry is zeroed with probability dropout_rate and survivors are scaled
/// by 1/(1-dropout_rate). The final layer is never dropped.
/// dropout_rate > 0 requires rng.
ForwardCache forward(const NetworkParams& params, const Matrix& x0,
                     double dropout_rate, Rng* rng);

/// Re-runs a forward pass under previously sampled masks; bit-identical to
/// the pass that produced them.
ForwardCache forward_replay(const NetworkParams& params, const Matrix& x0,
                            const std::vector<Matrix>& masks, double dropout_rate);

/// (1 / 2n) * ||output - targets||_F^2 with n = sample count (columns).
double objective_mse(const Matrix& output, const Matrix& targets);

struct Gradients {
    std::vector<Matrix> weight;
    std::vector<std::vector<double>> bias;
};

/// Exact gradients of objective_mse w.r.t. every weight and bias. Dropout
/// masks recorded in the cache are replayed identically.
Gradients backward(const NetworkParams& params, const ForwardCache& cache,
                   const Matrix& targets);

/// Fraction of columns whose argmax row equals the label; ties break
/// toward the lowest row index.
double accuracy(const Matrix& output, const std::vector<std::size_t>& labels);

}  // namespace sinlab
