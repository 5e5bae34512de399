#include "sinlab/network.hpp"

#include <cmath>

namespace sinlab {

std::string activation_name(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::ReLU: return "relu";
        case ActivationKind::Identity: return "identity";
    }
    return "unknown";
}

double activation_scalar(ActivationKind kind, double z) {
    switch (kind) {
        case ActivationKind::Sigmoid:
            if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
            {
                const double e = std::exp(z);
                return e / (1.0 + e);
            }
        case ActivationKind::Tanh: return std::tanh(z);
        case ActivationKind::ReLU: return z > 0.0 ? z : 0.0;
        case ActivationKind::Identity: return z;
    }
    return z;
}

double activation_derivative_scalar(ActivationKind kind, double z) {
    switch (kind) {
        case ActivationKind::Sigmoid: {
            const double s = activation_scalar(ActivationKind::Sigmoid, z);
            return s * (1.0 - s);
        }
        case ActivationKind::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case ActivationKind::ReLU:
            return z > 0.0 ? 1.0 : 0.0;  // subgradient 0 at exactly 0
        case ActivationKind::Identity: return 1.0;
    }
    return 1.0;
}

Matrix activation_apply(ActivationKind kind, const Matrix& z) {
    if (z.empty()) throw ShapeError("activation_apply: empty matrix");
    Matrix out = z;
    for (double& v : out.data()) v = activation_scalar(kind, v);
    return out;
}

void NetworkParams::validate() const {
    if (layers.empty()) throw ParameterError("network has no layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const Layer& layer = layers[k];
        if (layer.weight.empty()) {
            throw ShapeError("layer " + std::to_string(k) + ": empty weight");
        }
        if (layer.bias.size() != layer.weight.rows()) {
            throw ShapeError("layer " + std::to_string(k) + ": bias length " +
                             std::to_string(layer.bias.size()) + " vs weight " +
                             shape_string(layer.weight));
        }
        if (k > 0 && layer.weight.cols() != layers[k - 1].weight.rows()) {
            throw ShapeError("layer " + std::to_string(k) + ": input dim " +
                             std::to_string(layer.weight.cols()) +
                             " does not chain from previous output dim " +
                             std::to_string(layers[k - 1].weight.rows()));
        }
    }
}

namespace {

Matrix affine(const Layer& layer, const Matrix& x) {
    Matrix z = matmul(layer.weight, x);
    for (std::size_t i = 0; i < z.rows(); ++i) {
        const double b = layer.bias[i];
        for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += b;
    }
    return z;
}

ForwardCache forward_impl(const NetworkParams& params, const Matrix& x0,
                          double dropout_rate, Rng* rng,
                          const std::vector<Matrix>* replay) {
    params.validate();
    if (x0.empty() || x0.rows() != params.input_dim()) {
        throw ShapeError("forward: input has shape " + shape_string(x0) +
                         ", network expects " + std::to_string(params.input_dim()) +
                         " rows");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
        throw ParameterError("forward: dropout_rate must lie in [0, 1)");
    }
    const bool dropout_on = dropout_rate > 0.0;
    if (dropout_on && rng == nullptr && replay == nullptr) {
        throw ParameterError("forward: dropout requires a generator");
    }
    const std::size_t depth = params.depth();
    if (replay != nullptr && replay->size() != depth) {
        throw ShapeError("forward_replay: mask count " +
                         std::to_string(replay->size()) + " vs depth " +
                         std::to_string(depth));
    }

    ForwardCache cache;
    cache.inputs = x0;
    cache.dropout_rate = dropout_on ? dropout_rate : 0.0;
    cache.pre_acts.reserve(depth);
    cache.post_acts.reserve(depth);
    const double inv_keep = dropout_on ? 1.0 / (1.0 - dropout_rate) : 1.0;

    const Matrix* x = &cache.inputs;
    for (std::size_t k = 0; k < depth; ++k) {
        Matrix z = affine(params.layers[k], *x);
        Matrix p = activation_apply(params.layers[k].activation, z);
        if (dropout_on) {
            Matrix mask(p.rows(), p.cols());
            if (k + 1 < depth) {
                if (replay != nullptr) {
                    const Matrix& given = (*replay)[k];
                    if (given.rows() != p.rows() || given.cols() != p.cols()) {
                        throw ShapeError("forward_replay: mask " + std::to_string(k) +
                                         " has shape " + shape_string(given) +
                                         ", layer output is " + shape_string(p));
                    }
                    mask = given;
                } else {
                    for (double& v : mask.data()) {
                        v = (rng->uniform() < dropout_rate) ? 0.0 : 1.0;
                    }
                }
                for (std::size_t i = 0; i < p.size(); ++i) {
                    p.data()[i] = p.data()[i] * mask.data()[i] * inv_keep;
                }
            } else {
                for (double& v : mask.data()) v = 1.0;  // final layer never dropped
            }
            cache.dropout_masks.push_back(std::move(mask));
        }
        cache.pre_acts.push_back(std::move(z));
        cache.post_acts.push_back(std::move(p));
        x = &cache.post_acts.back();
    }
    return cache;
}

void check_cache_matches(const NetworkParams& params, const ForwardCache& cache) {
    const std::size_t depth = params.depth();
    if (cache.pre_acts.size() != depth || cache.post_acts.size() != depth) {
        throw ShapeError("stale cache: layer count mismatch");
    }
    if (cache.inputs.empty() || cache.inputs.rows() != params.input_dim()) {
        throw ShapeError("stale cache: input dim mismatch");
    }
    const std::size_t n = cache.inputs.cols();
    for (std::size_t k = 0; k < depth; ++k) {
        const std::size_t out_dim = params.layers[k].weight.rows();
        if (cache.pre_acts[k].rows() != out_dim || cache.pre_acts[k].cols() != n ||
            cache.post_acts[k].rows() != out_dim || cache.post_acts[k].cols() != n) {
            throw ShapeError("stale cache: layer " + std::to_string(k) +
                             " shape drift");
        }
    }
    if (!cache.dropout_masks.empty() && cache.dropout_masks.size() != depth) {
        throw ShapeError("stale cache: dropout mask count mismatch");
    }
}

}  // namespace

ForwardCache forward(const NetworkParams& params, const Matrix& x0) {
    return forward_impl(params, x0, 0.0, nullptr, nullptr);
}

ForwardCache forward(const NetworkParams& params, const Matrix& x0,
                     double dropout_rate, Rng* rng) {
    return forward_impl(params, x0, dropout_rate, rng, nullptr);
}

ForwardCache forward_replay(const NetworkParams& params, const Matrix& x0,
                            const std::vector<Matrix>& masks, double dropout_rate) {
    return forward_impl(params, x0, dropout_rate, nullptr, &masks);
}

double objective_mse(const Matrix& output, const Matrix& targets) {
    if (output.rows() != targets.rows() || output.cols() != targets.cols()) {
        throw ShapeError("objective_mse: shape mismatch " + shape_string(output) +
                         " vs " + shape_string(targets));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < output.size(); ++i) {
        const double d = output.data()[i] - targets.data()[i];
        sum += d * d;
    }
    return sum / (2.0 * static_cast<double>(output.cols()));
}

Gradients backward(const NetworkParams& params, const ForwardCache& cache,
                   const Matrix& targets) {
    params.validate();
    check_cache_matches(params, cache);
    const Matrix& out = cache.output();
    if (targets.rows() != out.rows() || targets.cols() != out.cols()) {
        throw ShapeError("backward: targets shape " + shape_string(targets) +
                         " vs output " + shape_string(out));
    }
    const std::size_t depth = params.depth();
    const double n = static_cast<double>(cache.inputs.cols());
    const bool dropout_on = !cache.dropout_masks.empty();
    const double inv_keep = dropout_on ? 1.0 / (1.0 - cache.dropout_rate) : 1.0;

    Gradients grads;
    grads.weight.resize(depth);
    grads.bias.resize(depth);

    // grad_out = dJ/d(layer output as cached), starting from the MSE residual
    Matrix grad_out = scale(subtract(out, targets), 1.0 / n);
    for (std::size_t k = depth; k-- > 0;) {
        const Matrix& z = cache.pre_acts[k];
        Matrix delta(z.rows(), z.cols());
        const bool masked = dropout_on && k + 1 < depth;
        for (std::size_t i = 0; i < z.size(); ++i) {
            double g = grad_out.data()[i];
            if (masked) g *= cache.dropout_masks[k].data()[i] * inv_keep;
            delta.data()[i] =
                g * activation_derivative_scalar(params.layers[k].activation,
                                                z.data()[i]);
        }
        const Matrix& x_prev = (k == 0) ? cache.inputs : cache.post_acts[k - 1];
        grads.weight[k] = matmul(delta, transpose(x_prev));
        grads.bias[k].assign(delta.rows(), 0.0);
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < delta.cols(); ++j) sum += delta(i, j);
            grads.bias[k][i] = sum;
        }
        if (k > 0) grad_out = matmul(transpose(params.layers[k].weight), delta);
    }
    return grads;
}

double accuracy(const Matrix& output, const std::vector<std::size_t>& labels) {
    if (output.empty()) throw ShapeError("accuracy: empty output");
    if (labels.size() != output.cols()) {
        throw ShapeError("accuracy: " + std::to_string(labels.size()) +
                         " labels vs " + std::to_string(output.cols()) + " columns");
    }
    std::size_t hits = 0;
    for (std::size_t j = 0; j < output.cols(); ++j) {
        if (labels[j] >= output.rows()) {
            throw DataError("accuracy: label " + std::to_string(labels[j]) +
                            " out of range for " + std::to_string(output.rows()) +
                            " classes");
        }
        std::size_t arg = 0;
        double best = output(0, j);
        for (std::size_t i = 1; i < output.rows(); ++i) {
            if (output(i, j) > best) {
                best = output(i, j);
                arg = i;
            }
        }
        if (arg == labels[j]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(output.cols());
}

}  // namespace sinlab
