#include "sinlab/initializers.hpp"

#include <cmath>

#include "sinlab/rng.hpp"

namespace sinlab {

std::string scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::Random: return "random";
        case Scheme::BN: return "bn";
        case Scheme::DIN: return "din";
        case Scheme::LSUV: return "lsuv";
        case Scheme::SINL: return "sinl";
    }
    return "unknown";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
    if (name == "random") return Scheme::Random;
    if (name == "bn") return Scheme::BN;
    if (name == "din") return Scheme::DIN;
    if (name == "lsuv") return Scheme::LSUV;
    if (name == "sinl") return Scheme::SINL;
    return std::nullopt;
}

void InitSpec::validate() const {
    if (!(gain > 0.0) || !std::isfinite(gain)) {
        throw ParameterError("init: gain must be positive and finite");
    }
    if (!(variance_tol > 0.0 && variance_tol < 1.0)) {
        throw ParameterError("init: variance_tol must lie in (0, 1)");
    }
    if (max_var_iters < 1) {
        throw ParameterError("init: max_var_iters must be at least 1");
    }
}

namespace {

void check_dims(const std::vector<std::size_t>& dims) {
    if (dims.size() < 2) {
        throw ParameterError("init: need at least 2 data-layer widths, got " +
                             std::to_string(dims.size()));
    }
    for (std::size_t w : dims) {
        if (w == 0) throw ParameterError("init: layer widths must be positive");
    }
}

void check_input(const std::vector<std::size_t>& dims, const Matrix& x0) {
    if (x0.empty() || x0.rows() != dims.front()) {
        throw ShapeError("init: input data has shape " + shape_string(x0) +
                         ", first layer width is " + std::to_string(dims.front()));
    }
}

}  // namespace

NetworkParams init_random(const std::vector<std::size_t>& dims,
                          ActivationKind activation, const InitSpec& spec) {
    spec.validate();
    check_dims(dims);
    Rng rng(spec.seed);
    NetworkParams params;
    params.layers.reserve(dims.size() - 1);
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        Layer layer;
        layer.weight = gaussian_matrix(dims[k + 1], dims[k], spec.gain, rng);
        layer.bias.assign(dims[k + 1], 0.0);
        layer.activation = activation;
        params.layers.push_back(std::move(layer));
    }
    return params;
}

NetworkParams init_din(const std::vector<std::size_t>& dims,
                       ActivationKind activation, const InitSpec& spec) {
    spec.validate();
    check_dims(dims);
    Rng rng(spec.seed);
    NetworkParams params;
    params.layers.reserve(dims.size() - 1);
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        Layer layer;
        const Matrix draw = gaussian_matrix(dims[k + 1], dims[k], 1.0, rng);
        layer.weight = scale(orthogonal_factor(draw), spec.gain);
        layer.bias.assign(dims[k + 1], 0.0);
        layer.activation = activation;
        params.layers.push_back(std::move(layer));
    }
    return params;
}

NetworkParams normalize_output_variance(const NetworkParams& params,
                                        const Matrix& x0, const InitSpec& spec) {
    spec.validate();
    params.validate();
    if (x0.empty() || x0.rows() != params.input_dim()) {
        throw ShapeError("normalize_output_variance: input shape " +
                         shape_string(x0) + " vs network input dim " +
                         std::to_string(params.input_dim()));
    }
    if (x0.cols() < 2) {
        throw ParameterError(
            "normalize_output_variance: need at least 2 samples");
    }

    NetworkParams out = params;
    Matrix x = x0;
    for (std::size_t k = 0; k < out.depth(); ++k) {
        Layer& layer = out.layers[k];
        Matrix z;
        for (std::size_t iter = 0; iter < spec.max_var_iters; ++iter) {
            z = matmul(layer.weight, x);
            for (std::size_t i = 0; i < z.rows(); ++i) {
                for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += layer.bias[i];
            }
            double mean = 0.0;
            for (double v : z.data()) mean += v;
            mean /= static_cast<double>(z.size());
            double var = 0.0;
            for (double v : z.data()) var += (v - mean) * (v - mean);
            var /= static_cast<double>(z.size());
            const double std_dev = std::sqrt(var);
            if (std::abs(std_dev - 1.0) <= spec.variance_tol) break;
            if (!(std_dev > 1e-300)) {
                throw NumericError("normalize_output_variance: layer " +
                                   std::to_string(k) +
                                   " has zero pre-activation variance");
            }
            const double inv = 1.0 / std_dev;
            layer.weight = scale(layer.weight, inv);
            for (double& b : layer.bias) b *= inv;
        }
        // Final pre-activation under the settled weights feeds the next layer.
        z = matmul(layer.weight, x);
        for (std::size_t i = 0; i < z.rows(); ++i) {
            for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += layer.bias[i];
        }
        x = activation_apply(layer.activation, z);
    }
    return out;
}

NetworkParams init_bn(const std::vector<std::size_t>& dims,
                      ActivationKind activation, const Matrix& x0,
                      const InitSpec& spec) {
    check_input(dims, x0);
    return normalize_output_variance(init_random(dims, activation, spec), x0, spec);
}

NetworkParams init_lsuv(const std::vector<std::size_t>& dims,
                        ActivationKind activation, const Matrix& x0,
                        const InitSpec& spec) {
    check_input(dims, x0);
    return normalize_output_variance(init_din(dims, activation, spec), x0, spec);
}

BridgeResult compute_bridge(const Matrix& xi, const Matrix& xj) {
    if (xi.empty() || xj.empty()) {
        throw ShapeError("compute_bridge: empty data matrix");
    }
    if (xi.cols() != xj.cols()) {
        throw ShapeError("compute_bridge: sample counts disagree, " +
                         shape_string(xi) + " vs " + shape_string(xj));
    }
    BridgeResult result;
    const Matrix gram = matmul(xi, transpose(xi));
    result.e = matmul(matmul(xj, transpose(xi)), pinv(gram));
    result.svd = svd_full(result.e);
    return result;
}

NetworkParams sinl_pair_update(const NetworkParams& params,
                               const ForwardCache& cache, std::size_t front_idx,
                               std::size_t back_idx) {
    params.validate();
    const std::size_t depth = params.depth();
    if (back_idx > depth || front_idx >= back_idx || back_idx - front_idx < 2) {
        throw ParameterError(
            "sinl_pair_update: need data-layer indices with j - i >= 2, got i=" +
            std::to_string(front_idx) + " j=" + std::to_string(back_idx) +
            " depth=" + std::to_string(depth));
    }
    if (cache.post_acts.size() != depth) {
        throw ShapeError("sinl_pair_update: cache does not match params");
    }

    const Matrix& xi =
        front_idx == 0 ? cache.inputs : cache.post_acts[front_idx - 1];
    const Matrix& xj = cache.post_acts[back_idx - 1];
    const BridgeResult bridge = compute_bridge(xi, xj);

    NetworkParams out = params;
    // W_{i -> i+1} <- W_{i -> i+1} V^T ; W_{j-1 -> j} <- U W_{j-1 -> j}
    out.layers[front_idx].weight =
        matmul(out.layers[front_idx].weight, transpose(bridge.svd.v));
    out.layers[back_idx - 1].weight =
        matmul(bridge.svd.u, out.layers[back_idx - 1].weight);
    return out;
}

NetworkParams median_normalize(const NetworkParams& params, std::size_t mid_idx) {
    params.validate();
    if (mid_idx >= params.depth()) {
        throw ParameterError("median_normalize: weight index " +
                             std::to_string(mid_idx) + " out of range for depth " +
                             std::to_string(params.depth()));
    }
    NetworkParams out = params;
    out.layers[mid_idx].weight = orthogonal_factor(out.layers[mid_idx].weight);
    return out;
}

NetworkParams init_sinl(const std::vector<std::size_t>& dims,
                        ActivationKind activation, const Matrix& x0,
                        const InitSpec& spec, SinlTrace* trace) {
    spec.validate();
    check_dims(dims);
    check_input(dims, x0);

    NetworkParams params = init_random(dims, activation, spec);
    ForwardCache cache = forward(params, x0);

    std::size_t i = 0;
    std::size_t j = params.depth();
    while (j - i >= 2) {
        params = sinl_pair_update(params, cache, i, j);
        cache = forward(params, x0);  // inner bridges see the rotated boundary
        if (trace != nullptr) trace->pair_updates.push_back({i, j});
        ++i;
        --j;
    }
    if (j - i == 1) {
        params = median_normalize(params, i);
        if (trace != nullptr) trace->median_weight = i;
    }
    if (spec.attach_bn) {
        params = normalize_output_variance(params, x0, spec);
        if (trace != nullptr) trace->bn_attached = true;
    }
    return params;
}

NetworkParams initialize(const std::vector<std::size_t>& dims,
                         ActivationKind activation, const Matrix& x0,
                         const InitSpec& spec) {
    switch (spec.scheme) {
        case Scheme::Random: return init_random(dims, activation, spec);
        case Scheme::BN: return init_bn(dims, activation, x0, spec);
        case Scheme::DIN: return init_din(dims, activation, spec);
        case Scheme::LSUV: return init_lsuv(dims, activation, x0, spec);
        case Scheme::SINL: return init_sinl(dims, activation, x0, spec);
    }
    throw ParameterError("initialize: unknown scheme");
}

}  // namespace sinlab
