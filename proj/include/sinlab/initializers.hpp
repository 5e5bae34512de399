#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sinlab/network.hpp"
#include "sinlab/svd.hpp"

namespace sinlab {

enum class Scheme { Random, BN, DIN, LSUV, SINL };

std::string scheme_name(Scheme scheme);
std::optional<Scheme> scheme_from_name(const std::string& name);

struct InitSpec {
    Scheme scheme = Scheme::Random;
    double gain = 1.0;            // std of the random draw
    double variance_tol = 0.02;   // BN/LSUV stopping tolerance around 1
    std::size_t max_var_iters = 10;
    bool attach_bn = false;       // run variance normalization after SINL
    std::uint64_t seed = 0;

    void validate() const;
};

/// Least-squares linear map from layer-i data to layer-j data together
/// with its SVD: e = xj * xi^T * pinv(xi * xi^T).
struct BridgeResult {
    Matrix e;
    SvdResult svd;
};

/// What init_sinl did, for structural verification: which data-layer pairs
/// were bridge-rotated, which weight (if any) got the median treatment.
struct SinlTrace {
    struct PairUpdate {
        std::size_t front_data;  // data-layer index i
        std::size_t back_data;   // data-layer index j
    };
    std::vector<PairUpdate> pair_updates;
    std::optional<std::size_t> median_weight;  // weight index, 0-based
    bool bn_attached = false;
};

/// Each weight i.i.d. N(0, gain^2), biases zero. dims are data-layer
/// widths, so dims.size() - 1 weight layers come back.
NetworkParams init_random(const std::vector<std::size_t>& dims,
                          ActivationKind activation, const InitSpec& spec);

/// Each weight is the orthogonal factor of a fresh Gaussian draw, scaled
/// by gain: all non-zero singular values equal gain.
NetworkParams init_din(const std::vector<std::size_t>& dims,
                       ActivationKind activation, const InitSpec& spec);

/// First-to-last pass dividing each layer's weight and bias by the std of
/// its pre-activation entries until that std is within variance_tol of 1
/// or max_var_iters is hit. Layer k+1 statistics see layer k finalized.
NetworkParams normalize_output_variance(const NetworkParams& params,
                                        const Matrix& x0, const InitSpec& spec);

NetworkParams init_bn(const std::vector<std::size_t>& dims,
                      ActivationKind activation, const Matrix& x0,
                      const InitSpec& spec);

NetworkParams init_lsuv(const std::vector<std::size_t>& dims,
                        ActivationKind activation, const Matrix& x0,
                        const InitSpec& spec);

BridgeResult compute_bridge(const Matrix& xi, const Matrix& xj);

/// One shrinkage step: with (u, v) from the bridge between data layers i
/// and j, right-multiplies weight i+1 by v^T and left-multiplies weight j
/// by u (1-based weight naming; these are layers[i] and layers[j-1]).
/// Requires j - i >= 2 so the two touched weights are distinct.
NetworkParams sinl_pair_update(const NetworkParams& params,
                               const ForwardCache& cache, std::size_t front_idx,
                               std::size_t back_idx);

/// Replaces the weight at mid_idx by its orthogonal factor.
NetworkParams median_normalize(const NetworkParams& params, std::size_t mid_idx);

/// Shrinkage initialization: random start, then bridge rotations of the
/// outermost weight pair moving inward (recomputing the forward data after
/// each pair), median polar normalization when the weight count is odd,
/// and optionally a variance-normalization pass.
NetworkParams init_sinl(const std::vector<std::size_t>& dims,
                        ActivationKind activation, const Matrix& x0,
                        const InitSpec& spec, SinlTrace* trace = nullptr);

/// Dispatch on spec.scheme.
NetworkParams initialize(const std::vector<std::size_t>& dims,
                         ActivationKind activation, const Matrix& x0,
                         const InitSpec& spec);

}  // namespace sinlab
