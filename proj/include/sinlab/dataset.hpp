#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "sinlab/matrix.hpp"

namespace sinlab {

/// Labeled samples, stored feature-major: features is d x n with one
/// column per sample.
struct Dataset {
    Matrix features;
    std::vector<std::size_t> labels;
    std::size_t class_count = 0;

    std::size_t sample_count() const { return labels.size(); }
    std::size_t feature_dim() const { return features.rows(); }

    void validate() const;
};

/// CSV loader. Comma separated, optional header (auto-detected when any
/// field of the first row is non-numeric), label = last column as a
/// non-negative integer, UTF-8, LF or CRLF. class_count = max label + 1.
Dataset load_csv(const std::filesystem::path& path);

/// Gaussian blobs: class k is N(mu_k, I) with the mu_k placed on a scaled
/// simplex (dim >= classes), a circle of radius `separation` (dim >= 2),
/// or a line (dim == 1). Samples are laid out class by class.
Dataset synth_blobs(std::size_t classes, std::size_t per_class, std::size_t dim,
                    double separation, std::uint64_t seed);

/// Per-feature zero mean, unit variance. Features whose variance sits at
/// the rounding floor are centered but not scaled.
Dataset standardize(const Dataset& ds);

/// Exact 0/1 class indicator matrix, class_count x n.
Matrix one_hot(const Dataset& ds);

/// Deterministic shuffled partition; both sides non-empty.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed);

}  // namespace sinlab
