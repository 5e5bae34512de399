#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sinlab/dataset.hpp"
#include "sinlab/initializers.hpp"
#include "sinlab/training.hpp"

namespace sinlab {

// Where the experiment's data comes from: a synthetic blob draw or a CSV
// file. Either way the set is optionally standardized, then split.
struct DataConfig {
    enum class Kind { Blobs, Csv };
    Kind kind = Kind::Blobs;

    // blobs
    std::size_t classes = 3;
    std::size_t per_class = 50;
    std::size_t dim = 2;
    double separation = 3.0;
    std::uint64_t seed = 0;

    // csv
    std::filesystem::path csv_path;

    // shared
    bool standardize_features = true;
    double train_fraction = 0.75;
    std::uint64_t split_seed = 0;

    void validate() const;
};

// One experiment = one dataset, one architecture, a scheme x seed grid, and
// one training schedule. Loaded from a single JSON document.
struct ExperimentConfig {
    DataConfig data;
    std::vector<std::size_t> hidden_widths;
    ActivationKind activation = ActivationKind::Sigmoid;
    std::vector<Scheme> schemes;
    std::vector<std::uint64_t> seeds;

    double gain = 1.0;
    double variance_tol = 0.02;
    std::size_t max_var_iters = 10;
    bool attach_bn = false;

    std::size_t epochs = 1;
    double learning_rate = 0.5;
    double dropout_rate = 0.0;
    std::size_t record_every = 1;

    std::filesystem::path output_dir;

    void validate() const;
};

// Parses and validates a config document. Malformed JSON, unknown keys,
// missing fields, and out-of-range values all raise a parameter error.
ExperimentConfig parse_experiment_config_text(const std::string& json_text);
ExperimentConfig parse_experiment_config(const std::filesystem::path& file);

// Builds, standardizes, and splits the configured dataset.
std::pair<Dataset, Dataset> build_experiment_data(const ExperimentConfig& cfg);

struct CellResult {
    Scheme scheme = Scheme::Random;
    std::uint64_t seed = 0;
    bool ok = false;
    std::size_t final_epoch = 0;
    double final_objective = 0.0;
    double final_train_acc = 0.0;
    double final_test_acc = 0.0;
    std::string status;
};

struct ExperimentResult {
    std::vector<CellResult> cells;
    bool all_ok = false;
};

// Runs every (scheme, seed) cell, up to `jobs` at a time. Each cell writes
// `<scheme>_<seed>_weights_init.csv` and `<scheme>_<seed>_metrics.csv` under
// cfg.output_dir; a summary.csv row per cell is written afterwards in config
// order. Cell failures are captured in their row, not thrown; setup problems
// (bad data file, unwritable directory) propagate as exceptions.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs);

// Wall-clock seconds for one shrinkage initialization per width, square
// layers, best of three repetitions. Rows come back in input order,
// duplicates included.
std::vector<std::pair<std::size_t, double>> timing_probe(
    const std::vector<std::size_t>& widths);

void write_timing_csv(const std::filesystem::path& path,
                      const std::vector<std::pair<std::size_t, double>>& rows);

// Round-trippable decimal form of x ("%.17g"), used by every CSV writer so
// reruns are byte-identical.
std::string format_double(double x);

}  // namespace sinlab
