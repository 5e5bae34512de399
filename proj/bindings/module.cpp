#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "sinlab/dataset.hpp"
#include "sinlab/experiment.hpp"
#include "sinlab/initializers.hpp"
#include "sinlab/network.hpp"
#include "sinlab/rng.hpp"
#include "sinlab/svd.hpp"
#include "sinlab/training.hpp"

namespace py = pybind11;
using namespace sinlab;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& arr, const char* name) {
    if (arr.ndim() != 2) {
        throw ShapeError(std::string(name) + " must be a 2-d array");
    }
    const auto rows = static_cast<std::size_t>(arr.shape(0));
    const auto cols = static_cast<std::size_t>(arr.shape(1));
    std::vector<double> values(rows * cols);
    std::memcpy(values.data(), arr.data(), values.size() * sizeof(double));
    return Matrix(rows, cols, std::move(values));
}

py::array_t<double> to_array(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::memcpy(out.mutable_data(), m.data().data(),
                m.size() * sizeof(double));
    return out;
}

py::array_t<double> to_array_1d(const std::vector<double>& v) {
    // the single-integer array_t constructor is avoided on purpose: with
    // pybind11 3.0.4 it allocates a zero-stride array, so every element
    // aliases the first
    const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(v.size())};
    py::array_t<double> out(shape);
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
    return out;
}

py::array_t<std::int64_t> labels_to_array(const std::vector<std::size_t>& labels) {
    const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(labels.size())};
    py::array_t<std::int64_t> out(shape);
    std::int64_t* ptr = out.mutable_data();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ptr[i] = static_cast<std::int64_t>(labels[i]);
    }
    return out;
}

ActivationKind activation_from_string(const std::string& name) {
    if (name == "sigmoid") return ActivationKind::Sigmoid;
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "relu") return ActivationKind::ReLU;
    if (name == "identity") return ActivationKind::Identity;
    throw ParameterError("unknown activation \"" + name +
                         "\" (expected sigmoid, tanh, relu, or identity)");
}

Scheme scheme_from_string(const std::string& name) {
    const auto scheme = scheme_from_name(name);
    if (!scheme) {
        throw ParameterError("unknown scheme \"" + name +
                             "\" (expected random, bn, din, lsuv, or sinl)");
    }
    return *scheme;
}

using LayerPair = std::pair<py::array_t<double>, py::array_t<double>>;

std::vector<LayerPair> params_to_python(const NetworkParams& params) {
    std::vector<LayerPair> out;
    out.reserve(params.layers.size());
    for (const Layer& layer : params.layers) {
        out.emplace_back(to_array(layer.weight), to_array_1d(layer.bias));
    }
    return out;
}

NetworkParams params_from_python(const std::vector<LayerPair>& layers,
                                 const std::string& activation) {
    const ActivationKind kind = activation_from_string(activation);
    NetworkParams params;
    for (const auto& [weight, bias] : layers) {
        Layer layer;
        layer.weight = to_matrix(weight, "weight");
        if (bias.ndim() != 1) throw ShapeError("bias must be a 1-d array");
        layer.bias.assign(bias.data(), bias.data() + bias.shape(0));
        layer.activation = kind;
        params.layers.push_back(std::move(layer));
    }
    params.validate();
    return params;
}

Dataset dataset_from_python(const DoubleArray& features,
                            const std::vector<std::size_t>& labels,
                            std::size_t class_count) {
    Dataset ds;
    ds.features = to_matrix(features, "features");
    ds.labels = labels;
    if (class_count == 0) {
        for (std::size_t label : labels) {
            class_count = std::max(class_count, label + 1);
        }
    }
    ds.class_count = class_count;
    ds.validate();
    return ds;
}

InitSpec make_spec(const std::string& scheme, double gain, std::uint64_t seed,
                   double variance_tol, std::size_t max_var_iters,
                   bool attach_bn) {
    InitSpec spec;
    spec.scheme = scheme_from_string(scheme);
    spec.gain = gain;
    spec.seed = seed;
    spec.variance_tol = variance_tol;
    spec.max_var_iters = max_var_iters;
    spec.attach_bn = attach_bn;
    return spec;
}

py::dict metrics_to_dict(const MetricsRecord& r) {
    py::dict row;
    row["epoch"] = r.epoch;
    row["objective"] = r.objective;
    row["train_accuracy"] = r.train_accuracy;
    row["test_accuracy"] = r.test_accuracy;
    return row;
}

}  // namespace

PYBIND11_MODULE(_sinl, m) {
    m.doc() = "Neural-network initialization lab: SVD utilities, five "
              "initialization schemes, and a deterministic training harness.";

    m.def(
        "svd",
        [](const DoubleArray& a) {
            const SvdResult r = svd_full(to_matrix(a, "a"));
            const std::size_t k = r.s.size();
            Matrix u(r.u.rows(), k);
            for (std::size_t i = 0; i < u.rows(); ++i) {
                for (std::size_t j = 0; j < k; ++j) u(i, j) = r.u(i, j);
            }
            Matrix v(r.v.rows(), k);
            for (std::size_t i = 0; i < v.rows(); ++i) {
                for (std::size_t j = 0; j < k; ++j) v(i, j) = r.v(i, j);
            }
            return py::make_tuple(to_array(u), to_array_1d(r.s), to_array(v));
        },
        py::arg("a"),
        "Thin SVD (u, s, v) with a = u @ diag(s) @ v.T, s sorted descending.");

    m.def(
        "pinv",
        [](const DoubleArray& a) { return to_array(pinv(to_matrix(a, "a"))); },
        py::arg("a"), "Moore-Penrose pseudoinverse.");

    m.def(
        "orthogonal_factor",
        [](const DoubleArray& a) {
            return to_array(orthogonal_factor(to_matrix(a, "a")));
        },
        py::arg("a"),
        "u @ v.T from the SVD: the nearest matrix with unit singular values.");

    m.def(
        "gaussian",
        [](std::size_t rows, std::size_t cols, double std_dev,
           std::uint64_t seed) {
            Rng rng(seed);
            return to_array(gaussian_matrix(rows, cols, std_dev, rng));
        },
        py::arg("rows"), py::arg("cols"), py::arg("std_dev") = 1.0,
        py::arg("seed") = 0, "Seeded N(0, std_dev^2) draw.");

    m.def(
        "synth_blobs",
        [](std::size_t classes, std::size_t per_class, std::size_t dim,
           double separation, std::uint64_t seed) {
            const Dataset ds =
                synth_blobs(classes, per_class, dim, separation, seed);
            return py::make_tuple(to_array(ds.features), labels_to_array(ds.labels));
        },
        py::arg("classes"), py::arg("per_class"), py::arg("dim"),
        py::arg("separation") = 3.0, py::arg("seed") = 0,
        "Gaussian blob classes; returns (features [dim x n], labels).");

    m.def(
        "standardize",
        [](const DoubleArray& features) {
            Dataset ds;
            ds.features = to_matrix(features, "features");
            ds.labels.assign(ds.features.cols(), 0);
            ds.class_count = 1;
            return to_array(standardize(ds).features);
        },
        py::arg("features"),
        "Center each feature row; scale unit variance where variance is "
        "non-zero.");

    m.def(
        "initialize",
        [](const std::vector<std::size_t>& dims, const std::string& activation,
           const DoubleArray& x0, const std::string& scheme, double gain,
           std::uint64_t seed, double variance_tol, std::size_t max_var_iters,
           bool attach_bn) {
            const NetworkParams params = initialize(
                dims, activation_from_string(activation), to_matrix(x0, "x0"),
                make_spec(scheme, gain, seed, variance_tol, max_var_iters,
                          attach_bn));
            return params_to_python(params);
        },
        py::arg("dims"), py::arg("activation"), py::arg("x0"),
        py::arg("scheme"), py::arg("gain") = 1.0, py::arg("seed") = 0,
        py::arg("variance_tol") = 0.02, py::arg("max_var_iters") = 10,
        py::arg("attach_bn") = false,
        "Build layer weights for the given scheme; returns [(weight, bias), "
        "...].");

    m.def(
        "forward",
        [](const std::vector<LayerPair>& layers, const std::string& activation,
           const DoubleArray& x0) {
            const NetworkParams params = params_from_python(layers, activation);
            return to_array(forward(params, to_matrix(x0, "x0")).output());
        },
        py::arg("layers"), py::arg("activation"), py::arg("x0"),
        "Network output for a batch of column samples.");

    m.def(
        "mse",
        [](const DoubleArray& output, const DoubleArray& targets) {
            return objective_mse(to_matrix(output, "output"),
                                 to_matrix(targets, "targets"));
        },
        py::arg("output"), py::arg("targets"),
        "(1/2n) squared-error objective over n columns.");

    m.def(
        "accuracy",
        [](const DoubleArray& output, const std::vector<std::size_t>& labels) {
            return accuracy(to_matrix(output, "output"), labels);
        },
        py::arg("output"), py::arg("labels"),
        "Fraction of columns whose argmax matches the label.");

    m.def(
        "train",
        [](const std::vector<LayerPair>& layers, const std::string& activation,
           const DoubleArray& train_features,
           const std::vector<std::size_t>& train_labels,
           const DoubleArray& test_features,
           const std::vector<std::size_t>& test_labels, std::size_t class_count,
           std::size_t epochs, double learning_rate, double dropout_rate,
           std::size_t record_every, std::uint64_t seed) {
            const NetworkParams params = params_from_python(layers, activation);
            const Dataset train_set =
                dataset_from_python(train_features, train_labels, class_count);
            const Dataset test_set =
                dataset_from_python(test_features, test_labels, class_count);
            TrainConfig cfg;
            cfg.epochs = epochs;
            cfg.learning_rate = learning_rate;
            cfg.dropout_rate = dropout_rate;
            cfg.record_every = record_every;
            cfg.seed = seed;
            auto [trained, metrics] = train(params, train_set, test_set, cfg);
            py::list rows;
            for (const MetricsRecord& r : metrics) rows.append(metrics_to_dict(r));
            return py::make_tuple(params_to_python(trained), rows);
        },
        py::arg("layers"), py::arg("activation"), py::arg("train_features"),
        py::arg("train_labels"), py::arg("test_features"),
        py::arg("test_labels"), py::arg("class_count") = 0, py::arg("epochs") = 1,
        py::arg("learning_rate") = 0.5, py::arg("dropout_rate") = 0.0,
        py::arg("record_every") = 10, py::arg("seed") = 0,
        "Full-batch gradient descent; returns (layers, metrics rows).");

    m.def(
        "run_experiment",
        [](const std::string& config_json, const std::string& output_dir,
           std::size_t jobs) {
            ExperimentConfig cfg = parse_experiment_config_text(config_json);
            if (!output_dir.empty()) cfg.output_dir = output_dir;
            const ExperimentResult result = run_experiment(cfg, jobs);
            py::list rows;
            for (const CellResult& cell : result.cells) {
                py::dict row;
                row["scheme"] = scheme_name(cell.scheme);
                row["seed"] = cell.seed;
                row["ok"] = cell.ok;
                row["final_epoch"] = cell.final_epoch;
                row["final_objective"] = cell.final_objective;
                row["final_train_acc"] = cell.final_train_acc;
                row["final_test_acc"] = cell.final_test_acc;
                row["status"] = cell.status;
                rows.append(row);
            }
            return py::make_tuple(result.all_ok, rows);
        },
        py::arg("config_json"), py::arg("output_dir") = std::string(),
        py::arg("jobs") = 1,
        "Run a JSON-configured scheme/seed grid; writes CSVs, returns "
        "(all_ok, rows).");

    m.def(
        "timing_probe",
        [](const std::vector<std::size_t>& widths) {
            return timing_probe(widths);
        },
        py::arg("widths"),
        "Best-of-three wall time of the shrinkage initializer per width.");
}
