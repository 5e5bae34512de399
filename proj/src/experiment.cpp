#include "sinlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include "json.hpp"
#include "sinlab/errors.hpp"
#include "sinlab/rng.hpp"

namespace sinlab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

void DataConfig::validate() const {
    if (kind == Kind::Blobs) {
        if (classes < 2) throw ParameterError("config: dataset.classes must be >= 2");
        if (per_class == 0) throw ParameterError("config: dataset.per_class must be positive");
        if (dim == 0) throw ParameterError("config: dataset.dim must be positive");
        if (!(separation > 0.0) || !std::isfinite(separation)) {
            throw ParameterError("config: dataset.separation must be positive and finite");
        }
    } else {
        if (csv_path.empty()) throw ParameterError("config: dataset.path must be set");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ParameterError("config: dataset.train_fraction must lie in (0, 1)");
    }
}

void ExperimentConfig::validate() const {
    data.validate();
    for (std::size_t w : hidden_widths) {
        if (w == 0) throw ParameterError("config: hidden widths must be positive");
    }
    if (activation != ActivationKind::Sigmoid && activation != ActivationKind::Tanh &&
        activation != ActivationKind::ReLU) {
        throw ParameterError("config: activation must be sigmoid, tanh, or relu");
    }
    if (schemes.empty()) throw ParameterError("config: schemes must be non-empty");
    if (seeds.empty()) throw ParameterError("config: seeds must be non-empty");
    if (std::set<Scheme>(schemes.begin(), schemes.end()).size() != schemes.size()) {
        throw ParameterError("config: schemes must be unique");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ParameterError("config: seeds must be unique");
    }

    InitSpec init_probe;
    init_probe.gain = gain;
    init_probe.variance_tol = variance_tol;
    init_probe.max_var_iters = max_var_iters;
    init_probe.validate();

    TrainConfig train_probe;
    train_probe.epochs = epochs;
    train_probe.learning_rate = learning_rate;
    train_probe.dropout_rate = dropout_rate;
    train_probe.record_every = record_every;
    train_probe.validate();

    if (output_dir.empty()) {
        throw ParameterError("config: output_dir required (set it in the config or pass --out)");
    }
}

namespace {

[[noreturn]] void config_error(const std::string& msg) {
    throw ParameterError("config: " + msg);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (allowed.count(it.key()) == 0) {
            config_error("unknown key \"" + it.key() + "\" in " + where);
        }
    }
}

double as_double(const json& v, const std::string& key) {
    if (!v.is_number()) config_error(key + " must be a number");
    return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& key) {
    if (!v.is_number_integer()) config_error(key + " must be an integer");
    const auto raw = v.get<long long>();
    if (raw < 0) config_error(key + " must be non-negative");
    return static_cast<std::size_t>(raw);
}

std::uint64_t as_seed(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) {
        return static_cast<std::uint64_t>(v.get<long long>());
    }
    config_error(key + " must be a non-negative integer");
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) config_error(key + " must be a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) config_error(key + " must be true or false");
    return v.get<bool>();
}

DataConfig parse_data_config(const json& obj) {
    if (!obj.is_object()) config_error("dataset must be an object");
    if (!obj.contains("type")) config_error("dataset.type is required");
    const std::string type = as_string(obj.at("type"), "dataset.type");

    DataConfig data;
    if (type == "blobs") {
        data.kind = DataConfig::Kind::Blobs;
        reject_unknown_keys(obj,
                            {"type", "classes", "per_class", "dim", "separation",
                             "seed", "standardize", "train_fraction", "split_seed"},
                            "dataset");
        for (const char* key : {"classes", "per_class", "dim"}) {
            if (!obj.contains(key)) {
                config_error(std::string("dataset.") + key + " is required for blobs");
            }
        }
        data.classes = as_count(obj.at("classes"), "dataset.classes");
        data.per_class = as_count(obj.at("per_class"), "dataset.per_class");
        data.dim = as_count(obj.at("dim"), "dataset.dim");
        if (obj.contains("separation")) {
            data.separation = as_double(obj.at("separation"), "dataset.separation");
        }
        if (obj.contains("seed")) data.seed = as_seed(obj.at("seed"), "dataset.seed");
    } else if (type == "csv") {
        data.kind = DataConfig::Kind::Csv;
        reject_unknown_keys(
            obj, {"type", "path", "standardize", "train_fraction", "split_seed"},
            "dataset");
        if (!obj.contains("path")) config_error("dataset.path is required for csv");
        data.csv_path = as_string(obj.at("path"), "dataset.path");
    } else {
        config_error("dataset.type must be \"blobs\" or \"csv\"");
    }

    if (obj.contains("standardize")) {
        data.standardize_features = as_bool(obj.at("standardize"), "dataset.standardize");
    }
    if (obj.contains("train_fraction")) {
        data.train_fraction = as_double(obj.at("train_fraction"), "dataset.train_fraction");
    }
    if (obj.contains("split_seed")) {
        data.split_seed = as_seed(obj.at("split_seed"), "dataset.split_seed");
    }
    return data;
}

ActivationKind parse_activation(const std::string& name) {
    if (name == "sigmoid") return ActivationKind::Sigmoid;
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "relu") return ActivationKind::ReLU;
    config_error("activation must be \"sigmoid\", \"tanh\", or \"relu\", got \"" +
                 name + "\"");
}

}  // namespace

ExperimentConfig parse_experiment_config_text(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& err) {
        config_error(std::string("invalid JSON: ") + err.what());
    }
    if (!root.is_object()) config_error("top level must be an object");
    reject_unknown_keys(root,
                        {"dataset", "hidden_widths", "activation", "schemes",
                         "seeds", "gain", "variance_tol", "max_var_iters",
                         "attach_bn", "epochs", "learning_rate", "dropout_rate",
                         "record_every", "output_dir"},
                        "the config");

    ExperimentConfig cfg;
    if (!root.contains("dataset")) config_error("dataset is required");
    cfg.data = parse_data_config(root.at("dataset"));

    if (!root.contains("hidden_widths")) config_error("hidden_widths is required");
    const json& widths = root.at("hidden_widths");
    if (!widths.is_array()) config_error("hidden_widths must be an array");
    for (const json& w : widths) {
        cfg.hidden_widths.push_back(as_count(w, "hidden_widths entry"));
    }

    if (!root.contains("activation")) config_error("activation is required");
    cfg.activation = parse_activation(as_string(root.at("activation"), "activation"));

    if (!root.contains("schemes")) config_error("schemes is required");
    const json& schemes = root.at("schemes");
    if (!schemes.is_array()) config_error("schemes must be an array");
    for (const json& s : schemes) {
        const std::string name = as_string(s, "schemes entry");
        const auto scheme = scheme_from_name(name);
        if (!scheme) {
            config_error("unknown scheme \"" + name +
                         "\" (expected random, bn, din, lsuv, or sinl)");
        }
        cfg.schemes.push_back(*scheme);
    }

    if (!root.contains("seeds")) config_error("seeds is required");
    const json& seeds = root.at("seeds");
    if (!seeds.is_array()) config_error("seeds must be an array");
    for (const json& s : seeds) cfg.seeds.push_back(as_seed(s, "seeds entry"));

    if (root.contains("gain")) cfg.gain = as_double(root.at("gain"), "gain");
    if (root.contains("variance_tol")) {
        cfg.variance_tol = as_double(root.at("variance_tol"), "variance_tol");
    }
    if (root.contains("max_var_iters")) {
        cfg.max_var_iters = as_count(root.at("max_var_iters"), "max_var_iters");
    }
    if (root.contains("attach_bn")) {
        cfg.attach_bn = as_bool(root.at("attach_bn"), "attach_bn");
    }

    if (!root.contains("epochs")) config_error("epochs is required");
    cfg.epochs = as_count(root.at("epochs"), "epochs");
    if (root.contains("learning_rate")) {
        cfg.learning_rate = as_double(root.at("learning_rate"), "learning_rate");
    }
    if (root.contains("dropout_rate")) {
        cfg.dropout_rate = as_double(root.at("dropout_rate"), "dropout_rate");
    }
    cfg.record_every = root.contains("record_every")
                           ? as_count(root.at("record_every"), "record_every")
                           : std::min<std::size_t>(10, std::max<std::size_t>(cfg.epochs, 1));

    if (root.contains("output_dir")) {
        cfg.output_dir = as_string(root.at("output_dir"), "output_dir");
    }
    return cfg;
}

ExperimentConfig parse_experiment_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) config_error("cannot read " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_experiment_config_text(text);
}

std::pair<Dataset, Dataset> build_experiment_data(const ExperimentConfig& cfg) {
    cfg.data.validate();
    Dataset full = cfg.data.kind == DataConfig::Kind::Blobs
                       ? synth_blobs(cfg.data.classes, cfg.data.per_class,
                                     cfg.data.dim, cfg.data.separation,
                                     cfg.data.seed)
                       : load_csv(cfg.data.csv_path);
    if (cfg.data.standardize_features) full = standardize(full);
    return split(full, cfg.data.train_fraction, cfg.data.split_seed);
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << content;
    out.close();
    if (!out) throw DataError("failed writing " + path.string());
}

std::string metrics_csv(const std::vector<MetricsRecord>& metrics) {
    std::string text = "epoch,objective,train_acc,test_acc\n";
    for (const MetricsRecord& r : metrics) {
        text += std::to_string(r.epoch);
        text += ',';
        text += format_double(r.objective);
        text += ',';
        text += format_double(r.train_accuracy);
        text += ',';
        text += format_double(r.test_accuracy);
        text += '\n';
    }
    return text;
}

std::string weights_csv(const NetworkParams& params) {
    std::string text = "layer,row,col,value\n";
    for (std::size_t k = 0; k < params.depth(); ++k) {
        const Matrix& w = params.layers[k].weight;
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.cols(); ++j) {
                text += std::to_string(k);
                text += ',';
                text += std::to_string(i);
                text += ',';
                text += std::to_string(j);
                text += ',';
                text += format_double(w(i, j));
                text += '\n';
            }
        }
    }
    return text;
}

std::string sanitize_status(std::string status) {
    for (char& c : status) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') c = ';';
    }
    return status;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
    cfg.validate();
    const auto [train_set, test_set] = build_experiment_data(cfg);

    std::vector<std::size_t> dims;
    dims.push_back(train_set.features.rows());
    dims.insert(dims.end(), cfg.hidden_widths.begin(), cfg.hidden_widths.end());
    dims.push_back(train_set.class_count);

    fs::create_directories(cfg.output_dir);

    ExperimentResult result;
    for (Scheme scheme : cfg.schemes) {
        for (std::uint64_t seed : cfg.seeds) {
            CellResult cell;
            cell.scheme = scheme;
            cell.seed = seed;
            result.cells.push_back(cell);
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto run_cell = [&](CellResult& cell) {
        const std::string stem =
            scheme_name(cell.scheme) + "_" + std::to_string(cell.seed);
        try {
            InitSpec spec;
            spec.scheme = cell.scheme;
            spec.gain = cfg.gain;
            spec.variance_tol = cfg.variance_tol;
            spec.max_var_iters = cfg.max_var_iters;
            spec.attach_bn = cfg.attach_bn;
            spec.seed = cell.seed;

            const NetworkParams params =
                initialize(dims, cfg.activation, train_set.features, spec);
            write_file(cfg.output_dir / (stem + "_weights_init.csv"),
                       weights_csv(params));

            TrainConfig tc;
            tc.epochs = cfg.epochs;
            tc.learning_rate = cfg.learning_rate;
            tc.dropout_rate = cfg.dropout_rate;
            tc.record_every = cfg.record_every;
            tc.seed = cell.seed;
            const auto [trained, metrics] = train(params, train_set, test_set, tc);
            (void)trained;
            write_file(cfg.output_dir / (stem + "_metrics.csv"),
                       metrics_csv(metrics));

            const MetricsRecord& last = metrics.back();
            cell.ok = true;
            cell.final_epoch = last.epoch;
            cell.final_objective = last.objective;
            cell.final_train_acc = last.train_accuracy;
            cell.final_test_acc = last.test_accuracy;
            cell.status = "ok";
        } catch (const std::exception& err) {
            cell.ok = false;
            cell.final_epoch = 0;
            cell.final_objective = nan;
            cell.final_train_acc = nan;
            cell.final_test_acc = nan;
            cell.status = err.what();
        }
    };

    const std::size_t worker_count =
        std::max<std::size_t>(1, std::min(jobs, result.cells.size()));
    if (worker_count == 1) {
        for (CellResult& cell : result.cells) run_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(worker_count);
        for (std::size_t t = 0; t < worker_count; ++t) {
            workers.emplace_back([&]() {
                while (true) {
                    const std::size_t idx = next.fetch_add(1);
                    if (idx >= result.cells.size()) break;
                    run_cell(result.cells[idx]);
                }
            });
        }
        for (std::thread& w : workers) w.join();
    }

    std::string summary =
        "scheme,seed,final_epoch,final_objective,final_train_acc,final_test_acc,status\n";
    for (const CellResult& cell : result.cells) {
        summary += scheme_name(cell.scheme);
        summary += ',';
        summary += std::to_string(cell.seed);
        summary += ',';
        summary += std::to_string(cell.final_epoch);
        summary += ',';
        summary += format_double(cell.final_objective);
        summary += ',';
        summary += format_double(cell.final_train_acc);
        summary += ',';
        summary += format_double(cell.final_test_acc);
        summary += ',';
        summary += sanitize_status(cell.status);
        summary += '\n';
    }
    write_file(cfg.output_dir / "summary.csv", summary);

    result.all_ok = std::all_of(result.cells.begin(), result.cells.end(),
                                [](const CellResult& c) { return c.ok; });
    return result;
}

std::vector<std::pair<std::size_t, double>> timing_probe(
    const std::vector<std::size_t>& widths) {
    if (widths.empty()) {
        throw ParameterError("timing_probe: width sweep must be non-empty");
    }
    for (std::size_t w : widths) {
        if (w == 0) throw ParameterError("timing_probe: widths must be positive");
    }

    constexpr std::size_t kSamples = 128;
    constexpr int kReps = 3;
    std::vector<std::pair<std::size_t, double>> rows;
    rows.reserve(widths.size());
    for (std::size_t w : widths) {
        Rng rng(0x9E3779B9u + w);
        const Matrix x0 = gaussian_matrix(w, kSamples, 1.0, rng);
        const std::vector<std::size_t> dims = {w, w, w, w};
        InitSpec spec;
        spec.scheme = Scheme::SINL;
        spec.seed = 42;

        double best = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < kReps; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const NetworkParams params =
                init_sinl(dims, ActivationKind::Sigmoid, x0, spec);
            const auto t1 = std::chrono::steady_clock::now();
            (void)params;
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
        }
        rows.emplace_back(w, best);
    }
    return rows;
}

void write_timing_csv(const std::filesystem::path& path,
                      const std::vector<std::pair<std::size_t, double>>& rows) {
    std::string text = "width,seconds\n";
    for (const auto& [w, seconds] : rows) {
        text += std::to_string(w);
        text += ',';
        text += format_double(seconds);
        text += '\n';
    }
    write_file(path, text);
}

}  // namespace sinlab
