#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "sinlab/experiment.hpp"
#include "test_helpers.hpp"

using namespace sinlab;
using namespace test_support;
namespace fs = std::filesystem;

namespace {

// Scratch directory removed on scope exit.
struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        const auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
        path = fs::temp_directory_path() /
               ("sinlab_test_" + std::to_string(counter.fetch_add(1)) + "_" +
                std::to_string(tick));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

void write_text(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

const char* kMinimalConfig = R"({
  "dataset": {"type": "blobs", "classes": 3, "per_class": 12, "dim": 3},
  "hidden_widths": [6],
  "activation": "sigmoid",
  "schemes": ["random", "sinl"],
  "seeds": [1, 2],
  "epochs": 8,
  "record_every": 4,
  "output_dir": "replaced-per-test"
})";

ExperimentConfig small_config(const fs::path& out_dir) {
    ExperimentConfig cfg = parse_experiment_config_text(kMinimalConfig);
    cfg.output_dir = out_dir;
    return cfg;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) lines.push_back(current);
    return lines;
}

}  // namespace

TEST_CASE("parsing fills unspecified fields with defaults") {
    const ExperimentConfig cfg = parse_experiment_config_text(R"({
      "dataset": {"type": "blobs", "classes": 2, "per_class": 5, "dim": 2},
      "hidden_widths": [4, 4],
      "activation": "tanh",
      "schemes": ["din"],
      "seeds": [0],
      "epochs": 100
    })");
    CHECK(cfg.data.kind == DataConfig::Kind::Blobs);
    CHECK(cfg.data.separation == 3.0);
    CHECK(cfg.data.seed == 0);
    CHECK(cfg.data.standardize_features);
    CHECK(cfg.data.train_fraction == 0.75);
    CHECK(cfg.data.split_seed == 0);
    CHECK(cfg.hidden_widths == std::vector<std::size_t>{4, 4});
    CHECK(cfg.activation == ActivationKind::Tanh);
    CHECK(cfg.gain == 1.0);
    CHECK(cfg.variance_tol == 0.02);
    CHECK(cfg.max_var_iters == 10);
    CHECK_FALSE(cfg.attach_bn);
    CHECK(cfg.learning_rate == 0.5);
    CHECK(cfg.dropout_rate == 0.0);
    CHECK(cfg.record_every == 10);
    CHECK(cfg.output_dir.empty());
}

TEST_CASE("record_every defaults to the epoch count when that is smaller") {
    const ExperimentConfig cfg = parse_experiment_config_text(R"({
      "dataset": {"type": "blobs", "classes": 2, "per_class": 5, "dim": 2},
      "hidden_widths": [],
      "activation": "relu",
      "schemes": ["random"],
      "seeds": [3],
      "epochs": 5
    })");
    CHECK(cfg.record_every == 5);
    CHECK(cfg.hidden_widths.empty());
}

TEST_CASE("parsing rejects malformed documents") {
    CHECK_THROWS_AS(parse_experiment_config_text("{not json"), ParameterError);
    CHECK_THROWS_AS(parse_experiment_config_text("[1, 2]"), ParameterError);

    const std::string base = kMinimalConfig;

    SUBCASE("unknown top-level key") {
        std::string text = base;
        text.insert(1, "\"mystery\": 1,");
        CHECK_THROWS_WITH_AS(parse_experiment_config_text(text),
                             doctest::Contains("mystery"), ParameterError);
    }
    SUBCASE("unknown dataset key") {
        std::string text = base;
        const auto pos = text.find("\"dim\": 3");
        text.insert(pos, "\"sep\": 1.0, ");
        CHECK_THROWS_WITH_AS(parse_experiment_config_text(text),
                             doctest::Contains("sep"), ParameterError);
    }
    SUBCASE("missing required keys") {
        for (const char* key :
             {"dataset", "hidden_widths", "activation", "schemes", "seeds",
              "epochs"}) {
            std::string text = base;
            const auto pos = text.find(std::string("\"") + key + "\"");
            REQUIRE(pos != std::string::npos);
            const auto end = text.find('\n', pos);
            text.erase(pos, end - pos + 1);
            CHECK_THROWS_WITH_AS(parse_experiment_config_text(text),
                                 doctest::Contains(key), ParameterError);
        }
    }
    SUBCASE("identity activation is not trainable here") {
        std::string text = base;
        const auto pos = text.find("\"sigmoid\"");
        text.replace(pos, 9, "\"identity\"");
        CHECK_THROWS_AS(parse_experiment_config_text(text), ParameterError);
    }
    SUBCASE("unknown scheme") {
        std::string text = base;
        const auto pos = text.find("\"sinl\"");
        text.replace(pos, 6, "\"xavier\"");
        CHECK_THROWS_WITH_AS(parse_experiment_config_text(text),
                             doctest::Contains("xavier"), ParameterError);
    }
    SUBCASE("negative seed") {
        std::string text = base;
        const auto pos = text.find("[1, 2]");
        text.replace(pos, 6, "[1, -2]");
        CHECK_THROWS_AS(parse_experiment_config_text(text), ParameterError);
    }
    SUBCASE("wrong types") {
        std::string text = base;
        const auto pos = text.find("\"epochs\": 8");
        text.replace(pos, 11, "\"epochs\": \"8\"");
        CHECK_THROWS_AS(parse_experiment_config_text(text), ParameterError);
    }
}

TEST_CASE("validation rejects duplicates and empty grids") {
    TempDir tmp;
    SUBCASE("duplicate schemes") {
        ExperimentConfig cfg = small_config(tmp.path);
        cfg.schemes = {Scheme::Random, Scheme::Random};
        CHECK_THROWS_AS(cfg.validate(), ParameterError);
    }
    SUBCASE("duplicate seeds") {
        ExperimentConfig cfg = small_config(tmp.path);
        cfg.seeds = {4, 4};
        CHECK_THROWS_AS(cfg.validate(), ParameterError);
    }
    SUBCASE("empty schemes") {
        ExperimentConfig cfg = small_config(tmp.path);
        cfg.schemes.clear();
        CHECK_THROWS_AS(cfg.validate(), ParameterError);
    }
    SUBCASE("empty seeds") {
        ExperimentConfig cfg = small_config(tmp.path);
        cfg.seeds.clear();
        CHECK_THROWS_AS(cfg.validate(), ParameterError);
    }
    SUBCASE("missing output dir") {
        ExperimentConfig cfg = small_config("");
        CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("output_dir"),
                             ParameterError);
    }
    SUBCASE("zero hidden width") {
        ExperimentConfig cfg = small_config(tmp.path);
        cfg.hidden_widths = {6, 0};
        CHECK_THROWS_AS(cfg.validate(), ParameterError);
    }
}

TEST_CASE("build_experiment_data matches the hand-assembled pipeline") {
    TempDir tmp;
    ExperimentConfig cfg = small_config(tmp.path);
    cfg.data.classes = 3;
    cfg.data.per_class = 15;
    cfg.data.dim = 4;
    cfg.data.separation = 2.5;
    cfg.data.seed = 77;
    cfg.data.train_fraction = 0.6;
    cfg.data.split_seed = 5;

    const auto [train_set, test_set] = build_experiment_data(cfg);
    const Dataset manual = standardize(synth_blobs(3, 15, 4, 2.5, 77));
    const auto [manual_train, manual_test] = split(manual, 0.6, 5);
    CHECK(bitwise_equal(train_set.features, manual_train.features));
    CHECK(train_set.labels == manual_train.labels);
    CHECK(bitwise_equal(test_set.features, manual_test.features));
    CHECK(test_set.labels == manual_test.labels);

    cfg.data.standardize_features = false;
    const auto [raw_train, raw_test] = build_experiment_data(cfg);
    (void)raw_test;
    const auto [plain_train, plain_test] =
        split(synth_blobs(3, 15, 4, 2.5, 77), 0.6, 5);
    (void)plain_test;
    CHECK(bitwise_equal(raw_train.features, plain_train.features));
}

TEST_CASE("csv-backed experiments load, and a missing file is a data error") {
    TempDir tmp;
    const fs::path csv = tmp.path / "points.csv";
    write_text(csv,
               "1.0,2.0,0\n-1.0,0.5,1\n0.25,-2.0,1\n3.0,1.0,0\n"
               "0.5,0.5,1\n-2.0,1.5,0\n1.5,-0.5,1\n-0.5,-1.5,0\n");
    ExperimentConfig cfg = small_config(tmp.path / "out");
    cfg.data.kind = DataConfig::Kind::Csv;
    cfg.data.csv_path = csv;
    cfg.data.standardize_features = false;
    cfg.data.train_fraction = 0.5;

    const auto [train_set, test_set] = build_experiment_data(cfg);
    CHECK(train_set.sample_count() + test_set.sample_count() == 8);
    CHECK(train_set.feature_dim() == 2);
    CHECK(train_set.class_count == 2);

    cfg.data.csv_path = tmp.path / "absent.csv";
    CHECK_THROWS_AS(build_experiment_data(cfg), DataError);
}

TEST_CASE("an experiment writes the full per-cell file contract") {
    TempDir tmp;
    const fs::path out = tmp.path / "out";
    const ExperimentConfig cfg = small_config(out);
    const ExperimentResult result = run_experiment(cfg, 1);

    REQUIRE(result.cells.size() == 4);
    CHECK(result.all_ok);
    for (const CellResult& cell : result.cells) {
        CHECK(cell.ok);
        CHECK(cell.status == "ok");
        CHECK(cell.final_epoch == 8);
        CHECK(std::isfinite(cell.final_objective));
    }
    // grid is laid out scheme-major, seed-minor, in config order
    CHECK(result.cells[0].scheme == Scheme::Random);
    CHECK(result.cells[0].seed == 1);
    CHECK(result.cells[1].seed == 2);
    CHECK(result.cells[2].scheme == Scheme::SINL);
    CHECK(result.cells[3].seed == 2);

    for (const char* stem : {"random_1", "random_2", "sinl_1", "sinl_2"}) {
        CHECK(fs::exists(out / (std::string(stem) + "_metrics.csv")));
        CHECK(fs::exists(out / (std::string(stem) + "_weights_init.csv")));
    }

    const std::string metrics = read_text(out / "random_1_metrics.csv");
    const auto metric_lines = split_lines(metrics);
    REQUIRE(metric_lines.size() == 4);  // header + epochs 0, 4, 8
    CHECK(metric_lines[0] == "epoch,objective,train_acc,test_acc");
    CHECK(metric_lines[1].substr(0, 2) == "0,");
    CHECK(metric_lines[2].substr(0, 2) == "4,");
    CHECK(metric_lines[3].substr(0, 2) == "8,");
    CHECK(metrics.find('\r') == std::string::npos);

    const std::string weights = read_text(out / "sinl_1_weights_init.csv");
    const auto weight_lines = split_lines(weights);
    CHECK(weight_lines[0] == "layer,row,col,value");
    // dims are 3 -> 6 -> 3: 6*3 + 3*6 entries plus the header
    CHECK(weight_lines.size() == 1 + 6 * 3 + 3 * 6);
    CHECK(weights.find('\r') == std::string::npos);

    const auto summary_lines = split_lines(read_text(out / "summary.csv"));
    REQUIRE(summary_lines.size() == 5);
    CHECK(summary_lines[0] ==
          "scheme,seed,final_epoch,final_objective,final_train_acc,final_test_acc,status");
    CHECK(summary_lines[1].substr(0, 9) == "random,1,");
    CHECK(summary_lines[2].substr(0, 9) == "random,2,");
    CHECK(summary_lines[3].substr(0, 7) == "sinl,1,");
    CHECK(summary_lines[4].substr(0, 7) == "sinl,2,");
    for (std::size_t i = 1; i < summary_lines.size(); ++i) {
        CHECK(summary_lines[i].substr(summary_lines[i].size() - 3) == ",ok");
    }
}

TEST_CASE("reruns are byte-identical, whatever the worker count") {
    TempDir tmp;
    const ExperimentConfig cfg_a = small_config(tmp.path / "a");
    const ExperimentConfig cfg_b = small_config(tmp.path / "b");
    const ExperimentConfig cfg_c = small_config(tmp.path / "c");
    run_experiment(cfg_a, 1);
    run_experiment(cfg_b, 1);
    run_experiment(cfg_c, 3);

    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(tmp.path / "a")) {
        const std::string name = entry.path().filename().string();
        const std::string reference = read_text(entry.path());
        CHECK(read_text(tmp.path / "b" / name) == reference);
        CHECK(read_text(tmp.path / "c" / name) == reference);
        ++compared;
    }
    CHECK(compared == 9);  // 4 metrics + 4 weight dumps + summary
}

TEST_CASE("a diverging cell is reported in place, not thrown") {
    TempDir tmp;
    const fs::path out = tmp.path / "out";
    ExperimentConfig cfg = small_config(out);
    cfg.activation = ActivationKind::ReLU;
    cfg.schemes = {Scheme::Random};
    cfg.seeds = {1};
    // a gain this large overflows the second pre-activation to infinity
    cfg.gain = 1e155;
    cfg.epochs = 5;
    cfg.record_every = 5;

    const ExperimentResult result = run_experiment(cfg, 1);
    REQUIRE(result.cells.size() == 1);
    CHECK_FALSE(result.all_ok);
    const CellResult& cell = result.cells[0];
    CHECK_FALSE(cell.ok);
    CHECK(cell.status != "ok");
    CHECK(std::isnan(cell.final_objective));
    CHECK(std::isnan(cell.final_train_acc));

    // the initial weights were dumped before training started; no metrics
    CHECK(fs::exists(out / "random_1_weights_init.csv"));
    CHECK_FALSE(fs::exists(out / "random_1_metrics.csv"));

    const auto summary_lines = split_lines(read_text(out / "summary.csv"));
    REQUIRE(summary_lines.size() == 2);
    CHECK(summary_lines[1].find("nan") != std::string::npos);
    CHECK(summary_lines[1].find(",ok") == std::string::npos);
    // status text is sanitized so the row stays a 7-field csv line
    std::size_t commas = 0;
    for (char c : summary_lines[1]) commas += c == ',';
    CHECK(commas == 6);
}

TEST_CASE("job counts outside the useful range are clamped") {
    TempDir tmp;
    ExperimentConfig cfg = small_config(tmp.path / "zero");
    cfg.schemes = {Scheme::Random};
    cfg.seeds = {1};
    cfg.epochs = 2;
    cfg.record_every = 2;
    const ExperimentResult r0 = run_experiment(cfg, 0);
    CHECK(r0.all_ok);
    cfg.output_dir = tmp.path / "many";
    const ExperimentResult r64 = run_experiment(cfg, 64);
    CHECK(r64.all_ok);
    CHECK(read_text(tmp.path / "zero" / "summary.csv") ==
          read_text(tmp.path / "many" / "summary.csv"));
}

TEST_CASE("timing probe covers each requested width in order") {
    CHECK_THROWS_AS(timing_probe({}), ParameterError);
    CHECK_THROWS_AS(timing_probe({8, 0}), ParameterError);

    const auto rows = timing_probe({8, 16});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].first == 8);
    CHECK(rows[1].first == 16);
    for (const auto& [w, seconds] : rows) {
        (void)w;
        CHECK(seconds > 0.0);
        CHECK(std::isfinite(seconds));
    }

    const auto repeated = timing_probe({8, 8});
    REQUIRE(repeated.size() == 2);
    CHECK(repeated[0].first == 8);
    CHECK(repeated[1].first == 8);
}

TEST_CASE("timing csv lists width and seconds per row") {
    TempDir tmp;
    const fs::path out = tmp.path / "timing.csv";
    write_timing_csv(out, {{8, 0.5}, {16, 1.25}});
    const auto lines = split_lines(read_text(out));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "width,seconds");
    CHECK(lines[1] == "8,0.5");
    CHECK(lines[2] == "16,1.25");
}

TEST_CASE("the command-line binary maps outcomes to exit codes") {
    const char* cli = std::getenv("SINL_CLI");
    if (cli == nullptr) {
        MESSAGE("SINL_CLI not set; run through ctest to exercise the binary");
        return;
    }
    TempDir tmp;
    auto exit_code = [&](const std::string& args) {
        const std::string command =
            std::string(cli) + " " + args + " > /dev/null 2>&1";
        const int status = std::system(command.c_str());
        REQUIRE(WIFEXITED(status));
        return WEXITSTATUS(status);
    };

    SUBCASE("a clean run exits 0 and writes its summary") {
        const fs::path config = tmp.path / "config.json";
        write_text(config, kMinimalConfig);
        const fs::path out = tmp.path / "out";
        CHECK(exit_code("run --config " + config.string() + " --out " +
                        out.string()) == 0);
        CHECK(fs::exists(out / "summary.csv"));
    }
    SUBCASE("a failing cell exits 1") {
        const fs::path config = tmp.path / "diverge.json";
        write_text(config, R"({
          "dataset": {"type": "blobs", "classes": 3, "per_class": 12, "dim": 3},
          "hidden_widths": [6],
          "activation": "relu",
          "schemes": ["random"],
          "seeds": [1],
          "gain": 1e155,
          "epochs": 5,
          "record_every": 5
        })");
        CHECK(exit_code("run --config " + config.string() + " --out " +
                        (tmp.path / "dout").string()) == 1);
    }
    SUBCASE("setup problems exit 2") {
        const fs::path config = tmp.path / "bad.json";
        write_text(config, "{broken");
        CHECK(exit_code("run --config " + config.string() + " --out " +
                        (tmp.path / "bout").string()) == 2);
        CHECK(exit_code("run --config " + (tmp.path / "absent.json").string() +
                        " --out " + (tmp.path / "aout").string()) == 2);
        CHECK(exit_code("run") == 2);
        CHECK(exit_code("bogus-subcommand") == 2);
    }
    SUBCASE("the probe subcommand writes its csv") {
        const fs::path out = tmp.path / "probe.csv";
        CHECK(exit_code("probe --widths 4,8 --out " + out.string()) == 0);
        const auto lines = split_lines(read_text(out));
        REQUIRE(lines.size() == 3);
        CHECK(lines[0] == "width,seconds");
        CHECK(lines[1].substr(0, 2) == "4,");
        CHECK(lines[2].substr(0, 2) == "8,");
        CHECK(exit_code("probe --widths 4,8") == 2);
    }
}
