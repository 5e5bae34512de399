#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sinlab/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Neural-network initialization laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::size_t jobs = 1;
    CLI::App* run = app.add_subcommand(
        "run", "Run every scheme x seed cell of an experiment config");
    run->add_option("--config", config_path, "Experiment config (JSON)")
        ->required();
    run->add_option("--out", out_dir, "Output directory (overrides the config)");
    run->add_option("--jobs", jobs, "Max cells run in parallel")
        ->check(CLI::PositiveNumber);

    std::vector<std::size_t> widths;
    std::string probe_out;
    CLI::App* probe = app.add_subcommand(
        "probe", "Time shrinkage initialization across square layer widths");
    probe->add_option("--widths", widths, "Layer widths, comma separated")
        ->required()
        ->delimiter(',');
    probe->add_option("--out", probe_out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;  // usage problems count as config errors
    }

    try {
        if (run->parsed()) {
            sinlab::ExperimentConfig cfg = sinlab::parse_experiment_config(config_path);
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            cfg.validate();
            const sinlab::ExperimentResult result = sinlab::run_experiment(cfg, jobs);
            for (const sinlab::CellResult& cell : result.cells) {
                if (cell.ok) {
                    std::printf("[ok]     %s seed %llu: objective %s, train acc %s, test acc %s\n",
                                sinlab::scheme_name(cell.scheme).c_str(),
                                static_cast<unsigned long long>(cell.seed),
                                sinlab::format_double(cell.final_objective).c_str(),
                                sinlab::format_double(cell.final_train_acc).c_str(),
                                sinlab::format_double(cell.final_test_acc).c_str());
                } else {
                    std::fprintf(stderr, "[failed] %s seed %llu: %s\n",
                                 sinlab::scheme_name(cell.scheme).c_str(),
                                 static_cast<unsigned long long>(cell.seed),
                                 cell.status.c_str());
                }
            }
            std::printf("wrote %s\n",
                        (cfg.output_dir / "summary.csv").string().c_str());
            return result.all_ok ? 0 : 1;
        }

        const auto rows = sinlab::timing_probe(widths);
        sinlab::write_timing_csv(probe_out, rows);
        for (const auto& [width, seconds] : rows) {
            std::printf("width %zu: %s s\n", width,
                        sinlab::format_double(seconds).c_str());
        }
        std::printf("wrote %s\n", probe_out.c_str());
        return 0;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    }
}
