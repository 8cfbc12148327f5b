// ris-lab: run and validate experiment configurations.
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rislab/harness/config.hpp"
#include "rislab/harness/experiments.hpp"
#include "rislab/parallel.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-assisted downlink link-level simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> experiment;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<std::string> out_dir;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run an experiment and write its CSV");
    run->add_option("--config", config_path, "configuration file")->required();
    run->add_option("--experiment", experiment, "experiment name (overrides the config)");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--trials", trials, "Monte Carlo trials or allocation runs");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--threads", threads, "worker threads")->envname("RIS_LAB_THREADS")->check(CLI::PositiveNumber);

    auto* check = app.add_subcommand("validate", "parse and validate a configuration");
    check->add_option("--config", config_path, "configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    rislab::harness::Config config;
    try {
        config = rislab::harness::load_config(config_path);
        if (experiment) config.experiment.name = *experiment;
        if (seed) config.experiment.seed = *seed;
        if (trials) config.experiment.trials = *trials;
        if (out_dir) config.experiment.output_dir = *out_dir;
        rislab::harness::validate(config);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }

    if (check->parsed()) {
        std::printf("ok: %s\n", config.experiment.name.c_str());
        return 0;
    }

    try {
        const std::string path = rislab::harness::run_and_write(config, rislab::resolve_threads(threads));
        std::printf("%s\n", path.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
