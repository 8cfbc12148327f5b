#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sys/wait.h>

#include "rislab/harness/config.hpp"
#include "rislab/harness/csv.hpp"
#include "rislab/harness/experiments.hpp"

using namespace rislab;
using namespace rislab::harness;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rislab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RISLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("empty config yields the defaults") {
    const Config c = parse_config("");
    CHECK(c.experiment.name == "fig4-ratio");
    CHECK(c.scenario.num_elements == 100);
    CHECK(c.scenario.num_bs_antennas == 2);
    CHECK(c.scenario.num_rbs == 25);
    CHECK(c.allocation.min_rate_bps == 20e6);
    CHECK(c.allocation.alpha == 0.1);
    CHECK(c.allocation.snr_mode == SnrMode::kIdealUpper);
    const ExperimentSpec fig4 = resolve_defaults(c.experiment, c.scenario);
    CHECK(fig4.n_list == std::vector<int>{16, 64, 256, 1024});
    CHECK(fig4.b_list.size() == 3);
    CHECK(!fig4.b_list[2].has_value());
    CHECK(*fig4.trials == 1000);
}

TEST_CASE("config values are parsed per section") {
    const Config c = parse_config(
        "[scenario]\n"
        "num_elements = 64\n"
        "correlated = false\n"
        "[experiment]\n"
        "name = \"fig6-ser\"  # inline comment\n"
        "n_list = [16, 32]\n"
        "snr_db_list = -5, 0\n"
        "seed = 9\n"
        "[allocation]\n"
        "snr_mode = alg1\n"
        "phase_bits = inf\n"
        "[modulation]\n"
        "host = qpsk\n");
    CHECK(c.scenario.num_elements == 64);
    CHECK_FALSE(c.scenario.correlated);
    CHECK(c.experiment.name == "fig6-ser");
    CHECK(c.experiment.n_list == std::vector<int>{16, 32});
    CHECK(c.experiment.snr_db_list == std::vector<double>{-5.0, 0.0});
    CHECK(c.experiment.seed == 9);
    CHECK(c.allocation.snr_mode == SnrMode::kGreedy);
    CHECK_FALSE(c.allocation.phase_bits.has_value());
    CHECK(c.modulation.host == HostModulation::kQpsk);
    CHECK(parse_config("[experiment]\nb_list = 1, inf\n").experiment.b_list.size() == 2);
}

TEST_CASE("config errors name the field") {
    auto message = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("[scenario]\nnum_elements = -1\n").find("num_elements") != std::string::npos);
    CHECK(message("[scenario]\nfoo = 3\n").find("foo") != std::string::npos);
    CHECK(message("[bogus]\nx = 1\n").find("bogus") != std::string::npos);
    CHECK(message("[experiment]\nname = fig10\n").find("experiment.name") != std::string::npos);
    CHECK(message("[allocation]\nalpha = 1.5\n").find("allocation.alpha") != std::string::npos);
    CHECK(message("[scenario]\nnum_elements = abc\n").find("num_elements") != std::string::npos);
    CHECK(message("[experiment]\nb_list = 0\n").find("b_list") != std::string::npos);
    CHECK_FALSE(message("[scenario]\nnum_elements = 1\n").size() > 0);
}

TEST_CASE("malformed config reports a line") {
    try {
        parse_config("[scenario]\nnum_elements = 4\n[unterminated\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/rislab.toml"), ConfigError);
}

TEST_CASE("shortest float formatting round-trips") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(2.0) == "2");
    Stream rng(51);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.index(200)) - 100);
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK_THROWS_AS(parse_double("1.0x"), std::invalid_argument);
}

TEST_CASE("csv of an empty table is just the header") {
    ResultTable t;
    t.coord_keys = {"N", "b"};
    CHECK(to_csv(t) == "experiment,N,b,metric,value,ci_low,ci_high,trials,seed\n");
    const ResultTable back = from_csv(to_csv(t));
    CHECK(back.coord_keys == t.coord_keys);
    CHECK(back.rows.empty());
}

TEST_CASE("csv round-trip") {
    ResultTable t;
    t.coord_keys = {"N"};
    ResultRow row;
    row.experiment = "fig4-ratio";
    row.coords = {{"N", "16"}};
    row.metric = "rate_ratio";
    row.value = 0.1 + 0.2;
    row.ci_low = -1.25e-7;
    row.ci_high = 3.0;
    row.trials = 1000;
    row.seed = 18446744073709551615ull;
    t.rows.push_back(row);
    CHECK(to_csv(t) ==
          "experiment,N,metric,value,ci_low,ci_high,trials,seed\n"
          "fig4-ratio,16,rate_ratio,0.30000000000000004,-1.25e-07,3,1000,18446744073709551615\n");
    const ResultTable back = from_csv(to_csv(t));
    REQUIRE(back.rows.size() == 1);
    CHECK(back.rows[0] == row);
    const fs::path dir = scratch_dir("csv");
    write_csv(t, (dir / "t.csv").string());
    CHECK(read_csv((dir / "t.csv").string()).rows[0] == row);
    t.rows[0].metric = "a,b";
    CHECK_THROWS_AS(to_csv(t), std::invalid_argument);
}

TEST_CASE("experiments are independent of the thread count") {
    for (const std::string name : {"fig4-ratio", "fig5-mrt-ratio", "fig6-ser", "fig7-convergence", "fig9-sumrate"}) {
        Config c;
        c.experiment.name = name;
        c.experiment.seed = 3;
        c.experiment.n_list = {16};
        c.experiment.m_list = {2};
        c.experiment.k_list = {2};
        c.experiment.snr_db_list = {0.0};
        c.experiment.slots = 6;
        c.experiment.report_interval = 2;
        c.experiment.trials = name == "fig6-ser" ? 2000 : (name == "fig4-ratio" || name == "fig5-mrt-ratio" ? 130 : 1);
        c.scenario.num_due = 1;
        c.scenario.num_rue = 1;
        c.scenario.num_rbs = 2;
        c.scenario.bandwidth_hz = 1e6;
        validate(c);
        const std::string one = to_csv(run_experiment(c, 1));
        const std::string three = to_csv(run_experiment(c, 3));
        CHECK_MESSAGE(one == three, name);
        CHECK(one.find(name) != std::string::npos);
    }
}

TEST_CASE("run_and_write places the csv in the output directory") {
    Config c;
    c.experiment.name = "fig4-ratio";
    c.experiment.n_list = {4};
    c.experiment.b_list = {1};
    c.experiment.trials = 10;
    c.experiment.output_dir = scratch_dir("write").string();
    const std::string path = run_and_write(c, 1);
    CHECK(fs::path(path).filename() == "fig4-ratio.csv");
    const ResultTable t = read_csv(path);
    CHECK(t.coord_keys == std::vector<std::string>{"N", "b"});
    CHECK_FALSE(t.rows.empty());
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch_dir("cli");
    std::ofstream(dir / "empty.toml") << "";
    std::ofstream(dir / "bad.toml") << "[scenario]\nnum_elements = -1\n";
    std::ofstream(dir / "run.toml") << "[experiment]\nname = fig4-ratio\nn_list = 4\nb_list = 1\ntrials = 10\noutput_dir = "
                                    << (dir / "out").string() << "\n";
    CHECK(run_cli("validate --config " + (dir / "empty.toml").string()) == 0);
    CHECK(run_cli("validate --config " + (dir / "bad.toml").string()) == 1);
    CHECK(run_cli("validate --config " + (dir / "missing.toml").string()) != 0);
    CHECK(run_cli("run --config " + (dir / "run.toml").string() + " --threads 2") == 0);
    CHECK(fs::exists(dir / "out" / "fig4-ratio.csv"));
    CHECK(run_cli("run --config " + (dir / "run.toml").string() + " --experiment nope") == 1);
}
