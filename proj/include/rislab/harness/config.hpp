#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rislab/allocation.hpp"
#include "rislab/channel.hpp"
#include "rislab/modulation.hpp"

namespace rislab::harness {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message, int line = 0)
        : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ")" : message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"fig4-ratio",       "fig5-mrt-ratio", "fig6-ser",
                                                   "fig7-convergence", "fig8-individual", "fig9-sumrate",
                                                   "custom"};
    return names;
}

struct ExperimentSpec {
    std::string name = "fig4-ratio";
    // unset values fall back to per-experiment defaults (see resolve_defaults)
    std::optional<std::uint64_t> trials;
    std::uint64_t seed = 1;
    std::string output_dir = "results";

    std::vector<int> n_list;
    std::vector<std::optional<int>> b_list;  // nullopt is continuous phase
    std::vector<int> m_list;
    std::vector<int> k_list;
    std::vector<double> snr_db_list;

    int slots = 2000;
    int report_interval = 50;
};

struct ModulationSettings {
    HostModulation host = HostModulation::kBpsk;
    int order_exponent = 2;
    int repetitions = 1;
};

struct AllocationSettings {
    double min_rate_bps = 20e6;
    double max_power_ratio = 4.0;
    double alpha = 0.1;
    int repetitions = 12;
    SnrMode snr_mode = SnrMode::kIdealUpper;
    std::optional<int> phase_bits = 1;

    AllocationConfig to_config(const LinkBudget& budget) const;
};

struct Config {
    ExperimentSpec experiment;
    Scenario scenario;
    AllocationSettings allocation;
    ModulationSettings modulation;
};

// TOML-style text: [sections] with key = value; lists as "16, 64" or "[16, 64]".
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

// Fills unset sweep lists and trial counts for the named experiment, then validates.
ExperimentSpec resolve_defaults(const ExperimentSpec& spec, const Scenario& scenario);

void validate(const Config& config);

std::string to_string(SnrMode mode);

}  // namespace rislab::harness
