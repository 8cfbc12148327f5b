#pragma once

#include <string>

#include "rislab/harness/config.hpp"
#include "rislab/harness/csv.hpp"

namespace rislab::harness {

ResultTable run_experiment(const Config& config, int threads = 1);

// Runs the configured experiment and writes <output_dir>/<name>.csv; returns the path.
std::string run_and_write(const Config& config, int threads = 1);

}  // namespace rislab::harness
