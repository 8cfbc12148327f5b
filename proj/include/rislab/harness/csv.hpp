#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rislab::harness {

struct ResultRow {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> coords;
    std::string metric;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;

    bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
    std::vector<std::string> coord_keys;
    std::vector<ResultRow> rows;
};

// Shortest decimal that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

std::string to_csv(const ResultTable& table);
ResultTable from_csv(const std::string& text);

void write_csv(const ResultTable& table, const std::string& path);
ResultTable read_csv(const std::string& path);

}  // namespace rislab::harness
