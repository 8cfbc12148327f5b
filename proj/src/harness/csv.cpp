#include "rislab/harness/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rislab::harness {

namespace {

const std::array<const char*, 6> kTail = {"metric", "value", "ci_low", "ci_high", "trials", "seed"};

void check_field(const std::string& s) {
    if (s.find_first_of(",\n\r\"") != std::string::npos)
        throw std::invalid_argument("csv: field contains a separator: " + s);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::uint64_t parse_u64(const std::string& text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw std::invalid_argument("csv: bad integer " + text);
    return v;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf.data(), ptr);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw std::invalid_argument("csv: bad number " + text);
    return v;
}

std::string to_csv(const ResultTable& table) {
    std::string out = "experiment";
    for (const auto& key : table.coord_keys) {
        check_field(key);
        out += "," + key;
    }
    for (const char* name : kTail) out += std::string(",") + name;
    out += "\n";
    for (const auto& row : table.rows) {
        if (row.coords.size() != table.coord_keys.size()) throw std::invalid_argument("csv: row coordinates differ from header");
        check_field(row.experiment);
        check_field(row.metric);
        out += row.experiment;
        for (std::size_t i = 0; i < row.coords.size(); ++i) {
            if (row.coords[i].first != table.coord_keys[i]) throw std::invalid_argument("csv: coordinate key order differs");
            check_field(row.coords[i].second);
            out += "," + row.coords[i].second;
        }
        out += "," + row.metric + "," + format_double(row.value) + "," + format_double(row.ci_low) + "," +
               format_double(row.ci_high) + "," + std::to_string(row.trials) + "," + std::to_string(row.seed) + "\n";
    }
    return out;
}

ResultTable from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: missing header");
    const auto header = split_line(line);
    if (header.size() < 1 + kTail.size() || header.front() != "experiment")
        throw std::invalid_argument("csv: malformed header");
    const std::size_t coords = header.size() - 1 - kTail.size();
    for (std::size_t i = 0; i < kTail.size(); ++i)
        if (header[1 + coords + i] != kTail[i]) throw std::invalid_argument("csv: malformed header");
    ResultTable table;
    table.coord_keys.assign(header.begin() + 1, header.begin() + 1 + static_cast<long>(coords));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size()) throw std::invalid_argument("csv: row width differs from header");
        ResultRow row;
        row.experiment = cells[0];
        for (std::size_t i = 0; i < coords; ++i) row.coords.emplace_back(table.coord_keys[i], cells[1 + i]);
        const std::size_t t = 1 + coords;
        row.metric = cells[t];
        row.value = parse_double(cells[t + 1]);
        row.ci_low = parse_double(cells[t + 2]);
        row.ci_high = parse_double(cells[t + 3]);
        row.trials = parse_u64(cells[t + 4]);
        row.seed = parse_u64(cells[t + 5]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_csv(const ResultTable& table, const std::string& path) {
    const std::string text = to_csv(table);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

ResultTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return from_csv(text.str());
}

}  // namespace rislab::harness
