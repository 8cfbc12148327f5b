#include "rislab/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace rislab::harness {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// drops an inline comment and surrounding quotes
std::string clean_value(const std::string& raw) {
    std::string v = trim(raw);
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'')) {
        const auto close = v.find(v.front(), 1);
        if (close != std::string::npos) return v.substr(1, close - 1);
    }
    const auto hash = v.find('#');
    if (hash != std::string::npos) v = trim(v.substr(0, hash));
    return v;
}

std::vector<std::string> split_list(const std::string& field, const std::string& raw) {
    std::string v = clean_value(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError(field + ": unterminated list");
        v = v.substr(1, v.size() - 2);
    }
    std::vector<std::string> items;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(clean_value(item));
    }
    if (items.empty()) throw ConfigError(field + ": list must not be empty");
    return items;
}

template <typename T>
T parse_number(const std::string& field, const std::string& raw) {
    const std::string v = clean_value(raw);
    T out{};
    const auto* begin = v.data();
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end || v.empty()) throw ConfigError(field + ": cannot parse '" + v + "'");
    return out;
}

bool parse_bool(const std::string& field, const std::string& raw) {
    const std::string v = clean_value(raw);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(field + ": expected true or false, got '" + v + "'");
}

std::optional<int> parse_bits(const std::string& field, const std::string& raw) {
    const std::string v = clean_value(raw);
    if (v == "inf" || v == "continuous") return std::nullopt;
    return parse_number<int>(field, v);
}

using Setter = std::function<void(Config&, const std::string& field, const std::string& value)>;
using Table = std::map<std::string, Setter>;

template <typename T>
Setter number(T Scenario::*member) {
    return [member](Config& c, const std::string& f, const std::string& v) { c.scenario.*member = parse_number<T>(f, v); };
}

const std::map<std::string, Table>& sections() {
    static const std::map<std::string, Table> tables = [] {
        std::map<std::string, Table> t;
        Table& sc = t["scenario"];
        sc["num_bs_antennas"] = number(&Scenario::num_bs_antennas);
        sc["num_elements"] = number(&Scenario::num_elements);
        sc["num_due"] = number(&Scenario::num_due);
        sc["num_rue"] = number(&Scenario::num_rue);
        sc["num_rbs"] = number(&Scenario::num_rbs);
        sc["d_bu"] = number(&Scenario::d_bu);
        sc["d_br"] = number(&Scenario::d_br);
        sc["d_ru"] = number(&Scenario::d_ru);
        sc["height_bs"] = number(&Scenario::height_bs);
        sc["height_ris"] = number(&Scenario::height_ris);
        sc["height_ue"] = number(&Scenario::height_ue);
        sc["exponent_bs_due"] = number(&Scenario::exponent_bs_due);
        sc["exponent_bs_ris"] = number(&Scenario::exponent_bs_ris);
        sc["exponent_ris_rue"] = number(&Scenario::exponent_ris_rue);
        sc["pathloss_const_db"] = number(&Scenario::pathloss_const_db);
        sc["wavelength"] = number(&Scenario::wavelength);
        sc["element_spacing"] = number(&Scenario::element_spacing);
        sc["correlated"] = [](Config& c, const std::string& f, const std::string& v) { c.scenario.correlated = parse_bool(f, v); };
        sc["kappa_bs_ris"] = number(&Scenario::kappa_bs_ris);
        sc["kappa_ris_rue"] = number(&Scenario::kappa_ris_rue);
        sc["kappa_bs_due"] = number(&Scenario::kappa_bs_due);
        sc["tx_psd_dbm_hz"] = number(&Scenario::tx_psd_dbm_hz);
        sc["noise_psd_dbm_hz"] = number(&Scenario::noise_psd_dbm_hz);
        sc["bandwidth_hz"] = number(&Scenario::bandwidth_hz);

        Table& ex = t["experiment"];
        ex["name"] = [](Config& c, const std::string&, const std::string& v) { c.experiment.name = clean_value(v); };
        ex["trials"] = [](Config& c, const std::string& f, const std::string& v) {
            c.experiment.trials = parse_number<std::uint64_t>(f, v);
        };
        ex["seed"] = [](Config& c, const std::string& f, const std::string& v) { c.experiment.seed = parse_number<std::uint64_t>(f, v); };
        ex["output_dir"] = [](Config& c, const std::string&, const std::string& v) { c.experiment.output_dir = clean_value(v); };
        ex["slots"] = [](Config& c, const std::string& f, const std::string& v) { c.experiment.slots = parse_number<int>(f, v); };
        ex["report_interval"] = [](Config& c, const std::string& f, const std::string& v) {
            c.experiment.report_interval = parse_number<int>(f, v);
        };
        ex["n_list"] = [](Config& c, const std::string& f, const std::string& v) {
            c.experiment.n_list.clear();
            for (const auto& item : split_list(f, v)) c.experiment.n_list.push_back(parse_number<int>(f, item));
        };
        ex["m_list"] = [](Config& c, const std::string& f, const std::string& v) {
            c.experiment.m_list.clear();
            for (const auto& item : split_list(f, v)) c.experiment.m_list.push_back(parse_number<int>(f, item));
        };
        ex["k_list"] = [](Config& c, const std::string& f, const std::string& v) {
            c.experiment.k_list.clear();
            for (const auto& item : split_list(f, v)) c.experiment.k_list.push_back(parse_number<int>(f, item));
        };
        ex["b_list"] = [](Config& c, const std::string& f, const std::string& v) {
            c.experiment.b_list.clear();
            for (const auto& item : split_list(f, v)) c.experiment.b_list.push_back(parse_bits(f, item));
        };
        ex["snr_db_list"] = [](Config& c, const std::string& f, const std::string& v) {
            c.experiment.snr_db_list.clear();
            for (const auto& item : split_list(f, v)) c.experiment.snr_db_list.push_back(parse_number<double>(f, item));
        };

        Table& al = t["allocation"];
        al["min_rate_bps"] = [](Config& c, const std::string& f, const std::string& v) {
            c.allocation.min_rate_bps = parse_number<double>(f, v);
        };
        al["max_power_ratio"] = [](Config& c, const std::string& f, const std::string& v) {
            c.allocation.max_power_ratio = parse_number<double>(f, v);
        };
        al["alpha"] = [](Config& c, const std::string& f, const std::string& v) { c.allocation.alpha = parse_number<double>(f, v); };
        al["repetitions"] = [](Config& c, const std::string& f, const std::string& v) {
            c.allocation.repetitions = parse_number<int>(f, v);
        };
        al["snr_mode"] = [](Config& c, const std::string& f, const std::string& v) {
            const std::string mode = clean_value(v);
            if (mode == "alg1") c.allocation.snr_mode = SnrMode::kGreedy;
            else if (mode == "ideal-upper") c.allocation.snr_mode = SnrMode::kIdealUpper;
            else throw ConfigError(f + ": expected alg1 or ideal-upper, got '" + mode + "'");
        };
        al["phase_bits"] = [](Config& c, const std::string& f, const std::string& v) { c.allocation.phase_bits = parse_bits(f, v); };

        Table& mo = t["modulation"];
        mo["host"] = [](Config& c, const std::string& f, const std::string& v) {
            try {
                c.modulation.host = parse_host_modulation(clean_value(v));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(f + ": " + e.what());
            }
        };
        mo["order_exponent"] = [](Config& c, const std::string& f, const std::string& v) {
            c.modulation.order_exponent = parse_number<int>(f, v);
        };
        mo["repetitions"] = [](Config& c, const std::string& f, const std::string& v) {
            c.modulation.repetitions = parse_number<int>(f, v);
        };
        return t;
    }();
    return tables;
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ConfigError("validation error: " + field + " " + why);
}

}  // namespace

AllocationConfig AllocationSettings::to_config(const LinkBudget& budget) const {
    AllocationConfig cfg = make_allocation_config(budget, max_power_ratio);
    cfg.min_rate_bps = min_rate_bps;
    cfg.alpha = alpha;
    cfg.repetitions = repetitions;
    cfg.snr_mode = snr_mode;
    return cfg;
}

std::string to_string(SnrMode mode) { return mode == SnrMode::kGreedy ? "alg1" : "ideal-upper"; }

Config parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("parse error: " + e.message(), static_cast<int>(e.line()));
    }
    Config config;
    for (const auto& [section, body] : tree) {
        const auto table = sections().find(section);
        if (table == sections().end()) {
            if (body.empty()) throw ConfigError("unknown key '" + section + "' (top-level keys are not allowed)");
            throw ConfigError("unknown section '" + section + "'");
        }
        for (const auto& [key, value] : body) {
            const std::string field = section + "." + key;
            const auto setter = table->second.find(key);
            if (setter == table->second.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            setter->second(config, field, value.data());
        }
    }
    validate(config);
    return config;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

ExperimentSpec resolve_defaults(const ExperimentSpec& spec, const Scenario& scenario) {
    ExperimentSpec out = spec;
    const std::string& name = spec.name;
    auto default_ints = [](std::vector<int>& list, std::vector<int> values) {
        if (list.empty()) list = std::move(values);
    };
    if (name == "fig4-ratio") {
        default_ints(out.n_list, {16, 64, 256, 1024});
        if (out.b_list.empty()) out.b_list = {1, 2, std::nullopt};
        if (!out.trials) out.trials = 1000;
    } else if (name == "fig5-mrt-ratio") {
        default_ints(out.n_list, {16, 64, 256});
        default_ints(out.m_list, {2, 4, 8});
        if (!out.trials) out.trials = 1000;
    } else if (name == "fig6-ser") {
        default_ints(out.n_list, {16, 32, 64});
        if (out.snr_db_list.empty()) out.snr_db_list = {-10, -5, 0, 5, 10, 15, 20};
        if (!out.trials) out.trials = 100000;
    } else if (name == "fig7-convergence" || name == "fig8-individual") {
        default_ints(out.n_list, {scenario.num_elements});
        if (!out.trials) out.trials = 1;
    } else if (name == "fig9-sumrate") {
        default_ints(out.n_list, {16, 32, 64});
        default_ints(out.k_list, {4, scenario.num_ues()});
        if (!out.trials) out.trials = 1;
    } else if (name == "custom") {
        default_ints(out.n_list, {scenario.num_elements});
        if (!out.trials) out.trials = 1;
    }
    return out;
}

void validate(const Config& config) {
    try {
        config.scenario.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("validation error: ") + e.what());
    }
    const ExperimentSpec& e = config.experiment;
    const auto& names = experiment_names();
    require(std::find(names.begin(), names.end(), e.name) != names.end(), "experiment.name", "is not a known experiment: " + e.name);
    require(!e.trials || *e.trials >= 1, "experiment.trials", "must be >= 1");
    require(e.slots >= 1, "experiment.slots", "must be >= 1");
    require(e.report_interval >= 1, "experiment.report_interval", "must be >= 1");
    require(!e.output_dir.empty(), "experiment.output_dir", "must not be empty");
    for (int n : e.n_list) require(n >= 1, "experiment.n_list", "entries must be >= 1");
    for (int m : e.m_list) require(m >= 1, "experiment.m_list", "entries must be >= 1");
    for (int k : e.k_list) require(k >= 1, "experiment.k_list", "entries must be >= 1");
    for (const auto& b : e.b_list) require(!b || (*b >= 1 && *b <= 16), "experiment.b_list", "entries must be in [1, 16] or inf");

    const AllocationSettings& a = config.allocation;
    require(a.min_rate_bps >= 0.0, "allocation.min_rate_bps", "must be >= 0");
    require(a.max_power_ratio >= 1.0, "allocation.max_power_ratio", "must be >= 1");
    require(a.alpha > 0.0 && a.alpha < 1.0, "allocation.alpha", "must lie in (0, 1)");
    require(a.repetitions >= 1, "allocation.repetitions", "must be >= 1");
    require(!a.phase_bits || (*a.phase_bits >= 1 && *a.phase_bits <= 16), "allocation.phase_bits", "must be in [1, 16] or inf");

    const ModulationSettings& m = config.modulation;
    require(m.order_exponent >= 1 && m.order_exponent <= 12, "modulation.order_exponent", "must be in [1, 12]");
    require(m.repetitions >= 1, "modulation.repetitions", "must be >= 1");

    if (e.name == "fig4-ratio" || e.name == "fig5-mrt-ratio")
        require(config.scenario.num_rue >= 1, "scenario.num_rue", "must be >= 1 for " + e.name);
    if (e.name == "fig7-convergence" || e.name == "fig8-individual" || e.name == "custom")
        require(config.scenario.num_ues() >= 1, "scenario.num_due", "and num_rue must give at least one UE");
}

}  // namespace rislab::harness
