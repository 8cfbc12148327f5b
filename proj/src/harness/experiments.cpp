#include "rislab/harness/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "rislab/allocation.hpp"
#include "rislab/beamforming.hpp"
#include "rislab/modulation.hpp"
#include "rislab/numerics.hpp"
#include "rislab/parallel.hpp"

namespace rislab::harness {

namespace {

// trials per reduction block; fixed so results do not depend on the worker count
constexpr std::uint64_t kBlock = 64;

using Coords = std::vector<std::pair<std::string, std::string>>;

std::string bits_label(const std::optional<int>& b) { return b ? std::to_string(*b) : "inf"; }

PhaseSet phase_set_for(const std::optional<int>& b) { return b ? PhaseSet::discrete(*b) : PhaseSet::continuous(); }

ResultRow mean_row(const std::string& experiment, Coords coords, const std::string& metric, const StatAccumulator& acc,
                   std::uint64_t seed) {
    const Interval ci = acc.ci95();
    return {experiment, std::move(coords), metric, acc.mean(), ci.low, ci.high, acc.count(), seed};
}

ResultRow ratio_row(const std::string& experiment, Coords coords, const std::string& metric,
                    const PairedAccumulator& acc, std::uint64_t seed) {
    const Interval ci = acc.ratio_ci95();
    return {experiment, std::move(coords), metric, acc.ratio(), ci.low, ci.high, acc.x().count(), seed};
}

// Runs `trial(rng, index, out)` for every trial, reducing per-block accumulators in block order.
template <typename Acc, typename Trial>
Acc reduce_trials(std::uint64_t trials, int threads, Trial trial) {
    const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<Acc> partial(blocks);
    parallel_for(blocks, threads, [&](std::size_t block) {
        const std::uint64_t end = std::min(trials, (block + 1) * kBlock);
        for (std::uint64_t t = block * kBlock; t < end; ++t) trial(t, partial[block]);
    });
    Acc total;
    for (const Acc& p : partial) total.merge(p);
    return total;
}

ResultTable run_fig4(const Config& config, const ExperimentSpec& spec, int threads) {
    ResultTable table;
    table.coord_keys = {"N", "b"};
    const std::uint64_t trials = *spec.trials;
    for (int n : spec.n_list) {
        Scenario s = config.scenario;
        s.num_elements = n;
        const ChannelModel model(s);
        const LinkBudget budget = LinkBudget::from_scenario(s);
        const std::size_t nb = spec.b_list.size();
        std::vector<PhaseSet> sets;
        for (const auto& b : spec.b_list) sets.push_back(phase_set_for(b));

        struct Acc {
            std::vector<PairedAccumulator> ratio;
            Acc() = default;
            void merge(const Acc& o) {
                if (ratio.empty()) ratio.resize(o.ratio.size());
                for (std::size_t i = 0; i < o.ratio.size(); ++i) ratio[i].merge(o.ratio[i]);
            }
        };
        const Acc acc = reduce_trials<Acc>(trials, threads, [&](std::uint64_t t, Acc& out) {
            if (out.ratio.empty()) out.ratio.resize(nb);
            Stream rng = substream(spec.seed, {static_cast<std::uint64_t>(LinkTag::kTrial), static_cast<std::uint64_t>(n), t});
            const CMatrix G = sample_rician(model.bs_ris(0), n, s.num_bs_antennas, rng);
            const CVector f = sample_rician(model.ris_rue(0), n, 1, rng).col(0);
            const double upper = std::log2(1.0 + snr_upper_ideal(f, G, budget));
            for (std::size_t i = 0; i < nb; ++i) {
                const double rate = std::log2(1.0 + greedy_phase_selection(f, G, sets[i], budget).snr);
                out.ratio[i].add(rate, upper);
            }
        });
        for (std::size_t i = 0; i < nb; ++i) {
            const Coords c = {{"N", std::to_string(n)}, {"b", bits_label(spec.b_list[i])}};
            table.rows.push_back(ratio_row(spec.name, c, "rate_ratio", acc.ratio[i], spec.seed));
            table.rows.push_back(mean_row(spec.name, c, "rate_bps_hz", acc.ratio[i].x(), spec.seed));
            table.rows.push_back(mean_row(spec.name, c, "upper_rate_bps_hz", acc.ratio[i].y(), spec.seed));
        }
    }
    return table;
}

ResultTable run_fig5(const Config& config, const ExperimentSpec& spec, int threads) {
    ResultTable table;
    table.coord_keys = {"N", "M"};
    const std::uint64_t trials = *spec.trials;
    const PhaseSet continuous = PhaseSet::continuous();
    for (int n : spec.n_list) {
        for (int m : spec.m_list) {
            Scenario s = config.scenario;
            s.num_elements = n;
            s.num_bs_antennas = m;
            const ChannelModel model(s);
            const LinkBudget budget = LinkBudget::from_scenario(s);
            const PairedAccumulator acc = reduce_trials<PairedAccumulator>(trials, threads, [&](std::uint64_t t, PairedAccumulator& out) {
                Stream rng = substream(spec.seed, {static_cast<std::uint64_t>(LinkTag::kTrial), static_cast<std::uint64_t>(n),
                                                   static_cast<std::uint64_t>(m), t});
                const CMatrix G = sample_rician(model.bs_ris(0), n, m, rng);
                const CVector f = sample_rician(model.ris_rue(0), n, 1, rng).col(0);
                const BeamformResult bf = greedy_phase_selection(f, G, continuous, budget);
                const double mrt_snr = budget.tx_power * budget.symbol_energy_rue * cascade_gain(f, bf.reflection, G) / budget.noise_power;
                out.add(std::log2(1.0 + bf.snr), std::log2(1.0 + mrt_snr));
            });
            const Coords c = {{"N", std::to_string(n)}, {"M", std::to_string(m)}};
            table.rows.push_back(ratio_row(spec.name, c, "as_mrt_ratio", acc, spec.seed));
            table.rows.push_back(mean_row(spec.name, c, "as_rate_bps_hz", acc.x(), spec.seed));
            table.rows.push_back(mean_row(spec.name, c, "mrt_rate_bps_hz", acc.y(), spec.seed));
        }
    }
    return table;
}

ResultTable run_fig6(const Config& config, const ExperimentSpec& spec, int threads) {
    ResultTable table;
    table.coord_keys = {"N", "snr_db"};
    const SymbolSet set = build_symbol_set(config.modulation.host, config.modulation.order_exponent);
    for (int n : spec.n_list) {
        SerSimulation sim;
        sim.num_elements = n;
        sim.repetitions = config.modulation.repetitions;
        for (double snr_db : spec.snr_db_list) {
            const double es_over_n0 = std::pow(10.0, snr_db / 10.0);
            const Coords c = {{"N", std::to_string(n)}, {"snr_db", format_double(snr_db)}};
            const SerEstimate est = simulate_ser(set, sim, es_over_n0, *spec.trials, derive_key(spec.seed, {static_cast<std::uint64_t>(n)}), threads);
            table.rows.push_back({spec.name, c, "ser_simulated", est.ser, est.ci.low, est.ci.high, est.trials, spec.seed});
            const double theory = theoretical_ser(set, n, sim.repetitions, es_over_n0);
            table.rows.push_back({spec.name, c, "ser_theory", theory, theory, theory, 0, spec.seed});
        }
    }
    return table;
}

struct AllocationJob {
    Scenario scenario;
    double min_rate_bps = 0.0;
    std::uint64_t run = 0;
};

std::vector<Trajectory> run_jobs(const Config& config, const ExperimentSpec& spec, const std::vector<AllocationJob>& jobs,
                                 int threads) {
    std::vector<Trajectory> out(jobs.size());
    const SymbolSet symbols = build_symbol_set(config.modulation.host, config.modulation.order_exponent);
    parallel_for(jobs.size(), threads, [&](std::size_t i) {
        const AllocationJob& job = jobs[i];
        const ChannelModel model(job.scenario);
        AllocationConfig cfg = config.allocation.to_config(LinkBudget::from_scenario(job.scenario));
        cfg.min_rate_bps = job.min_rate_bps;
        AlgorithmRun run;
        run.slots = spec.slots;
        // the same run index gives the same channels with and without the rate requirement
        run.seed = derive_key(spec.seed, {job.run});
        run.phases = phase_set_for(config.allocation.phase_bits);
        run.symbols = symbols;
        out[i] = run_resource_allocation(model, cfg, run);
    });
    return out;
}

std::size_t trailing_window(const ExperimentSpec& spec) { return static_cast<std::size_t>(std::max(1, spec.slots / 2)); }

ResultTable run_fig7(const Config& config, const ExperimentSpec& spec, int threads) {
    ResultTable table;
    table.coord_keys = {"N", "slot"};
    const std::uint64_t runs = *spec.trials;
    for (int n : spec.n_list) {
        Scenario s = config.scenario;
        s.num_elements = n;
        const double avg_power = LinkBudget::from_scenario(s).tx_power;
        std::vector<AllocationJob> jobs;
        for (std::uint64_t r = 0; r < runs; ++r) jobs.push_back({s, config.allocation.min_rate_bps, r});
        const auto trajectories = run_jobs(config, spec, jobs, threads);
        StatAccumulator rate;
        StatAccumulator power;
        for (int t = 0; t < spec.slots; ++t) {
            StatAccumulator mu;
            for (const auto& tr : trajectories) {
                rate.add(tr.slots[t].sum_rate_bps);
                power.add(tr.slots[t].mean_power / avg_power);
                mu.add(tr.slots[t].mu);
            }
            const int slot = t + 1;
            if (slot % spec.report_interval != 0 && slot != spec.slots) continue;
            const Coords c = {{"N", std::to_string(n)}, {"slot", std::to_string(slot)}};
            table.rows.push_back(mean_row(spec.name, c, "running_sum_rate_bps", rate, spec.seed));
            table.rows.push_back(mean_row(spec.name, c, "running_power_ratio", power, spec.seed));
            table.rows.push_back(mean_row(spec.name, c, "mu", mu, spec.seed));
        }
    }
    return table;
}

WindowSummary merged_window(const std::vector<Trajectory>& trajectories, std::size_t begin, std::size_t count,
                            std::size_t window) {
    WindowSummary total;
    for (std::size_t i = begin; i < begin + count; ++i) {
        const WindowSummary w = trajectories[i].trailing(window);
        total.sum_rate_bps.merge(w.sum_rate_bps);
        total.mean_power.merge(w.mean_power);
        if (total.per_ue_bps.empty()) total.per_ue_bps.resize(w.per_ue_bps.size());
        for (std::size_t k = 0; k < w.per_ue_bps.size(); ++k) total.per_ue_bps[k].merge(w.per_ue_bps[k]);
    }
    return total;
}


ResultTable run_fig8(const Config& config, const ExperimentSpec& spec, int threads) {
    ResultTable table;
    table.coord_keys = {"N", "min_rate_bps", "ue", "role"};
    const std::uint64_t runs = *spec.trials;
    const std::vector<double> requirements = {0.0, config.allocation.min_rate_bps};
    std::vector<AllocationJob> jobs;
    for (int n : spec.n_list) {
        Scenario s = config.scenario;
        s.num_elements = n;
        for (double req : requirements)
            for (std::uint64_t r = 0; r < runs; ++r) jobs.push_back({s, req, r});
    }
    const auto trajectories = run_jobs(config, spec, jobs, threads);
    std::size_t index = 0;
    for (int n : spec.n_list) {
        for (double req : requirements) {
            const WindowSummary w = merged_window(trajectories, index, runs, trailing_window(spec));
            index += runs;
            for (std::size_t k = 0; k < w.per_ue_bps.size(); ++k) {
                const bool due = static_cast<int>(k) < config.scenario.num_due;
                const Coords c = {{"N", std::to_string(n)},
                                  {"min_rate_bps", format_double(req)},
                                  {"ue", std::to_string(k)},
                                  {"role", due ? "due" : "rue"}};
                table.rows.push_back(mean_row(spec.name, c, "avg_rate_bps", w.per_ue_bps[k], spec.seed));
            }
        }
    }
    return table;
}

ResultTable run_fig9(const Config& config, const ExperimentSpec& spec, int threads) {
    ResultTable table;
    table.coord_keys = {"N", "K", "min_rate_bps"};
    const std::uint64_t runs = *spec.trials;
    const std::vector<double> requirements = {0.0, config.allocation.min_rate_bps};
    std::vector<AllocationJob> jobs;
    for (int n : spec.n_list) {
        for (int k : spec.k_list) {
            Scenario s = config.scenario;
            s.num_elements = n;
            s.num_due = k / 2;
            s.num_rue = k - k / 2;
            for (double req : requirements)
                for (std::uint64_t r = 0; r < runs; ++r) jobs.push_back({s, req, r});
        }
    }
    const auto trajectories = run_jobs(config, spec, jobs, threads);
    std::size_t index = 0;
    for (int n : spec.n_list) {
        for (int k : spec.k_list) {
            for (double req : requirements) {
                const double avg_power = LinkBudget::from_scenario(jobs[index].scenario).tx_power;
                const WindowSummary w = merged_window(trajectories, index, runs, trailing_window(spec));
                index += runs;
                const Coords c = {{"N", std::to_string(n)}, {"K", std::to_string(k)}, {"min_rate_bps", format_double(req)}};
                table.rows.push_back(mean_row(spec.name, c, "avg_sum_rate_bps", w.sum_rate_bps, spec.seed));
                ResultRow power = mean_row(spec.name, c, "power_ratio", w.mean_power, spec.seed);
                power.value /= avg_power;
                power.ci_low /= avg_power;
                power.ci_high /= avg_power;
                table.rows.push_back(power);
            }
        }
    }
    return table;
}

ResultTable run_custom(const Config& config, const ExperimentSpec& spec, int threads) {
    ResultTable table;
    table.coord_keys = {"N", "ue"};
    const std::uint64_t runs = *spec.trials;
    std::vector<AllocationJob> jobs;
    for (int n : spec.n_list) {
        Scenario s = config.scenario;
        s.num_elements = n;
        for (std::uint64_t r = 0; r < runs; ++r) jobs.push_back({s, config.allocation.min_rate_bps, r});
    }
    const auto trajectories = run_jobs(config, spec, jobs, threads);
    std::size_t index = 0;
    for (int n : spec.n_list) {
        const double avg_power = LinkBudget::from_scenario(jobs[index].scenario).tx_power;
        const WindowSummary w = merged_window(trajectories, index, runs, trailing_window(spec));
        index += runs;
        for (std::size_t k = 0; k < w.per_ue_bps.size(); ++k)
            table.rows.push_back(mean_row(spec.name, {{"N", std::to_string(n)}, {"ue", std::to_string(k)}}, "avg_rate_bps",
                                          w.per_ue_bps[k], spec.seed));
        const Coords all = {{"N", std::to_string(n)}, {"ue", "all"}};
        table.rows.push_back(mean_row(spec.name, all, "avg_sum_rate_bps", w.sum_rate_bps, spec.seed));
        ResultRow power = mean_row(spec.name, all, "power_ratio", w.mean_power, spec.seed);
        power.value /= avg_power;
        power.ci_low /= avg_power;
        power.ci_high /= avg_power;
        table.rows.push_back(power);
    }
    return table;
}

}  // namespace

ResultTable run_experiment(const Config& config, int threads) {
    validate(config);
    const ExperimentSpec spec = resolve_defaults(config.experiment, config.scenario);
    const std::string& name = spec.name;
    if (name == "fig4-ratio") return run_fig4(config, spec, threads);
    if (name == "fig5-mrt-ratio") return run_fig5(config, spec, threads);
    if (name == "fig6-ser") return run_fig6(config, spec, threads);
    if (name == "fig7-convergence") return run_fig7(config, spec, threads);
    if (name == "fig8-individual") return run_fig8(config, spec, threads);
    if (name == "fig9-sumrate") return run_fig9(config, spec, threads);
    if (name == "custom") return run_custom(config, spec, threads);
    throw ConfigError("unknown experiment: " + name);
}

std::string run_and_write(const Config& config, int threads) {
    const ResultTable table = run_experiment(config, threads);
    const std::filesystem::path dir(config.experiment.output_dir);
    std::filesystem::create_directories(dir);
    const std::string path = (dir / (config.experiment.name + ".csv")).string();
    write_csv(table, path);
    return path;
}

}  // namespace rislab::harness
