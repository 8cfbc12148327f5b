#include "rislab/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rislab {

namespace {

void require_index(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(what) + ": index out of range");
}

double direct_gain(const CVector& h) { return h.squaredNorm(); }

}  // namespace

void AllocationConfig::validate() const {
    if (!(avg_power > 0.0)) throw std::invalid_argument("allocation: avg_power must be > 0");
    if (!(max_power >= avg_power)) throw std::invalid_argument("allocation: max_power must be >= avg_power");
    if (!(min_rate_bps >= 0.0)) throw std::invalid_argument("allocation: min_rate_bps must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("allocation: alpha must lie in (0, 1)");
    if (repetitions < 1) throw std::invalid_argument("allocation: repetitions must be >= 1");
}

AllocationConfig make_allocation_config(const LinkBudget& budget, double max_power_ratio) {
    if (!(max_power_ratio >= 1.0)) throw std::invalid_argument("allocation: max_power_ratio must be >= 1");
    AllocationConfig cfg;
    cfg.avg_power = budget.tx_power;
    cfg.max_power = max_power_ratio * budget.tx_power;
    return cfg;
}

DualState DualState::initial(int num_ues) {
    DualState d;
    d.lambda.assign(static_cast<std::size_t>(num_ues), 0.0);
    return d;
}

Schedule Schedule::empty(int num_ues, int num_rbs) {
    Schedule s;
    s.q.assign(num_ues, std::vector<int>(num_rbs, 0));
    s.power.assign(num_rbs, 0.0);
    return s;
}

void Schedule::assign(int rb, int ue, double p) {
    require_index(rb >= 0 && rb < num_rbs() && ue >= 0 && ue < num_ues(), "Schedule::assign");
    for (auto& row : q) row[rb] = 0;
    q[ue][rb] = 1;
    power[rb] = p;
}

int Schedule::selected(int rb) const {
    require_index(rb >= 0 && rb < num_rbs(), "Schedule::selected");
    int chosen = -1;
    for (int k = 0; k < num_ues(); ++k) {
        if (q[k][rb] == 0) continue;
        if (q[k][rb] != 1 || chosen >= 0) throw std::invalid_argument("schedule: RB must serve exactly one UE");
        chosen = k;
    }
    if (chosen < 0) throw std::invalid_argument("schedule: RB must serve exactly one UE");
    return chosen;
}

double RbBeamformers::decision_gain(int rue, SnrMode mode) const {
    return mode == SnrMode::kGreedy ? steering_gain.at(rue) : ideal_gain.at(rue);
}

RbBeamformers prepare_beamformers(const NetworkState& state, const PhaseSet& phases, const SymbolSet& symbols,
                                  Stream& rng) {
    RbBeamformers bf;
    const int n = state.f.empty() ? 0 : static_cast<int>(state.f[0].size());
    for (std::size_t k = 0; k < state.f.size(); ++k) {
        BeamformResult greedy = greedy_phase_selection(state.f[k], state.G[k], phases);
        bf.steering_gain.push_back(cascade_gain(state.f[k], greedy.reflection, state.G[k]));
        bf.steering.push_back(std::move(greedy.reflection));
        LinkBudget unit;
        bf.ideal_gain.push_back(snr_upper_ideal(state.f[k], state.G[k], unit));
        const double omega = symbols.angles[rng.index(symbols.angles.size())];
        bf.symbols.push_back(omega);
        bf.modulated.push_back(modulated_reflection(omega, n));
    }
    return bf;
}

double UrueTerms::sinr(double power) const {
    const double denominator = noise + power * interference;
    if (power <= 0.0 || !(denominator > 0.0)) return 0.0;
    return power * signal / denominator;
}

double UrueTerms::rate_slope(double power) const {
    const double a = noise + power * interference;
    if (!(a > 0.0)) return 0.0;
    return signal * noise / (a * (a + power * signal));
}

UrueTerms urue_terms(const NetworkState& state, const RbBeamformers& beamformers, int rue, int due,
                     const AllocationConfig& cfg, const LinkBudget& budget) {
    const int num_rue = static_cast<int>(state.f.size());
    require_index(rue >= 0 && rue < num_rue, "urue_terms (rue)");
    require_index(due >= 0 && due < static_cast<int>(state.h.size()), "urue_terms (due)");
    const CVector& h = state.h[due];
    UrueTerms terms;
    const cd desired = (cascade_row(state.f[rue], beamformers.modulated[rue], state.G[rue]) * h)(0);
    terms.signal = cfg.alpha * std::norm(desired);
    terms.noise = budget.noise_power * h.squaredNorm() / cfg.repetitions;
    for (int j = 0; j < num_rue; ++j) {
        if (j == rue) continue;
        const cd leak = (cascade_row(state.f_cross[j][rue], beamformers.modulated[j], state.G[j]) * h)(0);
        terms.interference += std::norm(leak);
    }
    return terms;
}

double urue_sinr(const NetworkState& state, const RbBeamformers& beamformers, int rue, int due, double power,
                 const AllocationConfig& cfg, const LinkBudget& budget) {
    return urue_terms(state, beamformers, rue, due, cfg, budget).sinr(power);
}

double RateReport::sum_rate_bps(double rb_bandwidth_hz) const { return sum_rate * rb_bandwidth_hz; }

namespace {

void check_schedule(std::span<const NetworkState> states, const Schedule& schedule,
                    std::span<const RbBeamformers> beamformers, const AllocationConfig& cfg) {
    if (states.size() != beamformers.size() || static_cast<int>(states.size()) != schedule.num_rbs())
        throw std::invalid_argument("per_ue_rate: RB counts differ");
    for (int f = 0; f < schedule.num_rbs(); ++f) {
        const double p = schedule.power[f];
        if (!(p >= 0.0 && p <= cfg.max_power * (1.0 + 1e-12)))
            throw std::invalid_argument("schedule: power outside [0, P_max]");
        const int k_total = static_cast<int>(states[f].h.size() + states[f].f.size());
        if (schedule.num_ues() != k_total) throw std::invalid_argument("schedule: UE count differs from state");
        schedule.selected(f);
    }
}

}  // namespace

RateReport per_ue_rate(std::span<const NetworkState> states, const Schedule& schedule,
                       std::span<const RbBeamformers> beamformers, const AllocationConfig& cfg,
                       const LinkBudget& budget) {
    check_schedule(states, schedule, beamformers, cfg);
    RateReport report;
    report.per_ue_rate.assign(schedule.num_ues(), 0.0);
    for (int f = 0; f < schedule.num_rbs(); ++f) {
        const NetworkState& state = states[f];
        const int num_due = static_cast<int>(state.h.size());
        const int num_rue = static_cast<int>(state.f.size());
        const int ue = schedule.selected(f);
        const double p = schedule.power[f];
        std::vector<double> modulation(num_rue, 0.0);
        double snr = 0.0;
        if (ue < num_due) {
            snr = p * budget.symbol_energy_due * direct_gain(state.h[ue]) / budget.noise_power;
            for (int k = 0; k < num_rue; ++k) {
                modulation[k] = urue_sinr(state, beamformers[f], k, ue, p, cfg, budget);
                report.per_ue_rate[num_due + k] += std::log2(1.0 + modulation[k]);
            }
        } else {
            snr = p * budget.symbol_energy_rue * beamformers[f].steering_gain[ue - num_due] / budget.noise_power;
        }
        report.per_ue_rate[ue] += std::log2(1.0 + snr);
        report.scheduled_snr.push_back(snr);
        report.urue_sinr.push_back(std::move(modulation));
    }
    for (double r : report.per_ue_rate) report.sum_rate += r;
    return report;
}

double slot_sum_rate(std::span<const NetworkState> states, const Schedule& schedule,
                     std::span<const RbBeamformers> beamformers, const AllocationConfig& cfg,
                     const LinkBudget& budget) {
    check_schedule(states, schedule, beamformers, cfg);
    double total = 0.0;
    for (int f = 0; f < schedule.num_rbs(); ++f) {
        const NetworkState& state = states[f];
        const int num_due = static_cast<int>(state.h.size());
        const int num_rue = static_cast<int>(state.f.size());
        const double p = schedule.power[f];
        double rb_rate = 0.0;
        for (int i = 0; i < num_due; ++i) {
            if (schedule.q[i][f] == 0) continue;
            rb_rate += std::log2(1.0 + p * budget.symbol_energy_due * direct_gain(state.h[i]) / budget.noise_power);
            for (int k = 0; k < num_rue; ++k)
                if (schedule.q[num_due + k][f] == 0)
                    rb_rate += std::log2(1.0 + urue_sinr(state, beamformers[f], k, i, p, cfg, budget));
        }
        for (int k = 0; k < num_rue; ++k)
            if (schedule.q[num_due + k][f] != 0)
                rb_rate += std::log2(1.0 + p * budget.symbol_energy_rue * beamformers[f].steering_gain[k] /
                                                budget.noise_power);
        total += rb_rate;
    }
    return total;
}

double optimal_power_rue(double lambda, double mu, double channel_gain, double noise_power, double max_power) {
    if (!(channel_gain > 0.0)) throw std::invalid_argument("optimal_power_rue: channel gain must be > 0");
    if (mu <= 0.0) return max_power;
    return std::clamp((1.0 + lambda) / mu - noise_power / channel_gain, 0.0, max_power);
}

double due_objective(const NetworkState& state, const RbBeamformers& beamformers, int due, double lambda,
                     double mu, double power, const AllocationConfig& cfg, const LinkBudget& budget) {
    double rate = std::log1p(power * budget.symbol_energy_due * direct_gain(state.h.at(due)) / budget.noise_power);
    for (int k = 0; k < static_cast<int>(state.f.size()); ++k)
        rate += std::log1p(urue_terms(state, beamformers, k, due, cfg, budget).sinr(power));
    return (1.0 + lambda) * rate - mu * power;
}

double rue_objective(const RbBeamformers& beamformers, int rue, double lambda, double mu, double power,
                     SnrMode mode, const LinkBudget& budget) {
    const double gain = beamformers.decision_gain(rue, mode);
    return (1.0 + lambda) * std::log1p(power * budget.symbol_energy_rue * gain / budget.noise_power) - mu * power;
}

double optimal_power_due(const NetworkState& state, const RbBeamformers& beamformers, int due, double lambda,
                         double mu, const AllocationConfig& cfg, const LinkBudget& budget) {
    require_index(due >= 0 && due < static_cast<int>(state.h.size()), "optimal_power_due");
    const double g = budget.symbol_energy_due * direct_gain(state.h[due]);
    if (mu <= 0.0) return cfg.max_power;
    std::vector<UrueTerms> terms;
    for (int k = 0; k < static_cast<int>(state.f.size()); ++k)
        terms.push_back(urue_terms(state, beamformers, k, due, cfg, budget));
    auto slope = [&](double p) {
        double d = g / (budget.noise_power + p * g);
        for (const auto& t : terms) d += t.rate_slope(p);
        return (1.0 + lambda) * d - mu;
    };
    if (slope(0.0) <= 0.0) return 0.0;
    if (slope(cfg.max_power) >= 0.0) return cfg.max_power;
    double lo = 0.0;
    double hi = cfg.max_power;
    while (hi - lo > 1e-8 * cfg.max_power) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

RbDecision schedule_rb(const NetworkState& state, const RbBeamformers& beamformers, std::span<const double> lambda,
                       double mu, const AllocationConfig& cfg, const LinkBudget& budget) {
    const int num_due = static_cast<int>(state.h.size());
    const int num_rue = static_cast<int>(state.f.size());
    if (static_cast<int>(lambda.size()) != num_due + num_rue)
        throw std::invalid_argument("schedule_rb: multiplier count differs from UE count");
    if (num_due + num_rue == 0) throw std::invalid_argument("schedule_rb: no UEs");
    RbDecision best;
    bool have = false;
    for (int k = 0; k < num_due + num_rue; ++k) {
        double p = 0.0;
        double value = 0.0;
        if (k < num_due) {
            p = optimal_power_due(state, beamformers, k, lambda[k], mu, cfg, budget);
            value = due_objective(state, beamformers, k, lambda[k], mu, p, cfg, budget);
        } else {
            const int r = k - num_due;
            const double gain = budget.symbol_energy_rue * beamformers.decision_gain(r, cfg.snr_mode);
            p = gain > 0.0 ? optimal_power_rue(lambda[k], mu, gain, budget.noise_power, cfg.max_power) : 0.0;
            value = rue_objective(beamformers, r, lambda[k], mu, p, cfg.snr_mode, budget);
        }
        if (!have || value > best.objective) {
            best = {k, p, value};
            have = true;
        }
    }
    return best;
}

DualState subgradient_step(const DualState& dual, const Subgradient& g) {
    if (dual.slot < 1) throw std::invalid_argument("subgradient_step: slot must be >= 1");
    if (g.rate.size() != dual.lambda.size()) throw std::invalid_argument("subgradient_step: size mismatch");
    const double step = 1.0 / dual.slot;
    DualState next;
    next.lambda.resize(dual.lambda.size());
    for (std::size_t k = 0; k < dual.lambda.size(); ++k)
        next.lambda[k] = std::max(0.0, dual.lambda[k] - step * g.rate[k]);
    next.mu = std::max(0.0, dual.mu - step * g.power);
    next.slot = dual.slot + 1;
    return next;
}

WindowSummary Trajectory::trailing(std::size_t window) const {
    if (window == 0 || window > slots.size()) throw std::invalid_argument("trailing: invalid window");
    WindowSummary summary;
    summary.per_ue_bps.resize(slots.front().per_ue_bps.size());
    for (std::size_t t = slots.size() - window; t < slots.size(); ++t) {
        summary.sum_rate_bps.add(slots[t].sum_rate_bps);
        summary.mean_power.add(slots[t].mean_power);
        for (std::size_t k = 0; k < summary.per_ue_bps.size(); ++k) summary.per_ue_bps[k].add(slots[t].per_ue_bps[k]);
    }
    return summary;
}

Trajectory run_resource_allocation(const ChannelModel& model, const AllocationConfig& cfg, const AlgorithmRun& run) {
    cfg.validate();
    if (run.slots < 1) throw std::invalid_argument("run_resource_allocation: slots must be >= 1");
    const Scenario& s = model.scenario();
    const LinkBudget budget = LinkBudget::from_scenario(s);
    const int k_total = s.num_ues();
    if (k_total < 1) throw std::invalid_argument("run_resource_allocation: no UEs");
    const double rb_bandwidth = s.rb_bandwidth_hz();
    // rate requirement in bits/s/Hz per slot; subgradients are relative violations
    const double min_rate = cfg.min_rate_bps / rb_bandwidth;
    const double rate_scale = min_rate > 0.0 ? min_rate : 1.0;

    DualState dual = DualState::initial(k_total);
    Trajectory trajectory;
    trajectory.slots.reserve(run.slots);
    std::vector<NetworkState> states(s.num_rbs);
    std::vector<RbBeamformers> beamformers(s.num_rbs);
    for (int t = 1; t <= run.slots; ++t) {
        const double mu = dual.mu / cfg.avg_power;
        Schedule schedule = Schedule::empty(k_total, s.num_rbs);
        for (int f = 0; f < s.num_rbs; ++f) {
            states[f] = model.sample(run.seed, t, f);
            Stream rng = substream(run.seed, {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(f),
                                              static_cast<std::uint64_t>(LinkTag::kSymbols)});
            beamformers[f] = prepare_beamformers(states[f], run.phases, run.symbols, rng);
            const RbDecision d = schedule_rb(states[f], beamformers[f], dual.lambda, mu, cfg, budget);
            schedule.assign(f, d.ue, d.power);
        }
        const RateReport report = per_ue_rate(states, schedule, beamformers, cfg, budget);

        SlotRecord record;
        record.slot = t;
        record.sum_rate_bps = report.sum_rate_bps(rb_bandwidth);
        for (double r : report.per_ue_rate) record.per_ue_bps.push_back(r * rb_bandwidth);
        for (double p : schedule.power) record.mean_power += p;
        record.mean_power /= s.num_rbs;

        Subgradient g;
        for (double r : report.per_ue_rate) g.rate.push_back((r - min_rate) / rate_scale);
        g.power = (cfg.avg_power - record.mean_power) / cfg.avg_power;
        dual = subgradient_step(dual, g);
        record.lambda = dual.lambda;
        record.mu = dual.mu;
        trajectory.slots.push_back(std::move(record));
    }
    return trajectory;
}

}  // namespace rislab
