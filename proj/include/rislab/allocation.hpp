#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rislab/beamforming.hpp"
#include "rislab/channel.hpp"
#include "rislab/modulation.hpp"
#include "rislab/numerics.hpp"
#include "rislab/random.hpp"

namespace rislab {

// Which RUE channel gain drives scheduling and power decisions.
enum class SnrMode {
    kGreedy,  // ||f^H Phi G||^2 with the greedy reflection
    kIdealUpper,  // sum_m (sum_n |f_n||g_nm|)^2
};

struct AllocationConfig {
    double min_rate_bps = 20e6;
    double avg_power = 0.0;  // per RB, linear
    double max_power = 0.0;
    double alpha = 0.1;
    int repetitions = 12;  // N_s
    SnrMode snr_mode = SnrMode::kIdealUpper;

    void validate() const;
};

// P_bar from the link budget and P_max = ratio * P_bar.
AllocationConfig make_allocation_config(const LinkBudget& budget, double max_power_ratio = 4.0);

struct DualState {
    std::vector<double> lambda;
    // normalized by P_bar so it stays O(1) whatever the absolute power scale
    double mu = 0.0;
    int slot = 1;

    static DualState initial(int num_ues);
};

struct Schedule {
    std::vector<std::vector<int>> q;  // q[k][f]
    std::vector<double> power;  // per RB

    static Schedule empty(int num_ues, int num_rbs);
    int num_ues() const { return static_cast<int>(q.size()); }
    int num_rbs() const { return static_cast<int>(power.size()); }
    void assign(int rb, int ue, double p);
    // scheduled UE on an RB; throws unless exactly one q is set
    int selected(int rb) const;
};

// Reflection state of every RIS on one RB.
struct RbBeamformers {
    std::vector<ReflectionMatrix> steering;  // greedy reflection per RUE
    std::vector<double> steering_gain;  // ||f^H Phi G||^2 with MRT after the greedy pass
    std::vector<double> ideal_gain;  // sum_m (sum_n |f_n||g_nm|)^2
    std::vector<double> symbols;  // modulation angle per RUE
    std::vector<ReflectionMatrix> modulated;  // A(omega) e^{j omega} I per RUE

    double decision_gain(int rue, SnrMode mode) const;
};

RbBeamformers prepare_beamformers(const NetworkState& state, const PhaseSet& phases, const SymbolSet& symbols,
                                  Stream& rng);

// Modulation-link SINR terms gamma_a(P) = P S / (D + P I) for RUE k under DUE i.
struct UrueTerms {
    double signal = 0.0;  // alpha |f_k^H Phi_k G_k h_i|^2
    double noise = 0.0;  // N0 ||h_i||^2 / N_s
    double interference = 0.0;  // sum_{j != k} |f_jk^H Phi_j G_j h_i|^2

    double sinr(double power) const;
    // d/dP log(1 + sinr(P))
    double rate_slope(double power) const;
};

UrueTerms urue_terms(const NetworkState& state, const RbBeamformers& beamformers, int rue, int due,
                     const AllocationConfig& cfg, const LinkBudget& budget);

double urue_sinr(const NetworkState& state, const RbBeamformers& beamformers, int rue, int due, double power,
                 const AllocationConfig& cfg, const LinkBudget& budget);

struct RateReport {
    std::vector<double> per_ue_rate;  // bits/s/Hz summed over RBs
    double sum_rate = 0.0;
    // per RB: direct SNR of the scheduled UE, and modulation SINRs per RUE (zero when not served)
    std::vector<double> scheduled_snr;
    std::vector<std::vector<double>> urue_sinr;

    double sum_rate_bps(double rb_bandwidth_hz) const;
};

// UE k < num_due is a DUE; the rest are RUEs in order.
RateReport per_ue_rate(std::span<const NetworkState> states, const Schedule& schedule,
                       std::span<const RbBeamformers> beamformers, const AllocationConfig& cfg,
                       const LinkBudget& budget);

// Sum-rate of one slot computed RB by RB (independent route to per_ue_rate).
double slot_sum_rate(std::span<const NetworkState> states, const Schedule& schedule,
                     std::span<const RbBeamformers> beamformers, const AllocationConfig& cfg,
                     const LinkBudget& budget);

// clamp((1 + lambda)/mu - N0/gain, 0, P_max); mu == 0 gives P_max.
double optimal_power_rue(double lambda, double mu, double channel_gain, double noise_power, double max_power);

// Per-RB Lagrangian term of a DUE at power P (natural-log rates).
double due_objective(const NetworkState& state, const RbBeamformers& beamformers, int due, double lambda,
                     double mu, double power, const AllocationConfig& cfg, const LinkBudget& budget);
double rue_objective(const RbBeamformers& beamformers, int rue, double lambda, double mu, double power,
                     SnrMode mode, const LinkBudget& budget);

// Maximizer of due_objective over [0, P_max] by bisection on the derivative.
double optimal_power_due(const NetworkState& state, const RbBeamformers& beamformers, int due, double lambda,
                         double mu, const AllocationConfig& cfg, const LinkBudget& budget);

struct RbDecision {
    int ue = 0;
    double power = 0.0;
    double objective = 0.0;
};

// mu here is the physical multiplier (per unit power).
RbDecision schedule_rb(const NetworkState& state, const RbBeamformers& beamformers, std::span<const double> lambda,
                       double mu, const AllocationConfig& cfg, const LinkBudget& budget);

struct Subgradient {
    std::vector<double> rate;  // R_k - R_bar
    double power = 0.0;  // (P_bar - mean_f P_f) / P_bar
};

DualState subgradient_step(const DualState& dual, const Subgradient& g);

struct SlotRecord {
    int slot = 0;
    double sum_rate_bps = 0.0;
    std::vector<double> per_ue_bps;
    double mean_power = 0.0;  // average over RBs
    std::vector<double> lambda;
    double mu = 0.0;
};

struct WindowSummary {
    StatAccumulator sum_rate_bps;
    std::vector<StatAccumulator> per_ue_bps;
    StatAccumulator mean_power;
};

struct Trajectory {
    std::vector<SlotRecord> slots;

    // averages over the last `window` slots
    WindowSummary trailing(std::size_t window) const;
};

struct AlgorithmRun {
    int slots = 2000;
    std::uint64_t seed = 1;
    PhaseSet phases = PhaseSet::discrete(1);
    SymbolSet symbols = build_symbol_set(HostModulation::kBpsk, 2);
};

Trajectory run_resource_allocation(const ChannelModel& model, const AllocationConfig& cfg, const AlgorithmRun& run);

}  // namespace rislab
