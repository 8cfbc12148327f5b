#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rislab/channel.hpp"
#include "rislab/types.hpp"

namespace rislab {

// Amplitude-phase coupling of a varactor-tuned element, theta in [-pi, pi].
double reflection_amplitude(double theta);

inline constexpr double kMinAmplitude = 0.2;

class PhaseSet {
public:
    static PhaseSet discrete(int bits);
    static PhaseSet continuous();

    bool is_continuous() const { return !bits_.has_value(); }
    int bits() const;
    const std::vector<double>& phases() const { return phases_; }

private:
    std::optional<int> bits_;
    std::vector<double> phases_;
};

PhaseSet make_phase_set(int bits);

class ReflectionMatrix {
public:
    ReflectionMatrix() = default;
    // amplitudes are always derived from the phases
    explicit ReflectionMatrix(std::vector<double> phases);

    static ReflectionMatrix uniform(double phase, int num_elements);

    int size() const { return static_cast<int>(phases_.size()); }
    const std::vector<double>& phases() const { return phases_; }
    const std::vector<double>& amplitudes() const { return amplitudes_; }
    // diagonal entries A_n e^{j theta_n}
    CVector diagonal() const;

private:
    std::vector<double> phases_;
    std::vector<double> amplitudes_;
};

struct LinkBudget {
    double tx_power = 1.0;
    double noise_power = 1.0;
    double symbol_energy_due = 1.0;
    double symbol_energy_rue = 1.0;

    // P and N0 per RB from the scenario PSDs
    static LinkBudget from_scenario(const Scenario& scenario);
    void validate() const;
};

struct BeamformResult {
    ReflectionMatrix reflection;
    int selected_antenna = 0;  // zero-based
    std::vector<double> trace;  // |s_i|, i = 1..N
    double snr = 0.0;
    std::uint64_t evaluations = 0;
};

// Greedy phase selection against the strongest BS antenna.
BeamformResult greedy_phase_selection(const CVector& f, const CMatrix& G, const PhaseSet& phases,
                                      const LinkBudget& budget = {});

struct OracleResult {
    ReflectionMatrix reflection;
    double value = 0.0;  // ||f^H Phi G||^2
};

OracleResult exhaustive_phase_search(const CVector& f, const CMatrix& G, const PhaseSet& phases);

// ||f^H Phi G||^2
double cascade_gain(const CVector& f, const ReflectionMatrix& reflection, const CMatrix& G);
// f^H Phi G as a row vector of length M
Eigen::RowVectorXcd cascade_row(const CVector& f, const ReflectionMatrix& reflection, const CMatrix& G);

int strongest_antenna(const CMatrix& G);
CVector antenna_selection_precoder(const CMatrix& G);
// v / ||v||, so |v^H w| = ||v||
CVector mrt_precoder(const CVector& effective_channel);

double snr_rue(const CVector& f, const ReflectionMatrix& reflection, const CMatrix& G, const CVector& w,
               const LinkBudget& budget);
double snr_due(const CVector& h, const CVector& w, const LinkBudget& budget);
// (P/N0) sum_m (sum_n |f_n||g_nm|)^2
double snr_upper_ideal(const CVector& f, const CMatrix& G, const LinkBudget& budget);
// SNR with every phase co-phased to antenna m0 and every amplitude at the 0.2 floor
double snr_lower_bound_realization(const CVector& f, const CMatrix& G, int m0, const LinkBudget& budget);

enum class ScatteringPower {
    kDiagonal,  // R_nn, the variance of element n
    kAbsRowSum,  // sum_j |R_nj|
};

// Jensen lower bound on E[snr_lower_bound_realization] for Rician G and f.
double mean_snr_lower_bound(const RicianParams& cascade, const RicianParams& ris_user, int m0,
                            const LinkBudget& budget, ScatteringPower power = ScatteringPower::kDiagonal);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

// Closed-form moments of snr_lower_bound_realization under i.i.d. Rayleigh fading.
Moments rayleigh_snr_moments(int num_elements, int num_antennas, const LinkBudget& budget);

}  // namespace rislab
