#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rislab/beamforming.hpp"
#include "rislab/numerics.hpp"
#include "rislab/random.hpp"
#include "rislab/types.hpp"

namespace rislab {

enum class HostModulation { kBpsk, kQpsk, kQam16, kQam64 };

HostModulation parse_host_modulation(const std::string& name);
std::string to_string(HostModulation host);

// Unit-average-energy constellation of the direct link.
std::vector<cd> host_constellation(HostModulation host);
// smallest angular gap between distinct constellation angles
double host_min_angle(HostModulation host);

struct SymbolSet {
    HostModulation host = HostModulation::kBpsk;
    int order_exponent = 1;  // 2^order_exponent symbols
    std::vector<double> angles;
    double spacing = 0.0;
    std::vector<cd> host_points;

    int size() const { return static_cast<int>(angles.size()); }
};

SymbolSet build_symbol_set(HostModulation host, int order_exponent);

ReflectionMatrix modulated_reflection(double omega, int num_elements);
// Phi = -I: every element at phase -pi
ReflectionMatrix passive_reflection(int num_elements);

// N_s samples sqrt(P) * effective * A(omega) e^{j omega} * x_t + n_t, n_t ~ CN(0, N0).
std::vector<cd> urue_receive(cd effective, double omega, std::span<const cd> host_symbols,
                             const LinkBudget& budget, Stream& rng);
// effective scalar f^H G w from the channels
std::vector<cd> urue_receive(const CVector& f, const CMatrix& G, const CVector& w, double omega,
                             std::span<const cd> host_symbols, const LinkBudget& budget, Stream& rng);

enum class Detector {
    // nearest point of the spacing lattice around the full circle, folded onto the set
    kPhaseSector,
    // argmin_p |z - A(mu_p) e^{j mu_p}|
    kMinimumDistance,
};

// Matched-filter statistic z; equals A(omega) e^{j omega} without noise.
cd combine_samples(std::span<const cd> samples, cd effective, std::span<const cd> host_symbols, double tx_power);

int detect_symbol(cd z, const SymbolSet& set, Detector detector = Detector::kPhaseSector);

// Returns the detected symbol angle.
double demodulate(std::span<const cd> samples, cd effective, const SymbolSet& set,
                  std::span<const cd> host_symbols, double tx_power,
                  Detector detector = Detector::kPhaseSector);

// Average SER over i.i.d. Rayleigh fading by the MGF integral.
double theoretical_ser(const SymbolSet& set, int num_elements, int repetitions, double es_over_n0,
                       int panels = 64);

struct SerSimulation {
    int num_elements = 16;
    int repetitions = 1;
    int num_bs_antennas = 1;
    Detector detector = Detector::kPhaseSector;
};

struct SerEstimate {
    double ser = 0.0;
    Interval ci;
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;
};

SerEstimate simulate_ser(const SymbolSet& set, const SerSimulation& sim, double es_over_n0,
                         std::uint64_t trials, std::uint64_t seed, int threads = 1);

}  // namespace rislab
