#include "rislab/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rislab/parallel.hpp"

namespace rislab {

namespace {

std::vector<cd> square_qam(int side) {
    std::vector<cd> points;
    double energy = 0.0;
    for (int i = 0; i < side; ++i) {
        for (int q = 0; q < side; ++q) {
            const cd p(2.0 * i - side + 1.0, 2.0 * q - side + 1.0);
            points.push_back(p);
            energy += std::norm(p);
        }
    }
    const double scale = 1.0 / std::sqrt(energy / static_cast<double>(points.size()));
    for (auto& p : points) p *= scale;
    return points;
}

}  // namespace

HostModulation parse_host_modulation(const std::string& name) {
    if (name == "bpsk") return HostModulation::kBpsk;
    if (name == "qpsk") return HostModulation::kQpsk;
    if (name == "qam16" || name == "16qam") return HostModulation::kQam16;
    if (name == "qam64" || name == "64qam") return HostModulation::kQam64;
    throw std::invalid_argument("unknown host modulation: " + name);
}

std::string to_string(HostModulation host) {
    switch (host) {
        case HostModulation::kBpsk: return "bpsk";
        case HostModulation::kQpsk: return "qpsk";
        case HostModulation::kQam16: return "qam16";
        case HostModulation::kQam64: return "qam64";
    }
    return "unknown";
}

std::vector<cd> host_constellation(HostModulation host) {
    switch (host) {
        case HostModulation::kBpsk: return {cd(1.0, 0.0), cd(-1.0, 0.0)};
        case HostModulation::kQpsk: {
            std::vector<cd> points;
            for (int i = 0; i < 4; ++i) points.push_back(std::polar(1.0, kPi / 4.0 + i * kPi / 2.0));
            return points;
        }
        case HostModulation::kQam16: return square_qam(4);
        case HostModulation::kQam64: return square_qam(8);
    }
    throw std::invalid_argument("unknown host modulation");
}

double host_min_angle(HostModulation host) {
    std::vector<double> angles;
    for (const cd& p : host_constellation(host)) angles.push_back(std::arg(p));
    std::sort(angles.begin(), angles.end());
    // points sharing a ray are told apart by magnitude, not angle
    angles.erase(std::unique(angles.begin(), angles.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 angles.end());
    double gap = 2.0 * kPi - (angles.back() - angles.front());
    for (std::size_t i = 1; i < angles.size(); ++i) gap = std::min(gap, angles[i] - angles[i - 1]);
    return gap;
}

SymbolSet build_symbol_set(HostModulation host, int order_exponent) {
    if (order_exponent < 1 || order_exponent > 12)
        throw std::invalid_argument("build_symbol_set: order exponent must be in [1, 12]");
    SymbolSet set;
    set.host = host;
    set.order_exponent = order_exponent;
    set.host_points = host_constellation(host);
    const int count = 1 << order_exponent;
    set.spacing = host_min_angle(host) / count;
    for (int p = 0; p < count; ++p) set.angles.push_back(p * set.spacing);

    if (set.angles.back() - set.angles.front() >= host_min_angle(host))
        throw std::invalid_argument("build_symbol_set: symbol span reaches the host angular spacing");
    // composite points must stay pairwise distinct
    std::vector<cd> composite;
    for (double mu : set.angles)
        for (const cd& x : set.host_points) composite.push_back(std::polar(reflection_amplitude(mu), mu) * x);
    for (std::size_t a = 0; a < composite.size(); ++a)
        for (std::size_t b = a + 1; b < composite.size(); ++b)
            if (std::abs(composite[a] - composite[b]) < 1e-9)
                throw std::invalid_argument("build_symbol_set: ambiguous composite constellation");
    return set;
}

ReflectionMatrix modulated_reflection(double omega, int num_elements) {
    if (!(omega >= -kPi && omega <= kPi)) throw std::domain_error("modulated_reflection: omega outside [-pi, pi]");
    return ReflectionMatrix::uniform(omega, num_elements);
}

ReflectionMatrix passive_reflection(int num_elements) { return ReflectionMatrix::uniform(-kPi, num_elements); }

std::vector<cd> urue_receive(cd effective, double omega, std::span<const cd> host_symbols,
                             const LinkBudget& budget, Stream& rng) {
    const cd signal = std::sqrt(budget.tx_power) * effective * std::polar(reflection_amplitude(omega), omega);
    const double noise_scale = std::sqrt(budget.noise_power);
    std::vector<cd> samples;
    samples.reserve(host_symbols.size());
    for (const cd& x : host_symbols) {
        const cd noise = rng.complex_normal();
        samples.push_back(signal * x + noise_scale * noise);
    }
    return samples;
}

std::vector<cd> urue_receive(const CVector& f, const CMatrix& G, const CVector& w, double omega,
                             std::span<const cd> host_symbols, const LinkBudget& budget, Stream& rng) {
    if (G.rows() != f.size() || G.cols() != w.size()) throw std::invalid_argument("urue_receive: dimension mismatch");
    const cd effective = f.dot(G * w);
    return urue_receive(effective, omega, host_symbols, budget, rng);
}

cd combine_samples(std::span<const cd> samples, cd effective, std::span<const cd> host_symbols, double tx_power) {
    if (effective == cd(0.0)) throw std::invalid_argument("combine_samples: zero effective channel");
    if (samples.size() != host_symbols.size() || samples.empty())
        throw std::invalid_argument("combine_samples: sample and host symbol counts differ");
    cd numerator = 0.0;
    double energy = 0.0;
    for (std::size_t t = 0; t < samples.size(); ++t) {
        const cd reference = effective * host_symbols[t];
        numerator += samples[t] * std::conj(reference);
        energy += std::norm(reference);
    }
    return numerator / (std::sqrt(tx_power) * energy);
}

int detect_symbol(cd z, const SymbolSet& set, Detector detector) {
    const int count = set.size();
    if (detector == Detector::kMinimumDistance) {
        int best = 0;
        double best_distance = std::abs(z - std::polar(reflection_amplitude(set.angles[0]), set.angles[0]));
        for (int p = 1; p < count; ++p) {
            const double d = std::abs(z - std::polar(reflection_amplitude(set.angles[p]), set.angles[p]));
            if (d < best_distance) {
                best = p;
                best_distance = d;
            }
        }
        return best;
    }
    auto fold = [count](long long index) { return static_cast<int>(((index % count) + count) % count); };
    const double position = std::arg(z) / set.spacing;
    const long long lower = static_cast<long long>(std::floor(position));
    const double fraction = position - static_cast<double>(lower);
    if (std::abs(fraction - 0.5) < 1e-12) return std::min(fold(lower), fold(lower + 1));
    return fraction < 0.5 ? fold(lower) : fold(lower + 1);
}

double demodulate(std::span<const cd> samples, cd effective, const SymbolSet& set,
                  std::span<const cd> host_symbols, double tx_power, Detector detector) {
    const cd z = combine_samples(samples, effective, host_symbols, tx_power);
    return set.angles[detect_symbol(z, set, detector)];
}

double theoretical_ser(const SymbolSet& set, int num_elements, int repetitions, double es_over_n0, int panels) {
    if (num_elements < 1 || repetitions < 1) throw std::invalid_argument("theoretical_ser: N and N_s must be >= 1");
    if (!(es_over_n0 >= 0.0)) throw std::domain_error("theoretical_ser: es_over_n0 must be >= 0");
    const double half = set.spacing / 2.0;
    const double s2 = std::sin(half) * std::sin(half);
    const double gain = static_cast<double>(num_elements) * repetitions * es_over_n0 * s2;
    double total = 0.0;
    for (double mu : set.angles) {
        const double c = gain * reflection_amplitude(mu) * reflection_amplitude(mu);
        // 1 / (1 + c / sin^2) written to stay finite at theta -> 0
        auto integrand = [c](double theta) {
            const double s = std::sin(theta) * std::sin(theta);
            return s / (s + c);
        };
        total += integrate(integrand, 0.0, kPi - half, panels) / kPi;
    }
    return total / set.size();
}

SerEstimate simulate_ser(const SymbolSet& set, const SerSimulation& sim, double es_over_n0,
                         std::uint64_t trials, std::uint64_t seed, int threads) {
    if (trials < 1000) throw std::invalid_argument("simulate_ser: needs at least 1000 trials");
    if (sim.num_elements < 1 || sim.repetitions < 1 || sim.num_bs_antennas < 1)
        throw std::invalid_argument("simulate_ser: invalid dimensions");
    if (!(es_over_n0 >= 0.0)) throw std::domain_error("simulate_ser: es_over_n0 must be >= 0");
    LinkBudget budget;
    budget.tx_power = es_over_n0;
    budget.noise_power = 1.0;

    constexpr std::uint64_t kBlock = 1024;
    const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<std::uint64_t> errors(blocks, 0);
    parallel_for(blocks, threads, [&](std::size_t block) {
        const std::uint64_t begin = block * kBlock;
        const std::uint64_t end = std::min(trials, begin + kBlock);
        std::vector<cd> host(sim.repetitions);
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            Stream rng = substream(seed, {static_cast<std::uint64_t>(LinkTag::kTrial), trial});
            const CVector f = sample_rician(RicianParams::rayleigh(sim.num_elements, 1), sim.num_elements, 1, rng).col(0);
            const CMatrix G = sample_rician(RicianParams::rayleigh(sim.num_elements, sim.num_bs_antennas),
                                            sim.num_elements, sim.num_bs_antennas, rng);
            const CVector w = antenna_selection_precoder(G);
            const cd effective = f.dot(G * w);
            if (effective == cd(0.0)) {
                ++errors[block];
                continue;
            }
            const int sent = static_cast<int>(rng.index(set.angles.size()));
            for (auto& x : host) x = set.host_points[rng.index(set.host_points.size())];
            const auto samples = urue_receive(effective, set.angles[sent], host, budget, rng);
            const cd z = combine_samples(samples, effective, host, budget.tx_power > 0.0 ? budget.tx_power : 1.0);
            if (detect_symbol(z, set, sim.detector) != sent) ++errors[block];
        }
    });

    SerEstimate out;
    out.trials = trials;
    for (auto e : errors) out.errors += e;
    out.ser = static_cast<double>(out.errors) / static_cast<double>(trials);
    out.ci = wilson_interval(out.errors, trials);
    return out;
}

}  // namespace rislab
