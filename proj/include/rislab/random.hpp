#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

#include "rislab/types.hpp"

namespace rislab {

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based generator: the i-th draw is a pure function of (key, i), so a
// stream can be rebuilt anywhere from its key alone.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t key) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ ^ mix64(counter_++)); }

    // uniform on [0, 1) with 53 random bits
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double normal() { return normal_(*this); }
    // CN(0, 1): each component has variance 1/2
    cd complex_normal();
    std::size_t index(std::size_t n);

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> normal_;
};

// Substream keyed by a seed and a path of identifiers such as (slot, rb, link).
std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path);
Stream substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// Link identifiers used in substream paths.
enum class LinkTag : std::uint64_t {
    kBsDue = 1,
    kBsRis = 2,
    kRisRue = 3,
    kCross = 4,
    kSymbols = 5,
    kNoise = 6,
    kTrial = 7,
};

}  // namespace rislab
