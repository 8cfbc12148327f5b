#include "rislab/random.hpp"

#include <cmath>

namespace rislab {

double wrap_phase(double theta) {
    double wrapped = theta - 2.0 * kPi * std::floor((theta + kPi) / (2.0 * kPi));
    // floor rounding can land exactly on +pi
    if (wrapped >= kPi) wrapped -= 2.0 * kPi;
    return wrapped;
}

cd Stream::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
}

std::size_t Stream::index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t key = mix64(seed);
    std::uint64_t depth = 1;
    for (std::uint64_t id : path) {
        key = mix64(key ^ mix64(id + 0x632be59bd9b4e019ULL * depth));
        ++depth;
    }
    return key;
}

Stream substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Stream(derive_key(seed, path));
}

}  // namespace rislab
