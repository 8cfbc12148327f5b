#include <doctest.h>

#include <cmath>

#include "rislab/numerics.hpp"
#include "rislab/random.hpp"

using namespace rislab;

TEST_CASE("streams with equal keys replay") {
    Stream a = substream(5, {1, 2, 3});
    Stream b = substream(5, {1, 2, 3});
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    CHECK(a.normal() == b.normal());
}

TEST_CASE("different paths give different streams") {
    CHECK(derive_key(5, {1, 2, 3}) != derive_key(5, {1, 2, 4}));
    CHECK(derive_key(5, {1, 2, 3}) != derive_key(6, {1, 2, 3}));
    CHECK(derive_key(5, {1, 2}) != derive_key(5, {2, 1}));
    CHECK(derive_key(5, {0}) != derive_key(5, {0, 0}));
}

TEST_CASE("uniform draws stay in the unit interval with the right mean") {
    Stream rng(99);
    StatAccumulator acc;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        acc.add(u);
    }
    CHECK(acc.mean() == doctest::Approx(0.5).epsilon(0.01));
    CHECK(acc.variance() == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("complex normal has unit power split across components") {
    Stream rng(3);
    StatAccumulator re;
    StatAccumulator im;
    StatAccumulator power;
    for (int i = 0; i < 100000; ++i) {
        const cd z = rng.complex_normal();
        re.add(z.real());
        im.add(z.imag());
        power.add(std::norm(z));
    }
    CHECK(std::abs(re.mean()) < 0.01);
    CHECK(re.variance() == doctest::Approx(0.5).epsilon(0.02));
    CHECK(im.variance() == doctest::Approx(0.5).epsilon(0.02));
    CHECK(power.mean() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("index covers the range uniformly") {
    Stream rng(17);
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 40000; ++i) ++counts[rng.index(4)];
    for (int c : counts) CHECK(c == doctest::Approx(10000).epsilon(0.05));
}

TEST_CASE("wrap_phase maps into [-pi, pi)") {
    CHECK(wrap_phase(kPi) == doctest::Approx(-kPi));
    CHECK(wrap_phase(-kPi) == doctest::Approx(-kPi));
    CHECK(wrap_phase(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
    CHECK(wrap_phase(0.25) == doctest::Approx(0.25));
    for (double x = -20.0; x < 20.0; x += 0.37) {
        const double w = wrap_phase(x);
        CHECK(w >= -kPi);
        CHECK(w < kPi);
        CHECK(std::remainder(w - x, 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
    }
}
