#include "rislab/numerics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "rislab/types.hpp"

namespace rislab {

void StatAccumulator::add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
}

void StatAccumulator::merge(const StatAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    count_ += other.count_;
}

double StatAccumulator::variance() const {
    if (count_ < 2) throw std::domain_error("variance needs at least two samples");
    return m2_ / static_cast<double>(count_ - 1);
}

double StatAccumulator::standard_error() const {
    return std::sqrt(variance() / static_cast<double>(count_));
}

Interval StatAccumulator::ci95() const {
    if (count_ < 2) return {mean_, mean_};
    const double half = kZ95 * standard_error();
    return {mean_ - half, mean_ + half};
}

void PairedAccumulator::add(double x, double y) {
    // co-moment update uses the x mean before and the y mean after the update
    const double dx = x - x_.mean();
    x_.add(x);
    y_.add(y);
    cxy_ += dx * (y - y_.mean());
}

void PairedAccumulator::merge(const PairedAccumulator& other) {
    if (other.x_.count() == 0) return;
    if (x_.count() == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(x_.count());
    const double nb = static_cast<double>(other.x_.count());
    const double dx = other.x_.mean() - x_.mean();
    const double dy = other.y_.mean() - y_.mean();
    cxy_ += other.cxy_ + dx * dy * na * nb / (na + nb);
    x_.merge(other.x_);
    y_.merge(other.y_);
}

double PairedAccumulator::covariance() const {
    if (x_.count() < 2) throw std::domain_error("covariance needs at least two samples");
    return cxy_ / static_cast<double>(x_.count() - 1);
}

Interval PairedAccumulator::ratio_ci95() const {
    const double r = ratio();
    if (x_.count() < 2) return {r, r};
    const double n = static_cast<double>(x_.count());
    const double my = y_.mean();
    const double var = (x_.variance() - 2.0 * r * covariance() + r * r * y_.variance()) / (my * my * n);
    const double half = kZ95 * std::sqrt(std::max(var, 0.0));
    return {r - half, r + half};
}

double scaled_bessel_i(int order, double z) {
    if (z < 0.0) throw std::domain_error("scaled_bessel_i: negative argument");
    if (order != 0 && order != 1) throw std::domain_error("scaled_bessel_i: order must be 0 or 1");
    if (z < 500.0) return std::exp(-z) * std::cyl_bessel_i(static_cast<double>(order), z);
    // large-argument expansion: I_nu(z) e^{-z} ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k(nu) / z^k
    const double mu = 4.0 * order * order;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * z);
        sum += term;
    }
    return sum / std::sqrt(2.0 * kPi * z);
}

double laguerre_half(double x) {
    if (!(x <= 0.0)) throw std::domain_error("laguerre_half: argument must be <= 0");
    const double z = -0.5 * x;
    return (1.0 - x) * scaled_bessel_i(0, z) - x * scaled_bessel_i(1, z);
}

double mean_abs_noncentral(double los_magnitude, double variance) {
    if (!(variance > 0.0)) throw std::domain_error("mean_abs_noncentral: variance must be > 0");
    if (los_magnitude < 0.0) throw std::domain_error("mean_abs_noncentral: negative LoS magnitude");
    return std::sqrt(kPi * variance / 4.0) * laguerre_half(-los_magnitude * los_magnitude / variance);
}

namespace {

constexpr int kGaussOrder = 10;

struct GaussRule {
    std::array<double, kGaussOrder> nodes{};
    std::array<double, kGaussOrder> weights{};
};

// Legendre roots by Newton iteration from the Chebyshev guesses.
GaussRule make_gauss_rule() {
    GaussRule rule;
    const int n = kGaussOrder;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

double integrate(const std::function<double(double)>& fn, double lower, double upper, int panels) {
    if (panels < 1) throw std::domain_error("integrate: panels must be >= 1");
    if (!(lower <= upper)) throw std::domain_error("integrate: reversed bounds");
    static const GaussRule rule = make_gauss_rule();
    const double width = (upper - lower) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lower + (p + 0.5) * width;
        double panel = 0.0;
        for (int i = 0; i < kGaussOrder; ++i) panel += rule.weights[i] * fn(mid + 0.5 * width * rule.nodes[i]);
        total += 0.5 * width * panel;
    }
    return total;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw std::domain_error("wilson_interval: zero trials");
    if (successes > trials) throw std::domain_error("wilson_interval: successes exceed trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    // the point estimate always lies inside the Wilson interval analytically; guard rounding
    return {std::min(std::max(centre - half, 0.0), p), std::max(std::min(centre + half, 1.0), p)};
}

}  // namespace rislab
