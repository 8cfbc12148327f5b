#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace rislab {

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

// Streaming mean/variance (Welford), mergeable for parallel reductions.
class StatAccumulator {
public:
    void add(double x);
    void merge(const StatAccumulator& other);

    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }
    double m2() const { return m2_; }
    // sample variance; requires count >= 2
    double variance() const;
    double standard_error() const;
    // normal-approximation 95% interval for the mean
    Interval ci95() const;

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Paired samples (x, y) with running co-moment, for ratio-of-means intervals.
class PairedAccumulator {
public:
    void add(double x, double y);
    void merge(const PairedAccumulator& other);

    const StatAccumulator& x() const { return x_; }
    const StatAccumulator& y() const { return y_; }
    double covariance() const;
    double ratio() const { return x_.mean() / y_.mean(); }
    // delta-method 95% interval for mean(x)/mean(y)
    Interval ratio_ci95() const;

private:
    StatAccumulator x_;
    StatAccumulator y_;
    double cxy_ = 0.0;
};

// e^{-z} I_nu(z) for nu in {0, 1}, z >= 0; finite for any z.
double scaled_bessel_i(int order, double z);

// L_{1/2}(x) for x <= 0.
double laguerre_half(double x);

// E|z| for z ~ CN(m, variance) with |m| = los_magnitude.
double mean_abs_noncentral(double los_magnitude, double variance);

// Composite Gauss-Legendre quadrature, fixed order per panel.
double integrate(const std::function<double(double)>& fn, double lower, double upper,
                 int panels = 64);

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

inline constexpr double kZ95 = 1.959963984540054;

}  // namespace rislab
