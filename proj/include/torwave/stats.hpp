#pragma once

#include <cstddef>
#include <span>

namespace torwave::stats {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
};

Moments moments(std::span<const double> x);

/// Jackknife standard error of the unbiased variance estimator.
double jackknife_variance_se(std::span<const double> x);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for k successes out of n at normal quantile z.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

/// sqrt(p (1 - p) / n).
double binomial_se(double p, std::size_t n);

}  // namespace torwave::stats
