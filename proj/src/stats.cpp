#include "torwave/stats.hpp"

#include <algorithm>
#include <cmath>

#include "torwave/error.hpp"

namespace torwave::stats {

Moments moments(std::span<const double> x)
{
    if (x.size() < 2) throw InvalidArgument("moments: need at least two observations");
    const auto n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    Moments m;
    m.mean = sum / n;
    double ss = 0.0;
    for (double v : x) ss += (v - m.mean) * (v - m.mean);
    m.variance = ss / (n - 1.0);
    return m;
}

double jackknife_variance_se(std::span<const double> x)
{
    if (x.size() < 3) throw InvalidArgument("jackknife_variance_se: need at least three observations");
    const auto n = static_cast<double>(x.size());
    const Moments full = moments(x);
    // Centered sums keep leave-one-out updates well conditioned.
    double s1 = 0.0, s2 = 0.0;
    for (double v : x) {
        const double d = v - full.mean;
        s1 += d;
        s2 += d * d;
    }
    double loo_sum = 0.0, loo_ss = 0.0;
    auto loo_var = [&](double v) {
        const double d = v - full.mean;
        const double m = (s1 - d) / (n - 1.0);
        return ((s2 - d * d) - (n - 1.0) * m * m) / (n - 2.0);
    };
    for (double v : x) {
        loo_sum += loo_var(v);
    }
    const double loo_mean = loo_sum / n;
    for (double v : x) {
        const double e = loo_var(v) - loo_mean;
        loo_ss += e * e;
    }
    return std::sqrt((n - 1.0) / n * loo_ss);
}

Interval wilson_interval(std::size_t k, std::size_t n, double z)
{
    if (n == 0 || k > n) throw InvalidArgument("wilson_interval: need 0 <= k <= n, n > 0");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {k == 0 ? 0.0 : std::max(0.0, center - half), k == n ? 1.0 : std::min(1.0, center + half)};
}

double binomial_se(double p, std::size_t n)
{
    if (n == 0) throw InvalidArgument("binomial_se: n must be positive");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace torwave::stats
