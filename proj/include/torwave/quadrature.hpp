#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace torwave::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point rule from Newton iteration on P_n; exact for polynomials of degree 2n - 1.
GaussLegendreRule gauss_legendre(std::size_t n);

/// Cached 16-point rule used by the adaptive integrator and the curve module.
const GaussLegendreRule& gauss_legendre_16();

template <class F>
double integrate(const GaussLegendreRule& rule, F&& f, double a, double b)
{
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

/// Adaptive bisection comparing the 16-point rule on [a,b] with the sum over
/// both halves. Throws NumericError if `max_depth` is exhausted.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                          int max_depth = 40);

}  // namespace torwave::quad
