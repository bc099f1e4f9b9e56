#include "torwave/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "torwave/error.hpp"

namespace torwave::quad {

GaussLegendreRule gauss_legendre(std::size_t n)
{
    if (n == 0) throw InvalidArgument("gauss_legendre: n must be positive");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess for the i-th largest root.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            const double pn = (n == 1) ? x : p1;
            const double pnm1 = (n == 1) ? 1.0 : p0;
            dp = static_cast<double>(n) * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        const double pn = (n == 1) ? x : p1;
        const double pnm1 = (n == 1) ? 1.0 : p0;
        dp = static_cast<double>(n) * (x * pn - pnm1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

const GaussLegendreRule& gauss_legendre_16()
{
    static const GaussLegendreRule rule = gauss_legendre(16);
    return rule;
}

namespace {

double adaptive_step(const std::function<double(double)>& f, double a, double b, double whole, double tol,
                     int depth)
{
    const double mid = 0.5 * (a + b);
    const auto& rule = gauss_legendre_16();
    const double left = integrate(rule, f, a, mid);
    const double right = integrate(rule, f, mid, b);
    const double refined = left + right;
    if (std::abs(refined - whole) <= tol) return refined;
    if (depth == 0) throw NumericError("adaptive_integrate: maximum subdivision depth reached");
    return adaptive_step(f, a, mid, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                          int max_depth)
{
    if (!(abs_tol > 0.0)) throw InvalidArgument("adaptive_integrate: tolerance must be positive");
    if (a == b) return 0.0;
    const double whole = integrate(gauss_legendre_16(), f, a, b);
    return adaptive_step(f, a, b, whole, abs_tol, max_depth);
}

}  // namespace torwave::quad
