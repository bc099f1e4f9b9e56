#include <doctest.h>

#include <cmath>
#include <numbers>

#include "torwave/error.hpp"
#include "torwave/quadrature.hpp"

using namespace torwave;

TEST_SUITE("quadrature") {

TEST_CASE("five-point rule matches the closed-form nodes")
{
    const auto r = quad::gauss_legendre(5);
    const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    CHECK(r.nodes[0] == doctest::Approx(-b).epsilon(1e-15));
    CHECK(r.nodes[1] == doctest::Approx(-a).epsilon(1e-15));
    CHECK(r.nodes[2] == 0.0);
    CHECK(r.weights[2] == doctest::Approx(128.0 / 225.0).epsilon(1e-15));
    CHECK(r.weights[0] == doctest::Approx((322.0 - 13.0 * std::sqrt(70.0)) / 900.0).epsilon(1e-14));
}

TEST_CASE("n-point rule is exact through degree 2n - 1")
{
    for (std::size_t n : {1, 2, 3, 8, 16, 64}) {
        const auto r = quad::gauss_legendre(n);
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
        for (std::size_t k = 0; k <= 2 * n - 1 && k <= 40; ++k) {
            const double got = quad::integrate(r, [k](double x) { return std::pow(x, static_cast<double>(k)); }, 0.0, 1.0);
            CHECK(got == doctest::Approx(1.0 / static_cast<double>(k + 1)).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(quad::gauss_legendre(0), InvalidArgument);
}

TEST_CASE("adaptive integration")
{
    CHECK(quad::adaptive_integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-14) ==
          doctest::Approx(2.0).epsilon(1e-14));
    const double peaked = quad::adaptive_integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-10);
    CHECK(peaked == doctest::Approx(2.0 * std::atan(100.0) * 100.0).epsilon(1e-12));
    CHECK_THROWS_AS(quad::adaptive_integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-15, 3),
                    NumericError);
}

}
