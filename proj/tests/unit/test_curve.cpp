#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "torwave/curve.hpp"
#include "torwave/error.hpp"

using namespace torwave;

namespace {

constexpr double kPi = std::numbers::pi;

// Polyline length of gamma over [t1, t2] with n chords, Richardson-extrapolated
// from n and 2n chords (chord error is O(h^2)).
double polyline_length(const CurveDef& c, double t1, double t2, int n)
{
    auto chords = [&](int k) {
        double len = 0.0;
        Vec2 prev = curve_eval(c, t1, 0);
        for (int i = 1; i <= k; ++i) {
            const Vec2 cur = curve_eval(c, t1 + (t2 - t1) * i / k, 0);
            len += norm(cur - prev);
            prev = cur;
        }
        return len;
    };
    return (4.0 * chords(2 * n) - chords(n)) / 3.0;
}

void check_finite_differences(const CurveDef& c)
{
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = 1e-6;
    for (int i = 0; i < 1000; ++i) {
        const double t = u(gen);
        for (int order = 0; order < 2; ++order) {
            const Vec2 fd = (1.0 / (2.0 * h)) * (curve_eval(c, t + h, order) - curve_eval(c, t - h, order));
            const Vec2 exact = curve_eval(c, t, order + 1);
            REQUIRE(norm(fd - exact) <= 1e-5);
        }
    }
}

}  // namespace

TEST_SUITE("curve") {

TEST_CASE("circle closed forms")
{
    const auto c = make_circle({0.5, 0.5});
    const Vec2 g0 = curve_eval(c, 0.0, 0);
    CHECK(g0.x == doctest::Approx(0.5 + 1.0 / (2.0 * kPi)).epsilon(1e-15));
    CHECK(g0.y == doctest::Approx(0.5).epsilon(1e-15));
    const Vec2 v0 = curve_eval(c, 0.0, 1);
    CHECK(std::abs(v0.x) < 1e-15);
    CHECK(v0.y == doctest::Approx(1.0).epsilon(1e-15));
    for (double t : {0.0, 0.1, 0.37, 0.5, 0.99}) {
        CHECK(std::abs(norm(curve_eval(c, t, 2)) - 2.0 * kPi) <= 1e-12);
        CHECK(std::abs(norm(curve_eval(c, t, 1)) - 1.0) <= 1e-15);
    }
    const Vec2 q = curve_eval(make_circle({0.25, 0.5}), 0.25, 0);
    CHECK(q.x == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(q.y == doctest::Approx(0.5 + 1.0 / (2.0 * kPi)).epsilon(1e-15));
    CHECK(std::abs(polyline_length(c, 0.0, 1.0, 20000) - 1.0) <= 1e-12);
}

TEST_CASE("oval has unit speed and unit length")
{
    const auto c = make_analytic_oval(2.0, 1.0, {0.5, 0.5});
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) REQUIRE(std::abs(norm(curve_eval(c, u(gen), 1)) - 1.0) <= 1e-9);
    CHECK(std::abs(polyline_length(c, 0.0, 1.0, 20000) - 1.0) <= 1e-9);
}

TEST_CASE("arc length between parameters equals the parameter difference")
{
    const auto c = make_analytic_oval(2.0, 1.0, {0.3, 0.6});
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        double t1 = u(gen), t2 = u(gen);
        if (t1 > t2) std::swap(t1, t2);
        CHECK(std::abs(polyline_length(c, t1, t2, 4000) - (t2 - t1)) <= 1e-8);
    }
}

TEST_CASE("finite differences match derivatives")
{
    check_finite_differences(make_circle({0.5, 0.5}));
    check_finite_differences(make_analytic_oval(2.0, 1.0, {0.5, 0.5}));
    check_finite_differences(make_analytic_oval(1.0, 3.0, {0.1, 0.9}));
}

TEST_CASE("periodicity is exact for representable shifts")
{
    const auto c = make_analytic_oval(2.0, 1.0, {0.5, 0.5});
    for (int k = -1024; k <= 1024; k += 7) {
        const double t = k / 1024.0;
        for (int order = 0; order <= 2; ++order) {
            CHECK(curve_eval(c, t, order) == curve_eval(c, t + 1.0, order));
            CHECK(curve_eval(c, t, order) == curve_eval(c, t + 3.0, order));
        }
    }
}

TEST_CASE("ellipse curvature extremes")
{
    const auto c = make_analytic_oval(2.0, 1.0, {0.5, 0.5});
    CHECK(c.curvature_min() > 0.0);
    CHECK(c.curvature_max() / c.curvature_min() == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(make_analytic_oval(1.0, 3.0, {0.5, 0.5}).curvature_max() /
              make_analytic_oval(1.0, 3.0, {0.5, 0.5}).curvature_min() ==
          doctest::Approx(27.0).epsilon(1e-6));
}

TEST_CASE("construction errors")
{
    CHECK_THROWS_AS(make_analytic_oval(1.0, 1.0, {0.5, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(make_analytic_oval(-1.0, 1.0, {0.5, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(parse_curve("square:1"), InvalidArgument);
    CHECK_THROWS_AS(parse_curve("circle:0.5"), InvalidArgument);
    CHECK_THROWS_AS(parse_curve("oval:2,2,0.5,0.5"), InvalidArgument);
    CHECK(parse_curve("circle:0.25,0.5").kind() == CurveKind::circle);
    CHECK(parse_curve("oval:2,1,0.5,0.5").kind() == CurveKind::analytic_oval);
    CHECK(parse_curve(parse_curve("oval:2,1,0.5,0.5").describe()).describe() == "oval:2,1,0.5,0.5");
}

TEST_CASE("validation")
{
    const auto circle = validate_curve(make_circle({0.5, 0.5}), 1000);
    CHECK(circle.passed);
    CHECK(circle.curvature_min == doctest::Approx(2.0 * kPi).epsilon(1e-12));

    const auto oval = validate_curve(make_analytic_oval(2.0, 1.0, {0.5, 0.5}), 1000);
    CHECK(oval.passed);
    CHECK(oval.curvature_min > 0.0);

    const auto native = validate_curve(make_native_ellipse(2.0, 1.0, {0.5, 0.5}), 1000);
    CHECK_FALSE(native.passed);
    CHECK(native.max_unit_speed_defect > 0.1);

    CHECK_THROWS_AS(validate_curve(make_circle({0.5, 0.5}), 10), InvalidArgument);
}

}
