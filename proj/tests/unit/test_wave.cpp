#include <doctest.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <thread>

#include "torwave/error.hpp"
#include "torwave/wave.hpp"

using namespace torwave;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const EigenvalueSpec> spec_of(std::uint64_t m)
{
    return std::make_shared<const EigenvalueSpec>(enumerate_lattice_points(m));
}

// F = sqrt(1/2) cos(2 pi x1) for m = 1.
WaveSample cosine_wave()
{
    const auto spec = spec_of(1);
    std::vector<double> a(2, 0.0), b(2, 0.0);
    for (std::size_t i = 0; i < 2; ++i) {
        if (spec->half_points[i] == LatticePoint{1, 0}) a[i] = 1.0;
    }
    return make_wave(spec, a, b);
}

struct Running {
    double n = 0, sum = 0, sum2 = 0;
    void add(double v)
    {
        n += 1;
        sum += v;
        sum2 += v * v;
    }
    double mean() const { return sum / n; }
    double se() const { return std::sqrt((sum2 / n - mean() * mean()) / (n - 1)); }
};

}  // namespace

TEST_SUITE("wave") {

TEST_CASE("coefficient laws")
{
    const auto spec = spec_of(325);
    double sum2 = 0.0;
    std::size_t count = 0;
    for (std::uint64_t t = 0; t < 42000; ++t) {
        const auto w = sample_coefficients(spec, Ensemble::gaussian, 11, t);
        for (std::size_t i = 0; i < w.a.size(); ++i) {
            sum2 += w.a[i] * w.a[i] + w.b[i] * w.b[i];
            count += 2;
        }
    }
    CHECK(count >= 1000000);
    CHECK(sum2 / static_cast<double>(count) == doctest::Approx(1.0).epsilon(0.01));

    double usum2 = 0.0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const auto r = sample_coefficients(spec, Ensemble::rademacher, 11, t);
        const auto u = sample_coefficients(spec, Ensemble::uniform, 11, t);
        for (std::size_t i = 0; i < r.a.size(); ++i) {
            REQUIRE(std::abs(r.a[i]) == 1.0);
            REQUIRE(std::abs(r.b[i]) == 1.0);
            REQUIRE(std::abs(u.a[i]) <= std::sqrt(3.0));
            REQUIRE(std::abs(u.b[i]) <= std::sqrt(3.0));
            usum2 += u.a[i] * u.a[i] + u.b[i] * u.b[i];
        }
    }
    CHECK(usum2 / (1000.0 * 24.0) == doctest::Approx(1.0).epsilon(0.03));
    CHECK_THROWS_AS(sample_coefficients(spec_of(3), Ensemble::gaussian, 0, 0), InvalidArgument);
    CHECK_THROWS_AS(parse_ensemble("cauchy"), InvalidArgument);
}

TEST_CASE("samples are addressed by seed and trial, not by call order or thread")
{
    const auto spec = spec_of(65);
    const auto ref = sample_coefficients(spec, Ensemble::gaussian, 5, 17);
    CHECK(ref.seed_path == SeedPath{5, 17});
    std::vector<WaveSample> from_threads(8);
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < from_threads.size(); ++i) {
            pool.emplace_back([&, i] { from_threads[i] = sample_coefficients(spec, Ensemble::gaussian, 5, 17); });
        }
    }
    for (const auto& w : from_threads) {
        CHECK(w.a == ref.a);
        CHECK(w.b == ref.b);
    }
    CHECK(sample_coefficients(spec, Ensemble::gaussian, 5, 18).a != ref.a);
    CHECK(sample_coefficients(spec, Ensemble::gaussian, 6, 17).a != ref.a);
    CHECK(sample_coefficients(spec, Ensemble::uniform, 5, 17).a != ref.a);
}

TEST_CASE("closed-form torus evaluations")
{
    const auto spec = spec_of(25);
    const auto zero = make_wave(spec, std::vector<double>(6, 0.0), std::vector<double>(6, 0.0));
    CHECK(eval_torus(zero, {0.3, 0.7}) == 0.0);

    const auto w = cosine_wave();
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Vec2 x{u(gen), u(gen)};
        CHECK(eval_torus(w, x) == doctest::Approx(std::sqrt(0.5) * std::cos(2.0 * kPi * x.x)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(make_wave(spec, {1.0}, {1.0}), InvalidArgument);
}

TEST_CASE("complex pairing reproduces the real sum")
{
    const auto spec = spec_of(1105);
    const auto w = sample_coefficients(spec, Ensemble::gaussian, 1, 2);
    const auto eps = complex_coefficients(w);
    REQUIRE(eps.size() == spec->N());
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Vec2 x{u(gen), u(gen)};
        std::complex<double> z = 0.0;
        for (std::size_t k = 0; k < spec->N(); ++k) {
            z += eps[k] * std::polar(1.0, 2.0 * kPi * (spec->points[k].mu1 * x.x + spec->points[k].mu2 * x.y));
        }
        z /= std::sqrt(static_cast<double>(spec->N()));
        CHECK(std::abs(z.real() - eval_torus(w, x)) <= 1e-12);
        CHECK(std::abs(z.imag()) <= 1e-12);
    }
}

TEST_CASE("restriction agrees with torus evaluation and finite differences")
{
    for (const auto& curve : {make_circle({0.5, 0.5}), make_analytic_oval(2.0, 1.0, {0.4, 0.6})}) {
        const auto spec = spec_of(325);
        const RestrictedWave rw(sample_coefficients(spec, Ensemble::gaussian, 9, 0), curve);
        const double lam = spec->lambda;
        const double h = 1e-4 / lam;
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 1000; ++i) {
            const double t = u(gen);
            REQUIRE(std::abs(eval_restricted(rw, t, 0) - eval_torus(rw.sample(), curve_eval(curve, t, 0))) <= 1e-12);
            const double d1 = (eval_restricted(rw, t + h, 0) - eval_restricted(rw, t - h, 0)) / (2 * h);
            const double d2 = (eval_restricted(rw, t + h, 1) - eval_restricted(rw, t - h, 1)) / (2 * h);
            REQUIRE(std::abs(d1 - eval_restricted(rw, t, 1)) <= 1e-5 * lam);
            REQUIRE(std::abs(d2 - eval_restricted(rw, t, 2)) <= 1e-5 * lam * lam);
            const WaveJet j = rw.jet(t);
            REQUIRE(j.f == eval_restricted(rw, t, 0));
            REQUIRE(j.df == eval_restricted(rw, t, 1));
            REQUIRE(j.d2f == eval_restricted(rw, t, 2));
        }
    }
}

TEST_CASE("cosine wave on the shifted circle")
{
    const RestrictedWave rw(cosine_wave(), make_circle({0.25, 0.5}));
    CHECK(std::abs(rw.eval(0.25, 0)) <= 1e-15);
    CHECK(rw.eval(0.25, 1) == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(rw.eval(0.25, 3), InvalidArgument);
}

TEST_CASE("pointwise second moments")
{
    // E f^2 = 1, E f'^2 = 2 pi^2 m and E f f' = 0 at a fixed point.
    const auto spec = spec_of(65);
    const auto curve = make_analytic_oval(2.0, 1.0, {0.5, 0.5});
    const double t = 0.3;
    for (auto ens : {Ensemble::gaussian, Ensemble::rademacher, Ensemble::uniform}) {
        Running f2, d2, fd;
        for (std::uint64_t i = 0; i < 100000; ++i) {
            const RestrictedWave rw(sample_coefficients(spec, ens, 21, i), curve);
            const WaveJet j = rw.jet(t);
            f2.add(j.f * j.f);
            d2.add(j.df * j.df);
            fd.add(j.f * j.df);
        }
        INFO(ensemble_name(ens));
        CHECK(std::abs(f2.mean() - 1.0) <= 3.0 * f2.se());
        CHECK(std::abs(d2.mean() - 2.0 * kPi * kPi * 65.0) <= 3.0 * d2.se());
        CHECK(std::abs(fd.mean()) <= 3.0 * fd.se());
    }
}

TEST_CASE("batch evaluation equals the pointwise loop")
{
    const auto spec = spec_of(325);
    const RestrictedWave rw(sample_coefficients(spec, Ensemble::gaussian, 2, 3), make_circle({0.5, 0.5}));
    CHECK(batch_eval(rw, std::vector<double>{0.123}, 1)[0] == eval_restricted(rw, 0.123, 1));

    std::vector<double> grid(10000);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / grid.size();
    const auto t0 = std::chrono::steady_clock::now();
    const auto values = batch_eval(rw, grid, 0);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(values[i] - eval_restricted(rw, grid[i], 0)));
    CHECK(worst <= 1e-12);
    MESSAGE("batch_eval m=325, 1e4 points: " << ms << " ms");
    CHECK(ms < 50.0);
}

TEST_CASE("phase table matches direct evaluation")
{
    const auto spec = spec_of(1105);
    const auto curve = make_analytic_oval(1.0, 2.0, {0.2, 0.3});
    const auto table = PhaseTable::build(*spec, curve, 5000);
    const RestrictedWave rw(sample_coefficients(spec, Ensemble::gaussian, 8, 1), curve, table);
    std::vector<double> f(5000), df(5000);
    rw.eval_table(*table, f, df);
    for (std::size_t j = 0; j < f.size(); j += 7) {
        REQUIRE(std::abs(f[j] - rw.eval(table->t(j), 0)) <= 1e-12);
        REQUIRE(std::abs(df[j] - rw.eval(table->t(j), 1)) <= 1e-12 * spec->lambda);
    }
    CHECK_THROWS_AS(RestrictedWave(sample_coefficients(spec_of(65), Ensemble::gaussian, 8, 1), curve, table),
                    InvalidArgument);
}

}
