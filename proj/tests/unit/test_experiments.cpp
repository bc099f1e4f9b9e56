#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "torwave/error.hpp"
#include "torwave/experiments.hpp"
#include "torwave/stats.hpp"

using namespace torwave;

namespace {

std::shared_ptr<const EigenvalueSpec> spec_of(std::uint64_t m)
{
    return std::make_shared<const EigenvalueSpec>(enumerate_lattice_points(m));
}

const CurveDef& circle()
{
    static const CurveDef c = make_circle({0.5, 0.5});
    return c;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("run_mc matches per-trial counting and ignores the worker count")
{
    const auto spec = spec_of(65);
    const auto one = run_mc(spec, circle(), Ensemble::gaussian, 300, 9, {}, 1);
    const auto many = run_mc(spec, circle(), Ensemble::gaussian, 300, 9, {}, 8);
    CHECK(one.z_values == many.z_values);
    CHECK(one.suspects == many.suspects);
    for (std::size_t i = 0; i < 300; i += 37) {
        const RestrictedWave rw(sample_coefficients(spec, Ensemble::gaussian, 9, i), circle());
        CHECK(one.z_values[i] == static_cast<std::int64_t>(count_zeros(rw).count));
    }
    const auto single = run_mc(spec, circle(), Ensemble::gaussian, 1, 9, {}, 4);
    CHECK(single.z_values.size() == 1);
    CHECK(single.z_values[0] == one.z_values[0]);
    CHECK_THROWS_AS(run_mc(spec_of(3), circle(), Ensemble::gaussian, 10, 0), InvalidArgument);
}

TEST_CASE("summaries")
{
    const auto spec = spec_of(25);
    const std::vector<std::int64_t> constant(200, 7);
    const std::vector<double> eps = {0.1, 0.2};
    const auto flat = summarize_counts(*spec, constant, 0, eps);
    CHECK(flat.mean == 7.0);
    CHECK(flat.variance == 0.0);
    for (const auto& row : flat.tail_table) CHECK(row.probability == 0.0);
    CHECK(flat.tail_table[1].markov == doctest::Approx(1.0 / (12.0 * 0.04)));
    CHECK_THROWS_AS(summarize_counts(*spec, std::vector<std::int64_t>(99, 1), 0, eps), InvalidArgument);

    const auto batch = run_mc(spec, circle(), Ensemble::gaussian, 5000, 3, {}, 2);
    const auto rep = summarize(batch, eps);
    std::vector<double> z(batch.z_values.begin(), batch.z_values.end());
    const auto m = stats::moments(z);
    CHECK(rep.mean == m.mean);
    CHECK(rep.variance == m.variance);
    CHECK(rep.mean_se == doctest::Approx(std::sqrt(m.variance / 5000.0)));
    CHECK(rep.variance_se == stats::jackknife_variance_se(z));
    CHECK(rep.theory_mean == doctest::Approx(std::sqrt(50.0)));
    CHECK(rep.variance_scale == doctest::Approx(25.0 / 12.0));
    CHECK(std::abs(rep.mean - std::sqrt(50.0)) <= 3.0 * rep.mean_se + 0.005 * std::sqrt(50.0));
    CHECK(rep.variance_ratio > 0.0);
    CHECK(rep.variance_ratio < 20.0);
    CHECK(summarize(batch, eps).mean == rep.mean);
}

TEST_CASE("tail below the Markov reference")
{
    const auto batch = run_mc(spec_of(65), circle(), Ensemble::gaussian, 2000, 1, {}, 2);
    const auto rep = summarize(batch, std::vector<double>{0.2});
    CHECK(rep.tail_table[0].probability <= 1.0 / (16.0 * 0.04));
}

TEST_CASE("variance leading term")
{
    for (std::uint64_t m : {2, 5, 25, 65, 325}) {
        const auto v = variance_leading_term(*spec_of(m), circle(), 64);
        CHECK(std::abs(v.factorized) <= 1e-6 * v.scale);
        CHECK(std::abs(v.tensor) <= 1e-6 * v.scale);
    }
    const auto oval = make_analytic_oval(2.0, 1.0, {0.5, 0.5});
    const auto v = variance_leading_term(*spec_of(25), oval, 64);
    const auto converged = variance_leading_term(*spec_of(25), oval, 256);
    CHECK(std::abs(v.factorized - v.tensor) <= 1e-8 * std::abs(v.factorized));
    // Independent evaluation: midpoint rule for int <mu^, gamma'>^2 dt on each mu.
    const auto spec = spec_of(25);
    double sum = 0.0;
    for (const auto& mu : spec->points) {
        const double r = std::sqrt(25.0);
        double integral = 0.0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            const Vec2 d = curve_eval(oval, (i + 0.5) / n, 1);
            const double proj = (mu.mu1 * d.x + mu.mu2 * d.y) / r;
            integral += proj * proj / n;
        }
        sum += 4.0 / 12.0 * integral * integral;
    }
    CHECK(converged.factorized == doctest::Approx(25.0 / 12.0 * (sum - 1.0)).epsilon(1e-7));
    CHECK_THROWS_AS(variance_leading_term(*spec_of(25), circle(), 32), InvalidArgument);
    CHECK_THROWS_AS(variance_leading_term(*spec_of(3), circle(), 64), InvalidArgument);
}

TEST_CASE("repulsion probe")
{
    const auto spec = spec_of(25);
    const auto r = repulsion_probe(spec, circle(), 0.3, Ensemble::gaussian, 0.1, 0.1, 200000, 5);
    // f(t) ~ N(0, 1) and f'(t) ~ N(0, 2 pi^2 m) independent: the window
    // probability is erf(alpha / sqrt 2) erf(beta).
    const double exact = std::erf(0.1 / std::sqrt(2.0)) * std::erf(0.1) / 0.01;
    CHECK(std::abs(r.ratio - exact) <= 4.0 * r.ratio_se);
    CHECK(r.ratio >= 0.81);
    CHECK(r.ratio <= 0.99);
    CHECK(r.below_window);

    const auto tiny = repulsion_probe(spec, circle(), 0.3, Ensemble::gaussian, 1e-12, 0.1, 10000, 5);
    CHECK(tiny.p_hat == 0.0);
    CHECK_THROWS_AS(repulsion_probe(spec, circle(), 0.3, Ensemble::gaussian, 0.0, 0.1, 10000, 5), InvalidArgument);
    CHECK_THROWS_AS(repulsion_probe(spec, circle(), 0.3, Ensemble::gaussian, 0.1, 0.1, 9999, 5), InvalidArgument);
    CHECK_FALSE(repulsion_probe(spec, circle(), 0.3, Ensemble::gaussian, 0.5, 0.5, 10000, 5).below_window);
}

TEST_CASE("universality gap")
{
    const auto spec = spec_of(5);
    const auto same = universality_gap(spec, circle(), Ensemble::gaussian, Ensemble::gaussian, 10000, 4);
    CHECK(same.mean_gap == 0.0);
    CHECK(same.variance_gap == 0.0);

    const auto spec65 = spec_of(65);
    const auto gu = universality_gap(spec65, circle(), Ensemble::gaussian, Ensemble::uniform, 10000, 4, {}, 2);
    CHECK(gu.mean_gap <= 3.0 * gu.mean_gap_se + 0.02 * spec65->lambda);
    CHECK(gu.scale == doctest::Approx(spec65->lambda / 4.0));
    CHECK_THROWS_AS(universality_gap(spec, circle(), Ensemble::gaussian, Ensemble::uniform, 100, 4), InvalidArgument);
}

TEST_CASE("concentration scan")
{
    const std::vector<std::uint64_t> ms = {65, 5};
    const auto rows = concentration_scan(ms, circle(), Ensemble::gaussian, 0.2, 500, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].N == 8);
    CHECK(rows[1].N == 16);
    for (const auto& r : rows) CHECK(r.tail.probability <= r.tail.markov);
    CHECK(rows[1].eps_outside_window == (0.2 * std::log(16.0) > 1.0));

    const std::vector<std::uint64_t> single = {5};
    CHECK(concentration_scan(single, circle(), Ensemble::gaussian, 0.2, 200, 2).size() == 1);
    const std::vector<std::uint64_t> small = {1};
    CHECK_THROWS_AS(concentration_scan(small, circle(), Ensemble::gaussian, 0.2, 200, 2), InvalidArgument);
}

TEST_CASE("large sieve scan")
{
    const auto s = large_sieve_scan(spec_of(325), circle(), Ensemble::gaussian, 50, 3, 1e-3);
    CHECK(std::isfinite(s.max_ratio_d1));
    CHECK(s.max_ratio_d1 >= s.mean_ratio_d1);
    CHECK(s.max_ratio_d2 >= s.mean_ratio_d2);
    CHECK(s.mean_ratio_d1 > 0.0);
}

TEST_CASE("perturbation persistence")
{
    const auto rep = perturbation_persistence(spec_of(65), circle(), Ensemble::gaussian, 10, 8, 32);
    CHECK(rep.failures == 0);
    CHECK(rep.roots_checked > 0);
    CHECK(rep.max_displacement <= rep.allowed_displacement);
    CHECK(rep.params.tau == doctest::Approx(rep.params.delta * rep.params.delta));
}

TEST_CASE("worker default from the environment")
{
    setenv("TORWAVE_WORKERS", "3", 1);
    CHECK(default_workers() == 3);
    setenv("TORWAVE_WORKERS", "zero", 1);
    CHECK(default_workers() >= 1);
    unsetenv("TORWAVE_WORKERS");
}

}
