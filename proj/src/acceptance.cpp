#include "torwave/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "torwave/experiments.hpp"
#include "torwave/serialize.hpp"

namespace torwave::acceptance {
namespace {

constexpr std::uint64_t kSeed = 42;
constexpr std::size_t kMcTrials = 20000;
constexpr double kScanEps = 0.2;
const std::vector<std::uint64_t> kScanM = {5, 65, 1105, 32045};  // N = 8, 16, 32, 64

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

CurveDef circle() { return make_circle({0.5, 0.5}); }

std::shared_ptr<const EigenvalueSpec> spec_for(std::uint64_t m)
{
    static std::map<std::uint64_t, std::shared_ptr<const EigenvalueSpec>> cache;
    auto& s = cache[m];
    if (!s) s = std::make_shared<const EigenvalueSpec>(enumerate_lattice_points(m));
    return s;
}

struct TimedBatch {
    TrialBatch batch;
    double seconds = 0.0;
};

// Monte Carlo runs shared between criteria (the mean, variance and
// universality checks read the same gaussian batches).
const TimedBatch& batch_for(std::uint64_t m, Ensemble ens)
{
    static std::map<std::tuple<std::uint64_t, Ensemble>, TimedBatch> cache;
    const auto key = std::make_tuple(m, ens);
    auto it = cache.find(key);
    if (it == cache.end()) {
        const auto t0 = Clock::now();
        TimedBatch tb;
        tb.batch = run_mc(spec_for(m), circle(), ens, kMcTrials, kSeed, {}, default_workers());
        tb.seconds = seconds_since(t0);
        it = cache.emplace(key, std::move(tb)).first;
    }
    return it->second;
}

struct TimedScan {
    std::vector<ScanRow> rows;
    double seconds = 0.0;
};

const TimedScan& scan()
{
    static std::unique_ptr<TimedScan> cache;
    if (!cache) {
        const auto t0 = Clock::now();
        cache = std::make_unique<TimedScan>();
        cache->rows = concentration_scan(kScanM, circle(), Ensemble::gaussian, kScanEps, kMcTrials, kSeed, {},
                                         default_workers());
        cache->seconds = seconds_since(t0);
    }
    return *cache;
}

CriterionResult lattice_exhaustive()
{
    const auto t0 = Clock::now();
    CriterionResult r{1, "lattice-exhaustive", true, "", 0.0};
    std::size_t bad = 0;
    std::uint64_t first_bad = 0;
    for (std::uint64_t m = 1; m <= 10000; ++m) {
        const auto spec = enumerate_lattice_points(m);
        std::int64_t rad = 0;
        while ((rad + 1) * (rad + 1) <= static_cast<std::int64_t>(m)) ++rad;
        std::uint64_t scan_count = 0;
        for (std::int64_t x = -rad; x <= rad; ++x) {
            for (std::int64_t y = -rad; y <= rad; ++y) {
                if (static_cast<std::uint64_t>(x * x + y * y) == m) ++scan_count;
            }
        }
        bool ok = multiplicity_formula(factorize(m)) == scan_count && spec.N() == scan_count;
        if (ok && scan_count > 0) {
            const auto sm = spectral_matrix(spec);
            const auto diag = static_cast<std::int64_t>(scan_count * m / 2);
            ok = sm[0][0] == diag && sm[1][1] == diag && sm[0][1] == 0 && sm[1][0] == 0;
        }
        if (!ok && bad++ == 0) first_bad = m;
    }
    r.seconds = seconds_since(t0);
    r.passed = bad == 0 && r.seconds < 10.0;
    r.detail = bad == 0 ? fmt::format("m <= 10000 all exact, {:.2f}s (limit 10s)", r.seconds)
                        : fmt::format("{} mismatches, first at m = {}", bad, first_bad);
    return r;
}

CriterionResult angular_measure()
{
    const auto t0 = Clock::now();
    CriterionResult r{2, "angular-measure", true, "", 0.0};
    const double t1 = angular_fourier(*spec_for(1), 4);
    const double t2 = angular_fourier(*spec_for(2), 4);
    const double t5 = angular_fourier(*spec_for(5), 4);
    bool ok = std::abs(t1 - 1.0) <= 1e-12 && std::abs(t2 + 1.0) <= 1e-12 && std::abs(t5 + 0.28) <= 1e-12;
    std::size_t odd_nonzero = 0;
    for (std::uint64_t m : {1, 2, 5, 25, 65, 325, 1105, 32045}) {
        for (int k = -7; k <= 7; k += 2) {
            if (angular_fourier(*spec_for(m), k) != 0.0) ++odd_nonzero;
        }
    }
    r.seconds = seconds_since(t0);
    r.passed = ok && odd_nonzero == 0 && r.seconds < 1.0;
    r.detail = fmt::format("tau(4): m=1 {:.17g}, m=2 {:.17g}, m=5 {:.17g}; odd nonzero {}", t1, t2, t5,
                           odd_nonzero);
    return r;
}

CriterionResult closed_form_zeros()
{
    const auto t0 = Clock::now();
    CriterionResult r{3, "closed-form-zeros", true, "", 0.0};
    const auto spec = spec_for(1);
    std::vector<double> a(spec->half_points.size(), 0.0), b(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (spec->half_points[i] == LatticePoint{1, 0}) a[i] = 1.0;
    }
    const auto wave = make_wave(spec, a, b);
    const auto hit = count_zeros(RestrictedWave(wave, make_circle({0.25, 0.5})));
    const auto miss = count_zeros(RestrictedWave(wave, make_circle({0.5, 0.5})));
    bool roots_ok = hit.count == 2 && hit.roots.size() == 2 && std::abs(hit.roots[0] - 0.25) <= 1e-10 &&
                    std::abs(hit.roots[1] - 0.75) <= 1e-10;
    r.seconds = seconds_since(t0);
    r.passed = roots_ok && miss.count == 0 && r.seconds < 1.0;
    r.detail = fmt::format("center (1/4,1/2): count {}", hit.count);
    for (double x : hit.roots) r.detail += fmt::format(" {:.15f}", x);
    r.detail += fmt::format("; center (1/2,1/2): count {}", miss.count);
    return r;
}

CriterionResult mean_for(std::uint64_t m, int id, const std::string& name)
{
    const auto& tb = batch_for(m, Ensemble::gaussian);
    const auto rep = summarize(tb.batch, {});
    std::size_t suspect_trials = 0;
    for (auto s : tb.batch.suspects) suspect_trials += s > 0 ? 1 : 0;
    const double rate = static_cast<double>(suspect_trials) / static_cast<double>(tb.batch.trials);
    const double tol = 3.0 * rep.mean_se + 0.005 * rep.theory_mean;
    CriterionResult r{id, name, true, "", tb.seconds};
    r.passed = std::abs(rep.mean - rep.theory_mean) <= tol && rate < 1e-3;
    const double tangent = static_cast<double>(tb.batch.near_tangency_trials) / static_cast<double>(tb.batch.trials);
    r.detail = fmt::format("m={} mean {:.4f} vs sqrt(2m) {:.4f} (tol {:.4f}), suspect rate {:.5f}, near-tangency "
                           "rate {:.5f}",
                           m, rep.mean, rep.theory_mean, tol, rate, tangent);
    return r;
}

CriterionResult expected_count()
{
    CriterionResult r{4, "expected-count", true, "", 0.0};
    for (std::uint64_t m : {25, 65, 325}) {
        const auto one = mean_for(m, 4, "");
        r.passed = r.passed && one.passed;
        r.seconds += one.seconds;
        r.detail += (r.detail.empty() ? "" : "; ") + one.detail;
    }
    r.passed = r.passed && r.seconds < 300.0;
    return r;
}

CriterionResult variance_scale()
{
    CriterionResult r{5, "variance-scale", true, "", 0.0};
    for (std::uint64_t m : {25, 65, 325}) {
        const auto& tb = batch_for(m, Ensemble::gaussian);
        const auto rep = summarize(tb.batch, {});
        r.passed = r.passed && rep.variance_ratio > 0.0 && rep.variance_ratio < 20.0;
        r.detail += fmt::format("{}m={} Var {:.4f} (se {:.4f}), Var/(m/N) {:.4f}", r.detail.empty() ? "" : "; ",
                                m, rep.variance, rep.variance_se, rep.variance_ratio);
    }
    return r;
}

CriterionResult variance_term()
{
    const auto t0 = Clock::now();
    CriterionResult r{6, "variance-term", true, "", 0.0};
    for (std::uint64_t m : {25, 65, 325}) {
        const auto v = variance_leading_term(*spec_for(m), circle(), 64);
        r.passed = r.passed && std::abs(v.factorized) <= 1e-6 * v.scale && std::abs(v.tensor) <= 1e-6 * v.scale &&
                   std::abs(v.factorized - v.tensor) <= 1e-8 * v.scale;
        r.detail += fmt::format("m={} {:.3e}/{:.3e}; ", m, v.factorized, v.tensor);
    }
    // A non-circular curve, where the term does not cancel.
    const auto v = variance_leading_term(*spec_for(25), make_analytic_oval(2.0, 1.0, {0.5, 0.5}), 64);
    const double rel = std::abs(v.factorized - v.tensor) / std::max(std::abs(v.factorized), v.scale);
    r.passed = r.passed && rel <= 1e-8;
    r.detail += fmt::format("oval m=25 {:.10f} (rel gap {:.1e})", v.factorized, rel);
    r.seconds = seconds_since(t0);
    r.passed = r.passed && r.seconds < 10.0;
    return r;
}

CriterionResult repulsion()
{
    const auto t0 = Clock::now();
    CriterionResult r{7, "repulsion", true, "", 0.0};
    const auto g = repulsion_probe(spec_for(325), circle(), 0.3, Ensemble::gaussian, 0.1, 0.1, 1000000, kSeed);
    const auto rd = repulsion_probe(spec_for(325), circle(), 0.3, Ensemble::rademacher, 0.1, 0.1, 1000000, kSeed);
    r.seconds = seconds_since(t0);
    r.passed = g.ratio >= 0.81 && g.ratio <= 0.99 && rd.ratio <= 2.0 && r.seconds < 120.0;
    r.detail = fmt::format("gaussian ratio {:.4f} (se {:.4f}), rademacher ratio {:.4f} (se {:.4f})", g.ratio,
                           g.ratio_se, rd.ratio, rd.ratio_se);
    return r;
}

CriterionResult markov_domination()
{
    const auto& s = scan();
    CriterionResult r{8, "markov-domination", true, "", s.seconds};
    std::size_t violations = 0;
    for (const auto& row : s.rows) {
        if (row.tail.probability > row.tail.markov) ++violations;
        r.detail += fmt::format("N={} tail {:.5f} <= {:.4f}; ", row.N, row.tail.probability, row.tail.markov);
    }
    r.passed = violations == 0;
    r.detail += fmt::format("violations {}", violations);
    return r;
}

CriterionResult concentration_trend()
{
    const auto& s = scan();
    CriterionResult r{9, "concentration-trend", true, "", s.seconds};
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        const auto& t = s.rows[i].tail;
        r.detail += fmt::format("N={} {:.5f}+-{:.5f}; ", s.rows[i].N, t.probability, t.se);
        if (i == 0) continue;
        const auto& p = s.rows[i - 1].tail;
        if (t.probability - p.probability > 2.0 * std::hypot(t.se, p.se)) r.passed = false;
    }
    r.passed = r.passed && s.seconds < 900.0;
    r.detail += fmt::format("{:.1f}s (limit 900s)", s.seconds);
    return r;
}

CriterionResult universality()
{
    const auto& g = batch_for(325, Ensemble::gaussian);
    const auto& rd = batch_for(325, Ensemble::rademacher);
    const auto eg = summarize(g.batch, {});
    const auto er = summarize(rd.batch, {});
    const double gap = std::abs(eg.mean - er.mean);
    const double tol = 3.0 * std::hypot(eg.mean_se, er.mean_se) + 0.02 * eg.lambda;
    CriterionResult r{10, "universality", true, "", g.seconds + rd.seconds};
    r.passed = gap <= tol && r.seconds < 600.0;
    r.detail = fmt::format("means {:.4f} / {:.4f}, gap {:.4f} (tol {:.4f}); variances {:.4f} / {:.4f}", eg.mean,
                           er.mean, gap, tol, eg.variance, er.variance);
    return r;
}

CriterionResult determinism()
{
    const auto t0 = Clock::now();
    CriterionResult r{11, "determinism", true, "", 0.0};
    std::string reference;
    for (std::size_t workers : {1, 4, 8}) {
        const auto batch = run_mc(spec_for(25), circle(), Ensemble::gaussian, kMcTrials, kSeed, {}, workers);
        std::ostringstream out;
        write_trial_csv(batch, out);
        if (workers == 1) {
            reference = out.str();
        } else if (out.str() != reference) {
            r.passed = false;
            r.detail += fmt::format("workers={} differs; ", workers);
        }
    }
    r.seconds = seconds_since(t0);
    r.passed = r.passed && r.seconds < 60.0;
    r.detail += fmt::format("{} CSV bytes, workers 1/4/8", reference.size());
    return r;
}

CriterionResult large_sieve()
{
    const auto t0 = Clock::now();
    CriterionResult r{12, "large-sieve", true, "", 0.0};
    const auto s = large_sieve_scan(spec_for(325), circle(), Ensemble::gaussian, 1000, kSeed, 1e-3);
    const double q = s.max_ratio_d2 / s.max_ratio_d1;
    r.seconds = seconds_since(t0);
    r.passed = std::isfinite(s.max_ratio_d1) && std::isfinite(s.max_ratio_d2) && q >= 0.01 && q <= 100.0;
    r.detail = fmt::format("max d1 {:.4f}, max d2 {:.4f}, d2/d1 {:.4f}; means {:.4f} / {:.4f}", s.max_ratio_d1,
                           s.max_ratio_d2, q, s.mean_ratio_d1, s.mean_ratio_d2);
    return r;
}

CriterionResult perturbation()
{
    const auto t0 = Clock::now();
    CriterionResult r{13, "perturbation", true, "", 0.0};
    const auto p = perturbation_persistence(spec_for(325), circle(), Ensemble::gaussian, 100, kSeed, 64);
    r.seconds = seconds_since(t0);
    r.passed = p.failures == 0 && p.roots_checked > 0;
    r.detail = fmt::format("{} roots in {} intervals, failures {}, max shift {:.3e} (allowed {:.3e})",
                           p.roots_checked, p.intervals_checked, p.failures, p.max_displacement,
                           p.allowed_displacement);
    return r;
}

std::function<std::vector<CriterionResult>()> single(CriterionResult (*fn)())
{
    return [fn] { return std::vector<CriterionResult>{fn()}; };
}

std::vector<Preset> build_presets()
{
    std::vector<Preset> p = {
        {"lattice-exhaustive", "multiplicity formula and spectral matrix for m <= 1e4", single(lattice_exhaustive)},
        {"angular-measure", "tau_m(4) closed forms and odd coefficients", single(angular_measure)},
        {"closed-form-zeros", "m = 1 cosine on two circles", single(closed_form_zeros)},
        {"expected-count", "mean nodal count for m = 25, 65, 325", single(expected_count)},
        {"variance-scale", "Var / (m/N) in (0, 20)", single(variance_scale)},
        {"variance-term", "leading variance term on the circle", single(variance_term)},
        {"repulsion", "P(|f| <= a, |f'| <= b lambda) / (a b)", single(repulsion)},
        {"markov-domination", "scan tails below 1/(N eps^2)", single(markov_domination)},
        {"concentration-trend", "scan tails non-increasing in N", single(concentration_trend)},
        {"universality", "gaussian vs rademacher mean at m = 325", single(universality)},
        {"determinism", "CSV identical for 1, 4, 8 workers", single(determinism)},
        {"large-sieve", "derivative sums at separation 1e-3", single(large_sieve)},
        {"perturbation", "root persistence on stable intervals", single(perturbation)},
    };
    for (std::uint64_t m : {25, 65, 325}) {
        const std::string name = fmt::format("mean-m{}", m);
        p.push_back({name, fmt::format("mean nodal count for m = {}", m),
                     [m, name] { return std::vector<CriterionResult>{mean_for(m, 4, name)}; }});
    }
    std::vector<std::function<std::vector<CriterionResult>()>> all;
    for (std::size_t i = 0; i < 13; ++i) all.push_back(p[i].run);
    p.push_back({"all", "every criterion", [all] {
                     std::vector<CriterionResult> out;
                     for (const auto& f : all) {
                         auto v = f();
                         out.insert(out.end(), v.begin(), v.end());
                     }
                     return out;
                 }});
    return p;
}

}  // namespace

const std::vector<Preset>& presets()
{
    static const std::vector<Preset> p = build_presets();
    return p;
}

const Preset* find_preset(std::string_view name)
{
    for (const auto& p : presets()) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

std::string format_result(const CriterionResult& r)
{
    return fmt::format("[{}] C{:02d} {:<20} {:8.2f}s  {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.seconds,
                       r.detail);
}

}  // namespace torwave::acceptance
