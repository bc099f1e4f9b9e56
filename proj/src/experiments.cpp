#include "torwave/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include <fmt/format.h>

#include "torwave/error.hpp"
#include "torwave/quadrature.hpp"
#include "torwave/rng.hpp"
#include "torwave/stats.hpp"

namespace torwave {
namespace {

constexpr std::uint64_t kPerturbSeedOffset = 0x7065727475726221ULL;

// Runs body(i) for i in [0, count) on `workers` threads. Each index is
// processed exactly once; the first exception by index order is rethrown.
template <class Body>
void parallel_for(std::size_t count, std::size_t workers, const Body& body)
{
    workers = std::max<std::size_t>(1, std::min(workers, count));
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::size_t err_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr err;
    constexpr std::size_t chunk = 16;

    auto worker = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= count) return;
            const std::size_t end = std::min(count, begin + chunk);
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(err_mutex);
                    if (i < err_index) {
                        err_index = i;
                        err = std::current_exception();
                    }
                }
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (err) {
        try {
            std::rethrow_exception(err);
        } catch (const std::exception& e) {
            throw TrialError(err_index, e.what());
        }
    }
}

double periodic_distance(double x, double y)
{
    const double d = std::abs(x - y);
    return std::min(d, 1.0 - d);
}

TailRow tail_row(std::span<const std::int64_t> z, double mean, double lambda, std::size_t N, double eps)
{
    TailRow row;
    row.eps = eps;
    const double threshold = eps * lambda;
    for (auto v : z) {
        if (std::abs(static_cast<double>(v) - mean) >= threshold) ++row.exceed;
    }
    row.probability = static_cast<double>(row.exceed) / static_cast<double>(z.size());
    row.se = stats::binomial_se(row.probability, z.size());
    const auto w = stats::wilson_interval(row.exceed, z.size());
    row.wilson_lo = w.lo;
    row.wilson_hi = w.hi;
    row.markov = 1.0 / (static_cast<double>(N) * eps * eps);
    return row;
}

}  // namespace

std::size_t default_workers()
{
    if (const char* env = std::getenv("TORWAVE_WORKERS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

TrialBatch run_mc(std::shared_ptr<const EigenvalueSpec> spec, const CurveDef& curve, Ensemble ensemble,
                  std::size_t trials, std::uint64_t master_seed, const GridConfig& cfg, std::size_t workers)
{
    if (trials < 1) throw InvalidArgument("run_mc: trials must be >= 1");
    if (!spec || spec->N() < 4) throw InvalidArgument("run_mc: need N >= 4");
    if (cfg.points_per_lambda < 8) throw InvalidArgument("run_mc: points_per_lambda must be >= 8");

    const auto table = PhaseTable::build(*spec, curve, grid_points(cfg, spec->lambda));
    TrialBatch batch;
    batch.spec = spec;
    batch.ensemble = ensemble;
    batch.master_seed = master_seed;
    batch.trials = trials;
    batch.z_values.assign(trials, 0);
    batch.suspects.assign(trials, 0);
    std::vector<char> flagged(trials, 0), tangent(trials, 0);
    const double envelope = 10.0 * spec->lambda;

    parallel_for(trials, workers, [&](std::size_t i) {
        const RestrictedWave rw(sample_coefficients(spec, ensemble, master_seed, i), curve, table);
        const ZeroCountResult r = count_zeros(rw, cfg);
        batch.z_values[i] = static_cast<std::int64_t>(r.count);
        batch.suspects[i] = static_cast<std::int64_t>(r.suspects);
        flagged[i] = static_cast<double>(r.count) > envelope;
        tangent[i] = r.near_tangencies > 0;
    });

    for (std::size_t i = 0; i < trials; ++i) {
        batch.suspects_total += static_cast<std::size_t>(batch.suspects[i]);
        batch.envelope_flags += static_cast<std::size_t>(flagged[i]);
        batch.near_tangency_trials += static_cast<std::size_t>(tangent[i]);
    }
    return batch;
}

ExperimentReport summarize_counts(const EigenvalueSpec& spec, std::span<const std::int64_t> z_values,
                                  std::size_t suspects_total, std::span<const double> eps_list)
{
    if (z_values.size() < 100) {
        throw InvalidArgument(fmt::format("summarize: need at least 100 trials, got {}", z_values.size()));
    }
    if (spec.N() == 0) throw InvalidArgument("summarize: N = 0");
    std::vector<double> z(z_values.begin(), z_values.end());
    const auto mom = stats::moments(z);

    ExperimentReport r;
    r.m = spec.m;
    r.N = spec.N();
    r.lambda = spec.lambda;
    r.trials = z.size();
    r.mean = mom.mean;
    r.variance = mom.variance;
    // Jackknife SE of the mean coincides with sd / sqrt(n).
    r.mean_se = std::sqrt(mom.variance / static_cast<double>(z.size()));
    r.variance_se = stats::jackknife_variance_se(z);
    r.theory_mean = std::sqrt(2.0 * static_cast<double>(spec.m));
    r.variance_scale = static_cast<double>(spec.m) / static_cast<double>(spec.N());
    r.variance_ratio = r.variance / r.variance_scale;
    r.suspects_total = suspects_total;
    for (double eps : eps_list) {
        if (!(eps > 0.0)) throw InvalidArgument("summarize: eps must be positive");
        r.tail_table.push_back(tail_row(z_values, r.mean, r.lambda, r.N, eps));
    }
    return r;
}

ExperimentReport summarize(const TrialBatch& batch, std::span<const double> eps_list)
{
    return summarize_counts(*batch.spec, batch.z_values, batch.suspects_total, eps_list);
}

VarianceTerm variance_leading_term(const EigenvalueSpec& spec, const CurveDef& curve, std::size_t quadrature_points)
{
    if (spec.N() == 0) throw InvalidArgument("variance_leading_term: N = 0");
    if (quadrature_points < 64) throw InvalidArgument("variance_leading_term: need at least 64 quadrature points");

    const auto rule = quad::gauss_legendre(quadrature_points);
    const std::size_t q = rule.size();
    const std::size_t n = spec.N();
    const double root_m = std::sqrt(static_cast<double>(spec.m));

    // u[mu * q + k] = <mu / |mu|, gamma'(t_k)>^2 with t_k mapped to [0, 1].
    std::vector<double> w(q), u(n * q);
    for (std::size_t k = 0; k < q; ++k) {
        const double t = 0.5 * (rule.nodes[k] + 1.0);
        w[k] = 0.5 * rule.weights[k];
        const Vec2 v = curve.jet(t).vel;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = spec.points[i];
            const double c = (static_cast<double>(p.mu1) * v.x + static_cast<double>(p.mu2) * v.y) / root_m;
            u[i * q + k] = c * c;
        }
    }

    const double weight = 4.0 / static_cast<double>(n);
    VarianceTerm out;
    out.scale = static_cast<double>(spec.m) / static_cast<double>(n);

    double fact = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double integral = 0.0;
        for (std::size_t k = 0; k < q; ++k) integral += w[k] * u[i * q + k];
        fact += weight * integral * integral;
    }
    out.factorized = out.scale * (fact - 1.0);

    double tensor = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
        for (std::size_t l = 0; l < q; ++l) {
            double inner = 0.0;
            for (std::size_t i = 0; i < n; ++i) inner += weight * u[i * q + k] * u[i * q + l];
            tensor += w[k] * w[l] * (inner - 1.0);
        }
    }
    out.tensor = out.scale * tensor;
    return out;
}

RepulsionResult repulsion_probe(std::shared_ptr<const EigenvalueSpec> spec, const CurveDef& curve, double t,
                                Ensemble ensemble, double alpha, double beta, std::size_t trials,
                                std::uint64_t master_seed)
{
    if (!spec || spec->N() < 4) throw InvalidArgument("repulsion_probe: need N >= 4");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("repulsion_probe: alpha and beta must be positive");
    if (trials < 10000) throw InvalidArgument("repulsion_probe: need at least 1e4 trials");
    const auto& pts = spec->half_points;
    const std::size_t h = pts.size();
    const CurveJet g = curve.jet(t);
    std::vector<double> c(h), s(h), k(h);
    for (std::size_t i = 0; i < h; ++i) {
        const double th = detail::phase(pts[i], g.pos);
        c[i] = std::cos(th);
        s[i] = std::sin(th);
        k[i] = detail::phase(pts[i], g.vel);
    }
    const double lam = spec->lambda;
    RepulsionResult r;
    r.trials = trials;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const WaveSample w = sample_coefficients(spec, ensemble, master_seed, trial);
        const double norm = w.normalization();
        const double f = norm * detail::tree_sum(0, h, [&](std::size_t i) { return w.a[i] * c[i] + w.b[i] * s[i]; });
        const double df =
            norm * detail::tree_sum(0, h, [&](std::size_t i) { return k[i] * (w.b[i] * c[i] - w.a[i] * s[i]); });
        if (std::abs(f) <= alpha && std::abs(df) <= beta * lam) ++r.hits;
    }
    r.p_hat = static_cast<double>(r.hits) / static_cast<double>(trials);
    r.ratio = r.p_hat / (alpha * beta);
    r.ratio_se = stats::binomial_se(r.p_hat, trials) / (alpha * beta);
    const double window = 1.0 / std::sqrt(static_cast<double>(spec->N()));
    r.below_window = alpha < window || beta < window;
    return r;
}

UniversalityReport universality_gap(std::shared_ptr<const EigenvalueSpec> spec, const CurveDef& curve,
                                    Ensemble first, Ensemble second, std::size_t trials,
                                    std::uint64_t master_seed, const GridConfig& cfg, std::size_t workers)
{
    if (trials < 10000) throw InvalidArgument("universality_gap: need at least 1e4 trials");
    const auto b1 = run_mc(spec, curve, first, trials, master_seed, cfg, workers);
    const auto b2 = (first == second) ? b1 : run_mc(spec, curve, second, trials, master_seed, cfg, workers);
    UniversalityReport r;
    r.first = summarize(b1, {});
    r.second = summarize(b2, {});
    r.mean_gap = std::abs(r.first.mean - r.second.mean);
    r.mean_gap_se = std::hypot(r.first.mean_se, r.second.mean_se);
    r.variance_gap = std::abs(r.first.variance - r.second.variance);
    r.variance_gap_se = std::hypot(r.first.variance_se, r.second.variance_se);
    r.scale = spec->lambda / std::sqrt(static_cast<double>(spec->N()));
    return r;
}

std::vector<ScanRow> concentration_scan(std::span<const std::uint64_t> m_list, const CurveDef& curve,
                                        Ensemble ensemble, double eps, std::size_t trials,
                                        std::uint64_t master_seed, const GridConfig& cfg, std::size_t workers)
{
    if (!(eps > 0.0)) throw InvalidArgument("concentration_scan: eps must be positive");
    std::vector<std::shared_ptr<const EigenvalueSpec>> specs;
    for (auto m : m_list) {
        auto spec = std::make_shared<const EigenvalueSpec>(enumerate_lattice_points(m));
        if (spec->N() < 8) {
            throw InvalidArgument(fmt::format("concentration_scan: m = {} has N = {} (need N >= 8)", m, spec->N()));
        }
        specs.push_back(std::move(spec));
    }
    std::vector<ScanRow> rows;
    for (const auto& spec : specs) {
        const auto batch = run_mc(spec, curve, ensemble, trials, master_seed, cfg, workers);
        std::vector<double> z(batch.z_values.begin(), batch.z_values.end());
        ScanRow row;
        row.m = spec->m;
        row.N = spec->N();
        row.lambda = spec->lambda;
        row.mean = trials >= 2 ? stats::moments(z).mean : z.front();
        row.tail = tail_row(batch.z_values, row.mean, spec->lambda, spec->N(), eps);
        row.eps_outside_window = eps * std::log(static_cast<double>(spec->N())) > 1.0;
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) { return a.N < b.N; });
    return rows;
}

SieveScan large_sieve_scan(std::shared_ptr<const EigenvalueSpec> spec, const CurveDef& curve, Ensemble ensemble,
                           std::size_t samples, std::uint64_t master_seed, double separation)
{
    if (samples < 1) throw InvalidArgument("large_sieve_scan: samples must be >= 1");
    SieveScan s;
    s.samples = samples;
    s.separation = separation;
    for (std::size_t i = 0; i < samples; ++i) {
        const RestrictedWave rw(sample_coefficients(spec, ensemble, master_seed, i), curve);
        const double r1 = large_sieve_check(rw, separation, 1);
        const double r2 = large_sieve_check(rw, separation, 2);
        s.max_ratio_d1 = std::max(s.max_ratio_d1, r1);
        s.max_ratio_d2 = std::max(s.max_ratio_d2, r2);
        s.mean_ratio_d1 += r1;
        s.mean_ratio_d2 += r2;
    }
    s.mean_ratio_d1 /= static_cast<double>(samples);
    s.mean_ratio_d2 /= static_cast<double>(samples);
    return s;
}

PerturbationReport perturbation_persistence(std::shared_ptr<const EigenvalueSpec> spec, const CurveDef& curve,
                                            Ensemble ensemble, std::size_t samples, std::uint64_t master_seed,
                                            std::size_t check_density, const GridConfig& cfg)
{
    if (!spec || spec->N() < 4) throw InvalidArgument("perturbation_persistence: need N >= 4");
    PerturbationReport rep;
    rep.params = default_stability_params(spec->N());
    rep.samples = samples;
    const auto& p = rep.params;
    const double lam = spec->lambda;
    rep.allowed_displacement = p.alpha / (p.beta * lam);
    const auto table = PhaseTable::build(*spec, curve, grid_points(cfg, lam));

    for (std::size_t i = 0; i < samples; ++i) {
        const WaveSample fs = sample_coefficients(spec, ensemble, master_seed, i);
        const RestrictedWave f(fs, curve, table);

        // Perturbation direction is gaussian, scaled to norm tau * u with u in (0, 1].
        WaveSample gs = sample_coefficients(spec, Ensemble::gaussian, master_seed + kPerturbSeedOffset, i);
        double g_norm = 0.0;
        for (std::size_t k = 0; k < gs.a.size(); ++k) g_norm += gs.a[k] * gs.a[k] + gs.b[k] * gs.b[k];
        g_norm = std::sqrt(g_norm);
        const double u = rng::to_open_unit(rng::TrialStream(master_seed, kPerturbSeedOffset, i).word(0));
        const double scale = p.tau * u / g_norm;
        for (auto& v : gs.a) v *= scale;
        for (auto& v : gs.b) v *= scale;
        const RestrictedWave g(gs, curve);

        std::vector<double> ha(fs.a.size()), hb(fs.b.size());
        for (std::size_t k = 0; k < ha.size(); ++k) {
            ha[k] = fs.a[k] + gs.a[k];
            hb[k] = fs.b[k] + gs.b[k];
        }
        const RestrictedWave h(make_wave(spec, std::move(ha), std::move(hb)), curve, table);

        const auto cls = classify_intervals(f, p.alpha, p.beta, p.R, p.delta, check_density);
        if (cls.exceptional) ++rep.exceptional_samples;
        const auto roots_f = count_zeros(f, cfg).roots;
        const auto roots_h = count_zeros(h, cfg).roots;

        for (const auto& iv : cls.intervals) {
            if (!iv.stable) continue;
            std::vector<double> inside;
            for (double r : roots_f) {
                if (r >= iv.start && r < iv.end) inside.push_back(r);
            }
            if (inside.empty()) continue;

            const double mid = 0.5 * (iv.start + iv.end);
            const double width = 3.0 * (iv.end - iv.start);
            const std::size_t pts = 3 * check_density;
            double g_max = 0.0;
            for (std::size_t s = 0; s <= pts; ++s) {
                const double t = mid - 0.5 * width + width * static_cast<double>(s) / static_cast<double>(pts);
                g_max = std::max(g_max, std::abs(g.eval(t, 0)));
            }
            if (!(g_max < p.alpha)) continue;
            ++rep.intervals_checked;

            std::vector<std::size_t> matched;
            for (double r : inside) {
                ++rep.roots_checked;
                double best = INFINITY;
                std::size_t best_idx = roots_h.size();
                for (std::size_t k = 0; k < roots_h.size(); ++k) {
                    const double d = periodic_distance(r, roots_h[k]);
                    if (d < best) {
                        best = d;
                        best_idx = k;
                    }
                }
                rep.max_displacement = std::max(rep.max_displacement, best);
                const bool reused = std::find(matched.begin(), matched.end(), best_idx) != matched.end();
                if (best > rep.allowed_displacement || reused) ++rep.failures;
                matched.push_back(best_idx);
            }
        }
    }
    return rep;
}

}  // namespace torwave
