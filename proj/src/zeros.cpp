#include "torwave/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "torwave/error.hpp"

namespace torwave {
namespace {

constexpr int kRefineFactor = 8;
constexpr double kResolution = 1e-13;

int sign(double v) { return (v > 0.0) - (v < 0.0); }

double coefficient_l1(const WaveSample& s)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < s.a.size(); ++i) sum += std::hypot(s.a[i], s.b[i]);
    return s.normalization() * sum;
}

// Bisection on a sign-change bracket [lo, hi] of f^{(order)}.
double bisect(const RestrictedWave& rw, int order, double lo, double hi, double flo, double tol)
{
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = rw.eval(mid, order);
        if (fm == 0.0) return mid;
        if (sign(fm) == sign(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double wrap_unit(double t) { return t >= 1.0 ? t - 1.0 : t; }

void validate(const GridConfig& cfg)
{
    if (cfg.points_per_lambda < 8) {
        throw InvalidArgument(fmt::format("grid too coarse: points_per_lambda = {} (need >= 8)", cfg.points_per_lambda));
    }
    if (!(cfg.bisection_tol > 0.0) || !(cfg.tangency_threshold > 0.0)) {
        throw InvalidArgument("grid tolerances must be positive");
    }
}

}  // namespace

std::size_t grid_points(const GridConfig& cfg, double lambda)
{
    return static_cast<std::size_t>(std::ceil(static_cast<double>(cfg.points_per_lambda) * lambda));
}

double global_derivative_bound(const WaveSample& sample)
{
    return 2.0 * std::numbers::pi * sample.spec->lambda * coefficient_l1(sample);
}

double second_derivative_bound(const RestrictedWave& rw)
{
    const double lam = rw.lambda();
    return coefficient_l1(rw.sample()) * (lam * lam + lam * rw.curve().curvature_max());
}

ZeroCountResult count_zeros(const RestrictedWave& rw, const GridConfig& cfg)
{
    validate(cfg);
    const WaveSample& sample = rw.sample();
    const bool all_zero = std::all_of(sample.a.begin(), sample.a.end(), [](double v) { return v == 0.0; }) &&
                          std::all_of(sample.b.begin(), sample.b.end(), [](double v) { return v == 0.0; });
    if (all_zero) throw InvalidArgument("count_zeros: the wave is identically zero; nodal count undefined");

    const std::size_t n = grid_points(cfg, rw.lambda());
    std::shared_ptr<const PhaseTable> table = rw.table();
    if (!table || table->grid_size() != n) table = PhaseTable::build(rw.spec(), rw.curve(), n);

    std::vector<double> f(n), df(n);
    rw.eval_table(*table, f, df);

    const double h = 1.0 / static_cast<double>(n);
    const double d2_bound = second_derivative_bound(rw);
    const double lip = global_derivative_bound(sample);
    // Below this |f| the sign of f is not trustworthy in double precision.
    const double floor = kResolution * coefficient_l1(sample) * (1.0 + rw.lambda());

    ZeroCountResult out;
    std::size_t certified = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = (j + 1 == n) ? 0 : j + 1;
        const double t0 = table->t(j);
        const double t1 = t0 + h;
        const double f0 = f[j], f1 = f[k];

        if (f0 == 0.0) out.roots.push_back(t0);

        if (sign(f0) * sign(f1) < 0) {
            out.roots.push_back(wrap_unit(bisect(rw, 0, t0, t1, f0, cfg.bisection_tol)));
            if (cfg.certified_mode && std::min(std::abs(df[j]), std::abs(df[k])) > d2_bound * h) ++certified;
            continue;
        }
        if (cfg.certified_mode && std::min(std::abs(f0), std::abs(f1)) > 0.5 * lip * h) ++certified;

        // Candidate near-tangency: f' changes sign inside a cell where f does not.
        if (sign(df[j]) * sign(df[k]) >= 0 || f0 == 0.0 || f1 == 0.0) continue;
        const double slope = std::max(std::abs(df[j]), std::abs(df[k])) + h * d2_bound;
        if (std::min(std::abs(f0), std::abs(f1)) - h * slope > cfg.tangency_threshold) continue;

        const double hs = h / kRefineFactor;
        double prev_t = t0, prev_f = f0;
        std::size_t found = 0;
        for (int s = 1; s <= kRefineFactor; ++s) {
            const double ts = (s == kRefineFactor) ? t1 : t0 + s * hs;
            const double fs = (s == kRefineFactor) ? f1 : rw.eval(ts, 0);
            if (s < kRefineFactor && fs == 0.0) {
                out.roots.push_back(ts);
                ++found;
            } else if (sign(prev_f) * sign(fs) < 0) {
                out.roots.push_back(wrap_unit(bisect(rw, 0, prev_t, ts, prev_f, cfg.bisection_tol)));
                ++found;
            }
            prev_t = ts;
            prev_f = fs;
        }
        if (found > 0) continue;

        // Decide the cell by the sign of f at the located extremum.
        const double text = bisect(rw, 1, t0, t1, df[j], cfg.bisection_tol);
        const double fe = rw.eval(text, 0);
        if (std::abs(fe) < cfg.tangency_threshold) ++out.near_tangencies;
        if (std::abs(fe) <= floor) {
            ++out.suspects;
        } else if (sign(fe) != sign(f0)) {
            out.roots.push_back(wrap_unit(bisect(rw, 0, t0, text, f0, cfg.bisection_tol)));
            out.roots.push_back(wrap_unit(bisect(rw, 0, text, t1, fe, cfg.bisection_tol)));
        }
    }

    std::sort(out.roots.begin(), out.roots.end());
    out.roots.erase(std::unique(out.roots.begin(), out.roots.end()), out.roots.end());
    out.count = out.roots.size();
    out.certified_fraction = cfg.certified_mode ? static_cast<double>(certified) / static_cast<double>(n) : 0.0;
    return out;
}

StabilityParams default_stability_params(std::size_t N)
{
    if (N < 2) throw InvalidArgument("default_stability_params: need N >= 2");
    StabilityParams p;
    const double n = static_cast<double>(N);
    p.R = 4.0 * std::log(n);
    p.delta = std::min(std::pow(n, -1.0 / 3.0), 1.0 / (8.0 * p.R));
    p.alpha = std::pow(p.delta, 1.5);
    p.beta = std::pow(p.delta, 0.75);
    p.tau = p.delta * p.delta;
    p.gamma_excl = std::pow(p.delta, 1.25);
    return p;
}

IntervalClassification classify_intervals(const RestrictedWave& rw, double alpha, double beta, double R,
                                          double delta, std::size_t check_density)
{
    if (!(alpha >= 0.0) || !(beta >= 0.0)) throw InvalidArgument("classify_intervals: alpha, beta must be >= 0");
    if (!(R > 0.0) || !(delta > 0.0)) throw InvalidArgument("classify_intervals: R and delta must be positive");
    if (!(delta * R < 0.25)) {
        throw InvalidArgument(fmt::format("classify_intervals: delta * R = {} violates delta * R < 1/4", delta * R));
    }
    if (check_density < 16) throw InvalidArgument("classify_intervals: check_density must be >= 16");

    const double lam = rw.lambda();
    const double len = R / lam;
    const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(lam / R - 1e-12)));
    const std::size_t samples = 3 * check_density;

    IntervalClassification out;
    out.R = R;
    out.delta = delta;
    out.alpha = alpha;
    out.beta = beta;
    for (std::size_t i = 0; i < count; ++i) {
        ClassifiedInterval iv;
        iv.start = static_cast<double>(i) * len;
        iv.end = std::min(1.0, static_cast<double>(i + 1) * len);
        const double mid = 0.5 * (iv.start + iv.end);
        const double width = 3.0 * (iv.end - iv.start);
        const double left = mid - 0.5 * width;
        for (std::size_t s = 0; s <= samples; ++s) {
            const double t = left + width * static_cast<double>(s) / static_cast<double>(samples);
            const WaveJet j = rw.jet(t);
            if (std::abs(j.f) <= alpha && std::abs(j.df) <= beta * lam) {
                iv.stable = false;
                break;
            }
        }
        if (!iv.stable) ++out.unstable_count;
        out.intervals.push_back(iv);
    }
    out.exceptional = static_cast<double>(out.unstable_count) >= delta * lam;
    return out;
}

JensenDiagnostic jensen_diagnostic(const RestrictedWave& rw, double t1, double t2, double c_growth,
                                   const GridConfig& cfg)
{
    if (!(t1 >= 0.0 && t1 < t2 && t2 <= 1.0)) throw InvalidArgument("jensen_diagnostic: need 0 <= t1 < t2 <= 1");
    if (!(c_growth > 0.0)) throw InvalidArgument("jensen_diagnostic: c_growth must be positive");
    const double lam = rw.lambda();
    const double len = t2 - t1;
    const double min_len = std::log(static_cast<double>(rw.spec().N())) / lam;
    if (len < min_len) {
        throw InvalidArgument(fmt::format("jensen_diagnostic: interval length {} below log(N)/lambda = {}", len, min_len));
    }

    JensenDiagnostic d;
    d.t1 = t1;
    d.t2 = t2;
    const std::size_t pts = std::max<std::size_t>(1000, grid_points(cfg, lam * len));
    for (std::size_t s = 0; s <= pts; ++s) {
        const WaveJet j = rw.jet(t1 + len * static_cast<double>(s) / static_cast<double>(pts));
        d.max_abs_f = std::max(d.max_abs_f, std::abs(j.f));
        d.max_abs_df = std::max(d.max_abs_df, std::abs(j.df));
    }
    const auto zeros = count_zeros(rw, cfg);
    d.roots = static_cast<std::size_t>(std::count_if(zeros.roots.begin(), zeros.roots.end(),
                                                     [&](double r) { return r >= t1 && r <= t2; }));
    d.bound = 2.0 * c_growth * len * lam;
    const double floor_value = std::exp(-c_growth * lam * len / 2.0);
    d.premise = d.max_abs_f >= floor_value || d.max_abs_df >= lam * floor_value;
    d.holds = !d.premise || static_cast<double>(d.roots) <= d.bound;
    return d;
}

double large_sieve_check(const RestrictedWave& rw, double separation, int d)
{
    if (!(separation > 0.0 && separation < 0.5)) throw InvalidArgument("large_sieve_check: separation must be in (0, 1/2)");
    if (d != 1 && d != 2) throw InvalidArgument("large_sieve_check: d must be 1 or 2");
    const double lam = rw.lambda();
    // t = 1 is the point t = 0 of the closed curve, so it is not repeated.
    double sum = 0.0;
    for (std::size_t i = 0; static_cast<double>(i) * separation < 1.0 - 1e-12; ++i) {
        const double v = rw.eval(static_cast<double>(i) * separation, d);
        sum += v * v;
    }
    return sum / (std::pow(lam, 2 * d) * (lam + 1.0 / separation));
}

}  // namespace torwave
