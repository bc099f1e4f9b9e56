#include "torwave/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "torwave/error.hpp"
#include "torwave/rng.hpp"

namespace torwave {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t stream_tag(Ensemble e)
{
    switch (e) {
    case Ensemble::gaussian: return 0x6761757373ULL;    // "gauss"
    case Ensemble::rademacher: return 0x726164656dULL;  // "radem"
    case Ensemble::uniform: return 0x756e69666fULL;     // "unifo"
    }
    return 0;
}

void require_wave_spec(const std::shared_ptr<const EigenvalueSpec>& spec, const char* op)
{
    if (!spec) throw InvalidArgument(std::string(op) + ": null spec");
    if (spec->N() < 4) {
        throw InvalidArgument(fmt::format("{}: m = {} has N = {} lattice points (need N >= 4)", op, spec->m, spec->N()));
    }
}

// Per-mu trigonometric inputs at one curve point.
struct Terms {
    std::vector<double> c, s, k1, k2;

    void fill(const EigenvalueSpec& spec, const CurveJet& g, bool second)
    {
        const std::size_t h = spec.half_points.size();
        c.resize(h);
        s.resize(h);
        k1.resize(h);
        k2.resize(h);
        for (std::size_t i = 0; i < h; ++i) {
            const auto& mu = spec.half_points[i];
            const double th = detail::phase(mu, g.pos);
            c[i] = std::cos(th);
            s[i] = std::sin(th);
            k1[i] = detail::phase(mu, g.vel);
            k2[i] = second ? detail::phase(mu, g.acc) : 0.0;
        }
    }
};

Terms& scratch()
{
    thread_local Terms t;
    return t;
}

}  // namespace

Ensemble parse_ensemble(std::string_view name)
{
    if (name == "gaussian") return Ensemble::gaussian;
    if (name == "rademacher") return Ensemble::rademacher;
    if (name == "uniform") return Ensemble::uniform;
    throw InvalidArgument(fmt::format("unknown ensemble '{}' (expected gaussian, rademacher or uniform)", name));
}

std::string_view ensemble_name(Ensemble e)
{
    switch (e) {
    case Ensemble::gaussian: return "gaussian";
    case Ensemble::rademacher: return "rademacher";
    case Ensemble::uniform: return "uniform";
    }
    return "?";
}

WaveSample sample_coefficients(std::shared_ptr<const EigenvalueSpec> spec, Ensemble ensemble,
                               std::uint64_t master_seed, std::uint64_t trial)
{
    require_wave_spec(spec, "sample_coefficients");
    const std::size_t h = spec->half_points.size();
    const rng::TrialStream stream(master_seed, stream_tag(ensemble), trial);

    // Coefficient k uses word k of the trial's stream: a_j is k = 2j, b_j is
    // k = 2j + 1. Gaussians pair words (0,1) and (2,3) of a block by Box-Muller.
    std::vector<double> values(2 * h);
    for (std::size_t blk = 0; 4 * blk < values.size(); ++blk) {
        const auto w = stream.block(blk);
        for (std::size_t lane = 0; lane < 4 && 4 * blk + lane < values.size(); ++lane) {
            double v = 0.0;
            switch (ensemble) {
            case Ensemble::gaussian: {
                const std::size_t base = lane & ~std::size_t{1};
                const double r = std::sqrt(-2.0 * std::log(rng::to_open_unit(w[base])));
                const double ang = kTwoPi * rng::to_open_unit(w[base + 1]);
                v = (lane % 2 == 0) ? r * std::cos(ang) : r * std::sin(ang);
                break;
            }
            case Ensemble::rademacher:
                v = (w[lane] >> 63) ? 1.0 : -1.0;
                break;
            case Ensemble::uniform:
                v = std::sqrt(3.0) * (2.0 * rng::to_open_unit(w[lane]) - 1.0);
                break;
            }
            values[4 * blk + lane] = v;
        }
    }

    WaveSample out;
    out.spec = std::move(spec);
    out.a.resize(h);
    out.b.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
        out.a[j] = values[2 * j];
        out.b[j] = values[2 * j + 1];
    }
    out.ensemble = ensemble;
    out.seed_path = {master_seed, trial};
    return out;
}

WaveSample make_wave(std::shared_ptr<const EigenvalueSpec> spec, std::vector<double> a, std::vector<double> b)
{
    require_wave_spec(spec, "make_wave");
    if (a.size() != spec->half_points.size() || b.size() != spec->half_points.size()) {
        throw InvalidArgument(fmt::format("make_wave: coefficient arrays must have N/2 = {} entries",
                                          spec->half_points.size()));
    }
    WaveSample out;
    out.spec = std::move(spec);
    out.a = std::move(a);
    out.b = std::move(b);
    return out;
}

double eval_torus(const WaveSample& sample, Vec2 x)
{
    const auto& pts = sample.spec->half_points;
    Terms& t = scratch();
    t.c.resize(pts.size());
    t.s.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double th = detail::phase(pts[i], x);
        t.c[i] = std::cos(th);
        t.s[i] = std::sin(th);
    }
    const double sum =
        detail::tree_sum(0, pts.size(), [&](std::size_t i) { return sample.a[i] * t.c[i] + sample.b[i] * t.s[i]; });
    return sample.normalization() * sum;
}

std::vector<std::complex<double>> complex_coefficients(const WaveSample& sample)
{
    const auto& spec = *sample.spec;
    std::vector<std::complex<double>> eps(spec.points.size());
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        const auto& p = spec.points[i];
        const bool positive = p.mu1 > 0 || (p.mu1 == 0 && p.mu2 > 0);
        const LatticePoint rep = positive ? p : LatticePoint{-p.mu1, -p.mu2};
        const auto it = std::lower_bound(spec.half_points.begin(), spec.half_points.end(), rep);
        const auto j = static_cast<std::size_t>(it - spec.half_points.begin());
        const std::complex<double> e(sample.a[j] * inv_sqrt2, -sample.b[j] * inv_sqrt2);
        eps[i] = positive ? e : std::conj(e);
    }
    return eps;
}

std::shared_ptr<const PhaseTable> PhaseTable::build(const EigenvalueSpec& spec, const CurveDef& curve,
                                                    std::size_t grid_size)
{
    if (grid_size == 0) throw InvalidArgument("PhaseTable: empty grid");
    auto tab = std::make_shared<PhaseTable>();
    const std::size_t h = spec.half_points.size();
    tab->grid_size_ = grid_size;
    tab->terms_ = h;
    tab->data_.resize(3 * h * grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) {
        const CurveJet g = curve.jet(tab->t(j));
        double* row = tab->data_.data() + 3 * h * j;
        for (std::size_t i = 0; i < h; ++i) {
            const double th = detail::phase(spec.half_points[i], g.pos);
            row[i] = std::cos(th);
            row[h + i] = std::sin(th);
            row[2 * h + i] = detail::phase(spec.half_points[i], g.vel);
        }
    }
    return tab;
}

RestrictedWave::RestrictedWave(WaveSample sample, CurveDef curve, std::shared_ptr<const PhaseTable> table)
    : sample_(std::move(sample)), curve_(std::move(curve)), table_(std::move(table))
{
    require_wave_spec(sample_.spec, "RestrictedWave");
    if (table_ && table_->terms() != sample_.spec->half_points.size()) {
        throw InvalidArgument("RestrictedWave: phase table belongs to a different eigenvalue");
    }
}

WaveJet RestrictedWave::jet(double t) const
{
    const CurveJet g = curve_.jet(t);
    Terms& tm = scratch();
    tm.fill(*sample_.spec, g, true);
    const auto& a = sample_.a;
    const auto& b = sample_.b;
    const std::size_t h = a.size();
    const double norm = sample_.normalization();
    WaveJet out;
    out.f = norm * detail::tree_sum(0, h, [&](std::size_t i) { return a[i] * tm.c[i] + b[i] * tm.s[i]; });
    out.df = norm * detail::tree_sum(0, h, [&](std::size_t i) { return tm.k1[i] * (b[i] * tm.c[i] - a[i] * tm.s[i]); });
    out.d2f = norm * detail::tree_sum(0, h, [&](std::size_t i) {
                  return tm.k2[i] * (b[i] * tm.c[i] - a[i] * tm.s[i]) -
                         tm.k1[i] * tm.k1[i] * (a[i] * tm.c[i] + b[i] * tm.s[i]);
              });
    return out;
}

double RestrictedWave::eval(double t, int order) const
{
    if (order < 0 || order > 2) throw InvalidArgument("eval_restricted: order must be 0, 1 or 2");
    const CurveJet g = curve_.jet(t);
    Terms& tm = scratch();
    tm.fill(*sample_.spec, g, order == 2);
    const auto& a = sample_.a;
    const auto& b = sample_.b;
    const std::size_t h = a.size();
    const double norm = sample_.normalization();
    switch (order) {
    case 0:
        return norm * detail::tree_sum(0, h, [&](std::size_t i) { return a[i] * tm.c[i] + b[i] * tm.s[i]; });
    case 1:
        return norm * detail::tree_sum(0, h, [&](std::size_t i) { return tm.k1[i] * (b[i] * tm.c[i] - a[i] * tm.s[i]); });
    default:
        return norm * detail::tree_sum(0, h, [&](std::size_t i) {
                   return tm.k2[i] * (b[i] * tm.c[i] - a[i] * tm.s[i]) -
                          tm.k1[i] * tm.k1[i] * (a[i] * tm.c[i] + b[i] * tm.s[i]);
               });
    }
}

void RestrictedWave::eval_table(const PhaseTable& table, std::span<double> f, std::span<double> df) const
{
    const std::size_t n = table.grid_size();
    const std::size_t h = table.terms();
    if (h != sample_.a.size() || f.size() < n || df.size() < n) {
        throw InvalidArgument("eval_table: table or output size mismatch");
    }
    const double* a = sample_.a.data();
    const double* b = sample_.b.data();
    const double norm = sample_.normalization();
    for (std::size_t j = 0; j < n; ++j) {
        const double* c = table.cos_row(j);
        const double* s = table.sin_row(j);
        const double* k = table.freq_row(j);
        f[j] = norm * detail::tree_sum(0, h, [&](std::size_t i) { return a[i] * c[i] + b[i] * s[i]; });
        df[j] = norm * detail::tree_sum(0, h, [&](std::size_t i) { return k[i] * (b[i] * c[i] - a[i] * s[i]); });
    }
}

double eval_restricted(const RestrictedWave& rw, double t, int order) { return rw.eval(t, order); }

std::vector<double> batch_eval(const RestrictedWave& rw, std::span<const double> grid, int order)
{
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = rw.eval(grid[i], order);
    return out;
}

}  // namespace torwave
