#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "torwave/curve.hpp"
#include "torwave/lattice.hpp"

namespace torwave {

/// Law of each real coefficient; all have mean 0 and variance 1.
enum class Ensemble { gaussian, rademacher, uniform };

Ensemble parse_ensemble(std::string_view name);
std::string_view ensemble_name(Ensemble e);

struct SeedPath {
    std::uint64_t master_seed = 0;
    std::uint64_t trial = 0;

    bool operator==(const SeedPath&) const = default;
};

/*!
 * One draw of the random eigenfunction
 *
 *   F(x) = sqrt(2/N) sum_{mu in E+} [a_mu cos 2 pi <mu,x> + b_mu sin 2 pi <mu,x>]
 *
 * with a, b indexed like spec->half_points. E F(x)^2 = 1 for every ensemble.
 * In complex form F = N^{-1/2} sum_{mu in E} eps_mu e(<mu,x>) with
 * eps_mu = (a_mu - i b_mu) / sqrt(2) on E+ and eps_{-mu} = conj(eps_mu).
 */
struct WaveSample {
    std::shared_ptr<const EigenvalueSpec> spec;
    std::vector<double> a;
    std::vector<double> b;
    Ensemble ensemble = Ensemble::gaussian;
    SeedPath seed_path;

    double normalization() const { return std::sqrt(2.0 / static_cast<double>(spec->N())); }
};

/// Counter-based draw: coefficient k of trial i depends only on
/// (master_seed, ensemble, i, k). Requires N >= 4.
WaveSample sample_coefficients(std::shared_ptr<const EigenvalueSpec> spec, Ensemble ensemble,
                               std::uint64_t master_seed, std::uint64_t trial);

/// Sample with explicit coefficients (sizes must equal N/2).
WaveSample make_wave(std::shared_ptr<const EigenvalueSpec> spec, std::vector<double> a, std::vector<double> b);

double eval_torus(const WaveSample& sample, Vec2 x);

/// eps_mu for every mu in spec->points (same order).
std::vector<std::complex<double>> complex_coefficients(const WaveSample& sample);

/// Sample-independent trigonometric data of a (spec, curve) pair on the
/// uniform grid t_j = j / n: cos and sin of 2 pi <mu, gamma(t_j)> and
/// 2 pi <mu, gamma'(t_j)> for each mu in E+. Rows are contiguous per t_j.
class PhaseTable {
  public:
    static std::shared_ptr<const PhaseTable> build(const EigenvalueSpec& spec, const CurveDef& curve,
                                                   std::size_t grid_size);

    std::size_t grid_size() const noexcept { return grid_size_; }
    std::size_t terms() const noexcept { return terms_; }
    double t(std::size_t j) const noexcept { return static_cast<double>(j) / static_cast<double>(grid_size_); }

    const double* cos_row(std::size_t j) const noexcept { return data_.data() + 3 * terms_ * j; }
    const double* sin_row(std::size_t j) const noexcept { return cos_row(j) + terms_; }
    const double* freq_row(std::size_t j) const noexcept { return cos_row(j) + 2 * terms_; }

  private:
    std::size_t grid_size_ = 0;
    std::size_t terms_ = 0;
    std::vector<double> data_;
};

/// f, f', f'' along the curve.
struct WaveJet {
    double f = 0.0;
    double df = 0.0;
    double d2f = 0.0;
};

/// f = F o gamma. Optionally carries a PhaseTable for fast uniform-grid scans.
class RestrictedWave {
  public:
    RestrictedWave(WaveSample sample, CurveDef curve, std::shared_ptr<const PhaseTable> table = nullptr);

    const WaveSample& sample() const noexcept { return sample_; }
    const CurveDef& curve() const noexcept { return curve_; }
    const EigenvalueSpec& spec() const noexcept { return *sample_.spec; }
    double lambda() const noexcept { return sample_.spec->lambda; }
    const std::shared_ptr<const PhaseTable>& table() const noexcept { return table_; }

    WaveJet jet(double t) const;
    double eval(double t, int order) const;

    /// f and f' at every node of `table` (which must belong to this spec and curve).
    void eval_table(const PhaseTable& table, std::span<double> f, std::span<double> df) const;

  private:
    WaveSample sample_;
    CurveDef curve_;
    std::shared_ptr<const PhaseTable> table_;
};

double eval_restricted(const RestrictedWave& rw, double t, int order);

/// Same values as pointwise eval_restricted (identical summation order).
std::vector<double> batch_eval(const RestrictedWave& rw, std::span<const double> grid, int order);

namespace detail {

/// Fixed-shape pairwise summation of term(lo) + ... + term(hi - 1).
template <class Term>
double tree_sum(std::size_t lo, std::size_t hi, const Term& term)
{
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return tree_sum(lo, mid, term) + tree_sum(mid, hi, term);
}

inline double phase(const LatticePoint& mu, Vec2 x)
{
    return 2.0 * 3.14159265358979323846 * (static_cast<double>(mu.mu1) * x.x + static_cast<double>(mu.mu2) * x.y);
}

}  // namespace detail

}  // namespace torwave
