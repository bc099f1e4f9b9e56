#pragma once

#include <cstddef>
#include <vector>

#include "torwave/wave.hpp"

namespace torwave {

struct GridConfig {
    std::size_t points_per_lambda = 50;
    double bisection_tol = 1e-12;
    double tangency_threshold = 1e-4;  // eta
    bool certified_mode = false;
};

/// Sign-change grid size ceil(points_per_lambda * lambda).
std::size_t grid_points(const GridConfig& cfg, double lambda);

struct ZeroCountResult {
    std::size_t count = 0;
    std::vector<double> roots;  // strictly increasing, in [0, 1)
    std::size_t suspects = 0;          // extrema whose sign is below double resolution
    std::size_t near_tangencies = 0;   // extrema with |f| < eta and no crossing on the refined grid
    double certified_fraction = 0.0;
};

/// 2 pi lambda sqrt(2/N) sum_{E+} sqrt(a^2 + b^2); dominates sup |f'|.
double global_derivative_bound(const WaveSample& sample);

/// Bound on sup |f''| from the coefficient l1 norm and the curve's maximal curvature.
double second_derivative_bound(const RestrictedWave& rw);

/*!
 * Number of zeros of f on the closed curve.
 *
 * Sign changes on a uniform periodic grid are refined by bisection. Cells
 * where f' changes sign but f does not are candidate near-tangencies: if
 * |f| can drop below eta there the cell is resampled 8x and crossings found
 * that way are added. Otherwise the extremum is located by bisection on f'
 * and the sign of f there decides between no root and a root pair; only
 * extrema with |f| at rounding level remain suspects. Throws InvalidArgument
 * for points_per_lambda < 8 or an identically zero wave.
 */
ZeroCountResult count_zeros(const RestrictedWave& rw, const GridConfig& cfg = {});

/// Interval-stability parameters. gamma_excl and tau are exposed for the
/// perturbation experiments.
struct StabilityParams {
    double alpha = 0.0;
    double beta = 0.0;
    double R = 0.0;
    double delta = 0.0;
    double tau = 0.0;         // perturbation norm, delta^2
    double gamma_excl = 0.0;  // exclusion radius, delta^{5/4}
};

/// R = 4 log N, delta = min(N^{-1/3}, 1/(8R)), alpha = delta^{3/2},
/// beta = delta^{3/4}. The cap keeps delta * R = 1/8 < 1/4 at desk-scale N.
StabilityParams default_stability_params(std::size_t N);

struct ClassifiedInterval {
    double start = 0.0;
    double end = 0.0;
    bool stable = true;
};

struct IntervalClassification {
    double R = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<ClassifiedInterval> intervals;
    std::size_t unstable_count = 0;
    bool exceptional = false;
};

/*!
 * Tiles [0, 1] by intervals of length R / lambda. I is unstable when some
 * point of the tripled interval 3I (sampled at check_density points per
 * interval length) has |f| <= alpha and |f'| <= beta lambda. Sampling can only
 * miss unstable points, never invent them.
 */
IntervalClassification classify_intervals(const RestrictedWave& rw, double alpha, double beta, double R,
                                          double delta, std::size_t check_density);

struct JensenDiagnostic {
    double t1 = 0.0;
    double t2 = 0.0;
    double max_abs_f = 0.0;
    double max_abs_df = 0.0;
    std::size_t roots = 0;
    double bound = 0.0;  // 2 c |I| lambda
    bool premise = false;
    bool holds = false;
};

/// Real-interval Jensen bound: if max|f| >= exp(-c lambda |I| / 2) or
/// max|f'| >= lambda exp(-c lambda |I| / 2) then #roots in I <= 2 c |I| lambda.
/// Requires 0 <= t1 < t2 <= 1 and t2 - t1 >= log(N) / lambda.
JensenDiagnostic jensen_diagnostic(const RestrictedWave& rw, double t1, double t2, double c_growth,
                                   const GridConfig& cfg = {});

/// sum_i |f^{(d)}(x_i)|^2 / (lambda^{2d} (lambda + 1/separation)) over
/// x_i = i * separation in [0, 1), separation in (0, 1/2).
double large_sieve_check(const RestrictedWave& rw, double separation, int d);

}  // namespace torwave
