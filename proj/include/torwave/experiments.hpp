#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "torwave/zeros.hpp"

namespace torwave {

/// Worker count from TORWAVE_WORKERS, else hardware concurrency (at least 1).
std::size_t default_workers();

/// Per-trial nodal counts for one (spec, curve, ensemble, seed).
struct TrialBatch {
    std::shared_ptr<const EigenvalueSpec> spec;
    Ensemble ensemble = Ensemble::gaussian;
    std::uint64_t master_seed = 0;
    std::size_t trials = 0;
    std::vector<std::int64_t> z_values;
    std::vector<std::int64_t> suspects;  // per trial
    std::size_t suspects_total = 0;
    std::size_t near_tangency_trials = 0;  // trials with at least one near-tangency
    std::size_t envelope_flags = 0;  // trials with count > 10 lambda
};

/*!
 * z_values[i] = count_zeros(sample_coefficients(spec, ensemble, seed, i) on
 * curve).count. Trials are spread over `workers` threads; the result does not
 * depend on the worker count. Per-trial failures are rethrown as TrialError
 * for the lowest failing index.
 */
TrialBatch run_mc(std::shared_ptr<const EigenvalueSpec> spec, const CurveDef& curve, Ensemble ensemble,
                  std::size_t trials, std::uint64_t master_seed, const GridConfig& cfg = {},
                  std::size_t workers = 1);

struct TailRow {
    double eps = 0.0;
    std::size_t exceed = 0;  // #{|Z_i - mean| >= eps lambda}
    double probability = 0.0;
    double se = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    double markov = 0.0;  // 1 / (N eps^2)
};

struct ExperimentReport {
    std::uint64_t m = 0;
    std::size_t N = 0;
    double lambda = 0.0;
    std::size_t trials = 0;
    double mean = 0.0;
    double mean_se = 0.0;
    double variance = 0.0;
    double variance_se = 0.0;
    double theory_mean = 0.0;     // sqrt(2m)
    double variance_scale = 0.0;  // m / N
    double variance_ratio = 0.0;  // variance / variance_scale
    std::size_t suspects_total = 0;
    std::vector<TailRow> tail_table;
};

/// Requires at least 100 trials.
ExperimentReport summarize(const TrialBatch& batch, std::span<const double> eps_list);

/// Lower-level form used by replay: the statistics only need m, N and z.
ExperimentReport summarize_counts(const EigenvalueSpec& spec, std::span<const std::int64_t> z_values,
                                  std::size_t suspects_total, std::span<const double> eps_list);

struct VarianceTerm {
    double factorized = 0.0;
    double tensor = 0.0;
    double scale = 0.0;  // m / N
};

/// (m/N) int int [sum_mu (4/N) <mu^, gamma'(t1)>^2 <mu^, gamma'(t2)>^2 - 1] by
/// tensor Gauss-Legendre, and by the factorized single integral.
VarianceTerm variance_leading_term(const EigenvalueSpec& spec, const CurveDef& curve,
                                   std::size_t quadrature_points);

struct RepulsionResult {
    std::size_t trials = 0;
    std::size_t hits = 0;
    double p_hat = 0.0;
    double ratio = 0.0;  // p_hat / (alpha beta)
    double ratio_se = 0.0;
    bool below_window = false;  // alpha or beta < N^{-1/2}
};

/// Empirical P(|f(t)| <= alpha and |f'(t)| <= beta lambda). Requires
/// alpha, beta > 0 and trials >= 1e4; windows below N^{-1/2}, where the O(alpha
/// beta) bound is not claimed, are run but flagged.
RepulsionResult repulsion_probe(std::shared_ptr<const EigenvalueSpec> spec, const CurveDef& curve, double t,
                                Ensemble ensemble, double alpha, double beta, std::size_t trials,
                                std::uint64_t master_seed);

struct UniversalityReport {
    ExperimentReport first;
    ExperimentReport second;
    double mean_gap = 0.0;
    double mean_gap_se = 0.0;
    double variance_gap = 0.0;
    double variance_gap_se = 0.0;
    double scale = 0.0;  // lambda / sqrt(N)
};

/// Both ensembles run from the same master seed; distinct ensembles draw
/// from independent streams. Requires trials >= 1e4.
UniversalityReport universality_gap(std::shared_ptr<const EigenvalueSpec> spec, const CurveDef& curve,
                                    Ensemble first, Ensemble second, std::size_t trials,
                                    std::uint64_t master_seed, const GridConfig& cfg = {},
                                    std::size_t workers = 1);

struct ScanRow {
    std::uint64_t m = 0;
    std::size_t N = 0;
    double lambda = 0.0;
    double mean = 0.0;
    TailRow tail;
    bool eps_outside_window = false;  // eps * log N > 1
};

/// Tail at eps lambda for each m (each must have N >= 8), sorted by N.
std::vector<ScanRow> concentration_scan(std::span<const std::uint64_t> m_list, const CurveDef& curve,
                                        Ensemble ensemble, double eps, std::size_t trials,
                                        std::uint64_t master_seed, const GridConfig& cfg = {},
                                        std::size_t workers = 1);

struct SieveScan {
    std::size_t samples = 0;
    double separation = 0.0;
    double max_ratio_d1 = 0.0;
    double max_ratio_d2 = 0.0;
    double mean_ratio_d1 = 0.0;
    double mean_ratio_d2 = 0.0;
};

SieveScan large_sieve_scan(std::shared_ptr<const EigenvalueSpec> spec, const CurveDef& curve, Ensemble ensemble,
                           std::size_t samples, std::uint64_t master_seed, double separation);

struct PerturbationReport {
    StabilityParams params;
    std::size_t samples = 0;
    std::size_t exceptional_samples = 0;
    std::size_t intervals_checked = 0;  // stable, containing roots, max|g| < alpha
    std::size_t roots_checked = 0;
    std::size_t failures = 0;
    double max_displacement = 0.0;  // worst nearest-root distance
    double allowed_displacement = 0.0;  // alpha / (beta lambda)
};

/*!
 * For each sample f, draws g with coefficient norm <= tau and checks that
 * every root of f inside a stable interval I with max_{3I}|g| < alpha has a
 * root of f + g within alpha / (beta lambda), and that these are distinct.
 */
PerturbationReport perturbation_persistence(std::shared_ptr<const EigenvalueSpec> spec, const CurveDef& curve,
                                            Ensemble ensemble, std::size_t samples, std::uint64_t master_seed,
                                            std::size_t check_density, const GridConfig& cfg = {});

}  // namespace torwave
