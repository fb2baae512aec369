#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cpt/generators.hpp"
#include "cpt/permutation.hpp"
#include "cpt/stats.hpp"

namespace cpt {

/// One ROC experiment: R fresh-data permutation tests and the empirical CDF
/// of their p-values over alpha_grid.
struct ExperimentRecord {
    ScenarioSpec scenario;
    StatisticKind statistic_kind;
    int replications = 0;
    int num_permutations = 0;
    std::vector<double> p_values;                 // one per replication
    std::vector<double> alpha_grid;               // ascending
    std::vector<std::pair<double, double>> roc;   // (alpha, power) pairs
    double runtime_seconds = 0.0;
    std::uint64_t seed = 0;
};

/// Rejection proportion at a fixed level for a family of growing sample
/// sizes (n = m = size), raw points with no smoothing.
struct PowerCurve {
    ScenarioSpec scenario;  // base spec; n and m are overridden per size
    StatisticKind statistic_kind;
    std::vector<Eigen::Index> sample_sizes;
    std::vector<double> powers;
    int replications = 0;  // per size
    int num_permutations = 0;
    double alpha = 0.05;
    double runtime_seconds = 0.0;
    std::uint64_t seed = 0;
};

/// Runs R independent permutation tests, each on a fresh draw of the
/// scenario, and collects the p-value ECDF over alpha_grid. Replication r
/// derives all of its randomness from mix_seed(seed, r), so results are
/// identical for every thread count.
ExperimentRecord roc_experiment(const ScenarioSpec& scenario, const StatisticKind& kind, int R,
                                int B, std::vector<double> alpha_grid, std::uint64_t seed,
                                int threads = 1);

/// Rejection rate at `alpha` for each size in `sizes` (strictly increasing),
/// reps fresh tests per size.
PowerCurve power_curve(const ScenarioSpec& base, const StatisticKind& kind,
                       const std::vector<Eigen::Index>& sizes, int reps, int B,
                       std::uint64_t seed, int threads = 1, double alpha = 0.05);

/// Standard normal CDF (double precision via erfc).
double normal_cdf(double x);

/// Standard normal lower quantile: normal_cdf(normal_quantile(p)) = p.
double normal_quantile(double p);

/// Closed-form minimax power for the Gaussian mean-shift problem:
/// Phi( sqrt(d/(d + n q)) z_alpha + q / sqrt(8 d/n^2 + 8 q/n) ) with
/// q = delta_sq / sigma^2 and z_alpha the lower quantile, so the value at
/// delta_sq = 0 is exactly alpha.
double minimax_power(double alpha, double d, double n, double delta_sq, double sigma);

}  // namespace cpt
