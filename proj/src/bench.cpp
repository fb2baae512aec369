#include <algorithm>
#include <chrono>
#include <cmath>

#include "cpt/bench.hpp"
#include "cpt/parallel.hpp"

namespace cpt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// One fresh-data permutation test; replication_seed owns every random
/// choice (data draw and permutation schedule are separate substreams).
double replication_p_value(const ScenarioSpec& scenario, const StatisticKind& kind, int B,
                           std::uint64_t replication_seed) {
    RngStream data_rng(mix_seed(replication_seed, 1), 0);
    auto [sample1, sample0] = generate_scenario(scenario, data_rng);
    const LabeledDataset data = pooled(sample1, sample0);
    const RngStream perm_rng(mix_seed(replication_seed, 2), 0);
    return permutation_test(data, kind, B, 0.05, perm_rng).p_value;
}

}  // namespace

ExperimentRecord roc_experiment(const ScenarioSpec& scenario, const StatisticKind& kind, int R,
                                int B, std::vector<double> alpha_grid, std::uint64_t seed,
                                int threads) {
    if (R < 1) {
        throw InvalidArgument("roc_experiment needs at least one replication");
    }
    const auto start = Clock::now();

    ExperimentRecord record;
    record.scenario = scenario;
    record.statistic_kind = kind;
    record.replications = R;
    record.num_permutations = B;
    record.seed = seed;
    std::sort(alpha_grid.begin(), alpha_grid.end());
    record.alpha_grid = std::move(alpha_grid);

    record.p_values.resize(static_cast<std::size_t>(R));
    parallel_for(threads, R, [&](int r) {
        record.p_values[static_cast<std::size_t>(r)] =
            replication_p_value(scenario, kind, B, mix_seed(seed, static_cast<std::uint64_t>(r)));
    });

    const std::vector<double> power = p_value_ecdf(record.p_values, record.alpha_grid);
    record.roc.reserve(record.alpha_grid.size());
    for (std::size_t i = 0; i < record.alpha_grid.size(); ++i) {
        record.roc.emplace_back(record.alpha_grid[i], power[i]);
    }
    record.runtime_seconds = seconds_since(start);
    return record;
}

PowerCurve power_curve(const ScenarioSpec& base, const StatisticKind& kind,
                       const std::vector<Eigen::Index>& sizes, int reps, int B,
                       std::uint64_t seed, int threads, double alpha) {
    if (sizes.empty() || reps < 1) {
        throw InvalidArgument("power_curve needs sizes and at least one replication per size");
    }
    for (std::size_t k = 1; k < sizes.size(); ++k) {
        if (sizes[k] <= sizes[k - 1]) {
            throw InvalidArgument("sample sizes must be strictly increasing");
        }
    }
    const auto start = Clock::now();

    PowerCurve curve;
    curve.scenario = base;
    curve.statistic_kind = kind;
    curve.sample_sizes = sizes;
    curve.replications = reps;
    curve.num_permutations = B;
    curve.alpha = alpha;
    curve.seed = seed;

    const int total = static_cast<int>(sizes.size()) * reps;
    std::vector<double> p_values(static_cast<std::size_t>(total));
    parallel_for(threads, total, [&](int t) {
        const int k = t / reps;
        const int r = t % reps;
        ScenarioSpec scenario = base;
        scenario.n = sizes[static_cast<std::size_t>(k)];
        scenario.m = sizes[static_cast<std::size_t>(k)];
        const std::uint64_t replication_seed =
            mix_seed(seed, (static_cast<std::uint64_t>(k) << 32) | static_cast<std::uint64_t>(r));
        p_values[static_cast<std::size_t>(t)] =
            replication_p_value(scenario, kind, B, replication_seed);
    });

    curve.powers.resize(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        int rejected = 0;
        for (int r = 0; r < reps; ++r) {
            rejected += p_values[k * static_cast<std::size_t>(reps) +
                                 static_cast<std::size_t>(r)] <= alpha;
        }
        curve.powers[k] = static_cast<double>(rejected) / static_cast<double>(reps);
    }
    curve.runtime_seconds = seconds_since(start);
    return curve;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("normal_quantile needs p in (0, 1)");
    }
    // Acklam's rational approximation, then one Halley step against the
    // erfc-based CDF, which brings the error near machine precision.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double low = 0.02425;

    double x;
    if (p < low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double error = normal_cdf(x) - p;
    const double u = error * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double minimax_power(double alpha, double d, double n, double delta_sq, double sigma) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1)");
    }
    if (d <= 0.0 || n <= 0.0 || sigma <= 0.0 || delta_sq < 0.0) {
        throw InvalidArgument("minimax_power needs d, n, sigma > 0 and delta_sq >= 0");
    }
    const double q = delta_sq / (sigma * sigma);
    if (q == 0.0) {
        return alpha;  // the formula reduces to cdf(quantile(alpha))
    }
    const double shrink = std::sqrt(d / (d + n * q)) * normal_quantile(alpha);
    const double shift = q / std::sqrt(8.0 * d / (n * n) + 8.0 * q / n);
    return normal_cdf(shrink + shift);
}

}  // namespace cpt
