#include <algorithm>
#include <cmath>
#include <vector>

#include "cpt/bench.hpp"
#include "doctest.h"

using cpt::ClassifierKind;
using cpt::ExperimentRecord;
using cpt::PowerCurve;
using cpt::ScenarioKind;
using cpt::ScenarioSpec;
using cpt::StatisticKind;
using cpt::StatisticTag;

namespace {

// Small, fast configurations built around the MMD statistic (no classifier
// refits), so the Monte Carlo tests stay in the millisecond range.
ScenarioSpec null_scenario(Eigen::Index n) {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::MeanShift;
    spec.d = 2;
    spec.n = n;
    spec.m = n;
    spec.sigma = 1.0;
    return spec;
}

ScenarioSpec shifted_scenario(Eigen::Index n, double shift) {
    ScenarioSpec spec = null_scenario(n);
    spec.delta = Eigen::VectorXd::Constant(2, shift);
    return spec;
}

StatisticKind mmd_kind() {
    StatisticKind kind;
    kind.tag = StatisticTag::Mmd;
    kind.mmd_bandwidth = 1.0;
    return kind;
}

// Spearman rank correlation for the monotone-trend checks. Ties do not
// occur in the inputs used here (sizes are distinct by contract).
double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double rank = 0.0, ties = 1.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[j] < v[i]) rank += 1.0;
                if (j != i && v[j] == v[i]) ties += 1.0;
            }
            r[i] = rank + (ties - 1.0) / 2.0;
        }
        return r;
    };
    const std::vector<double> rx = ranks(xs);
    const std::vector<double> ry = ranks(ys);
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

}  // namespace

TEST_CASE("normal cdf matches high-precision reference values") {
    CHECK(cpt::normal_cdf(0.0) == 0.5);
    CHECK(cpt::normal_cdf(-3.0) == doctest::Approx(0.0013498980316300933).epsilon(1e-13));
    CHECK(cpt::normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-13));
    CHECK(cpt::normal_cdf(1.645) == doctest::Approx(0.9500150944608786).epsilon(1e-13));
    CHECK(cpt::normal_cdf(4.2) == doctest::Approx(0.9999866542509841).epsilon(1e-13));
    // Symmetry.
    CHECK(cpt::normal_cdf(1.3) + cpt::normal_cdf(-1.3) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("normal quantile matches reference values and inverts the cdf") {
    CHECK(cpt::normal_quantile(0.5) == 0.0);
    CHECK(std::abs(cpt::normal_quantile(0.025) - -1.9599639845400545) < 1e-9);
    CHECK(std::abs(cpt::normal_quantile(0.975) - 1.959963984540054) < 1e-9);
    CHECK(std::abs(cpt::normal_quantile(0.05) - -1.6448536269514722) < 1e-9);
    CHECK(std::abs(cpt::normal_quantile(1e-9) - -5.9978070150076865) < 1e-9);
    CHECK(std::abs(cpt::normal_quantile(0.9999999) - 5.199337582290661) < 1e-9);

    for (double x = -6.0; x <= 6.0; x += 0.37) {
        CHECK(std::abs(cpt::normal_quantile(cpt::normal_cdf(x)) - x) < 1e-8);
    }
    for (double p = 0.02; p < 1.0; p += 0.07) {
        CHECK(cpt::normal_cdf(cpt::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("minimax power reproduces frozen closed-form values") {
    // Frozen from an independent high-precision evaluation of the formula.
    CHECK(cpt::minimax_power(0.05, 100, 100, 2.56, 2.0) ==
          doctest::Approx(0.6852708806379212).epsilon(1e-12));
    CHECK(cpt::minimax_power(0.05, 20, 50, 2.56, 2.0) ==
          doctest::Approx(0.7084403694243232).epsilon(1e-12));
    CHECK(cpt::minimax_power(0.1, 20, 50, 2.56, 2.0) ==
          doctest::Approx(0.7805773395001855).epsilon(1e-12));
    CHECK(cpt::minimax_power(0.2, 20, 50, 2.56, 2.0) ==
          doctest::Approx(0.8524450797263126).epsilon(1e-12));
}

TEST_CASE("minimax power is alpha at zero signal and saturates for large signal") {
    CHECK(cpt::minimax_power(0.05, 100, 100, 0.0, 2.0) == 0.05);
    CHECK(cpt::minimax_power(0.17, 10, 25, 0.0, 1.0) == 0.17);

    CHECK(cpt::minimax_power(0.05, 10, 100, 1e6, 1.0) > 0.999999);

    // Monotone in the signal size.
    double previous = 0.0;
    for (double dsq = 0.0; dsq <= 8.0; dsq += 0.5) {
        const double value = cpt::minimax_power(0.05, 50, 80, dsq, 1.5);
        CHECK(value >= previous);
        CHECK(value < 1.0);
        previous = value;
    }

    // More data helps for a fixed alternative.
    CHECK(cpt::minimax_power(0.05, 100, 400, 2.56, 2.0) >
          cpt::minimax_power(0.05, 100, 100, 2.56, 2.0));
}

TEST_CASE("roc experiment is calibrated under the null") {
    // Null mean-shift data: the permutation p-value is exactly discrete
    // uniform on {1/40, ..., 40/40}, so power(alpha) = floor(40 alpha)/40.
    const ExperimentRecord record =
        cpt::roc_experiment(null_scenario(12), mmd_kind(), 60, 39, {0.05, 0.2, 0.5}, 77, 2);

    REQUIRE(record.p_values.size() == 60);
    REQUIRE(record.roc.size() == 3);
    CHECK(record.replications == 60);
    CHECK(record.num_permutations == 39);
    CHECK(record.seed == 77);
    CHECK(record.runtime_seconds >= 0.0);

    CHECK(record.roc[0].first == 0.05);
    CHECK(std::abs(record.roc[0].second - 0.05) < 3.0 * std::sqrt(0.05 * 0.95 / 60.0));
    CHECK(std::abs(record.roc[1].second - 0.2) < 3.0 * std::sqrt(0.2 * 0.8 / 60.0));
    CHECK(std::abs(record.roc[2].second - 0.5) < 3.0 * std::sqrt(0.5 * 0.5 / 60.0));

    // Structural invariants: grid ascending, powers non-decreasing in [0,1].
    CHECK(std::is_sorted(record.alpha_grid.begin(), record.alpha_grid.end()));
    for (std::size_t i = 0; i < record.roc.size(); ++i) {
        CHECK(record.roc[i].second >= 0.0);
        CHECK(record.roc[i].second <= 1.0);
        if (i > 0) CHECK(record.roc[i].second >= record.roc[i - 1].second);
    }

    // Every p-value respects the add-one bounds.
    for (double p : record.p_values) {
        CHECK(p >= 1.0 / 40.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("roc experiment saturates on a separated alternative") {
    // A 10-sigma shift: every replication's p-value sits at the floor
    // 1/(B+1) = 0.05, so power is 1 at alpha >= 0.05 and 0 below it.
    const ExperimentRecord record =
        cpt::roc_experiment(shifted_scenario(10, 10.0), mmd_kind(), 20, 19, {0.01, 0.05, 0.5},
                            123, 1);
    CHECK(record.roc[0].second == 0.0);
    CHECK(record.roc[1].second == 1.0);
    CHECK(record.roc[2].second == 1.0);
}

TEST_CASE("roc experiment results do not depend on the thread count") {
    const ScenarioSpec scenario = shifted_scenario(8, 0.7);
    const std::vector<double> grid{0.05, 0.1, 0.3};
    const ExperimentRecord one = cpt::roc_experiment(scenario, mmd_kind(), 30, 29, grid, 5, 1);
    const ExperimentRecord four = cpt::roc_experiment(scenario, mmd_kind(), 30, 29, grid, 5, 4);
    CHECK(one.p_values == four.p_values);
    CHECK(one.roc == four.roc);

    // Same seed reproduces; a different seed must not.
    const ExperimentRecord again = cpt::roc_experiment(scenario, mmd_kind(), 30, 29, grid, 5, 2);
    CHECK(one.p_values == again.p_values);
    const ExperimentRecord other = cpt::roc_experiment(scenario, mmd_kind(), 30, 29, grid, 6, 2);
    CHECK(one.p_values != other.p_values);
}

TEST_CASE("roc experiment validates its arguments") {
    CHECK_THROWS_AS(cpt::roc_experiment(null_scenario(8), mmd_kind(), 0, 9, {0.05}, 1),
                    cpt::InvalidArgument);
    CHECK_THROWS_AS(cpt::roc_experiment(null_scenario(8), mmd_kind(), 5, 0, {0.05}, 1),
                    cpt::InvalidArgument);
}

TEST_CASE("a p-value grid arrives sorted even when given shuffled") {
    const ExperimentRecord record =
        cpt::roc_experiment(null_scenario(8), mmd_kind(), 10, 9, {0.5, 0.05, 0.2}, 3, 1);
    REQUIRE(record.alpha_grid.size() == 3);
    CHECK(record.alpha_grid[0] == 0.05);
    CHECK(record.alpha_grid[2] == 0.5);
    CHECK(record.roc[0].first == 0.05);
    CHECK(record.roc[2].first == 0.5);
}

TEST_CASE("power curve stays near alpha under the null") {
    const PowerCurve curve = cpt::power_curve(null_scenario(10), mmd_kind(), {10, 20}, 40, 39,
                                              31, 2);
    REQUIRE(curve.powers.size() == 2);
    CHECK(curve.sample_sizes == std::vector<Eigen::Index>{10, 20});
    CHECK(curve.replications == 40);
    CHECK(curve.alpha == 0.05);
    // Exact rejection probability at B=39 is 2/40 = 0.05; three binomial
    // standard deviations at 40 reps is ~0.10.
    for (double power : curve.powers) {
        CHECK(power <= 0.16);
    }
}

TEST_CASE("power grows with sample size on a strong alternative") {
    const PowerCurve curve = cpt::power_curve(shifted_scenario(0, 1.5), mmd_kind(),
                                              {6, 12, 25, 50}, 25, 39, 17, 4);
    REQUIRE(curve.powers.size() == 4);
    std::vector<double> sizes;
    for (Eigen::Index s : curve.sample_sizes) sizes.push_back(static_cast<double>(s));
    CHECK(spearman(sizes, curve.powers) > 0.0);
    CHECK(curve.powers.back() > 0.9);  // a 1.5-sigma shift per coordinate at n=50
    CHECK(curve.powers.back() > curve.powers.front());
}

TEST_CASE("power curve requires strictly increasing sizes") {
    CHECK_THROWS_AS(
        cpt::power_curve(null_scenario(10), mmd_kind(), {10, 10}, 5, 9, 1),
        cpt::InvalidArgument);
    CHECK_THROWS_AS(
        cpt::power_curve(null_scenario(10), mmd_kind(), {20, 10}, 5, 9, 1),
        cpt::InvalidArgument);
    CHECK_THROWS_AS(cpt::power_curve(null_scenario(10), mmd_kind(), {}, 5, 9, 1),
                    cpt::InvalidArgument);
}

TEST_CASE("power curve results do not depend on the thread count") {
    const ScenarioSpec scenario = shifted_scenario(0, 0.8);
    const PowerCurve one = cpt::power_curve(scenario, mmd_kind(), {8, 16}, 12, 19, 9, 1);
    const PowerCurve four = cpt::power_curve(scenario, mmd_kind(), {8, 16}, 12, 19, 9, 4);
    CHECK(one.powers == four.powers);
}
