#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cpt/matrix.hpp"
#include "cpt/rng.hpp"
#include "cpt/stats.hpp"

namespace cpt {

/// Outcome of one permutation test. `null_sample` holds the B permuted
/// statistics sorted ascending; `seed` is the master seed such that
/// RngStream(seed, j) drove permutation j (stream 0 drove the observed fit).
struct TestResult {
    StatisticKind statistic_kind;
    double observed = 0.0;
    std::vector<double> null_sample;
    double p_value = 1.0;
    double critical_value = 0.0;
    double alpha = 0.05;
    int num_permutations = 0;
    std::uint64_t seed = 0;

    /// Upper-tail rejection; always agrees with p_value <= alpha.
    bool reject() const { return observed > critical_value; }
};

/// Scores one labeling of a fixed pooled sample. Implementations own all
/// per-call scratch; `rng` is the replication's private stream (used by
/// statistics with internal randomness, e.g. ACC fold splits).
class StatisticEvaluator {
public:
    virtual ~StatisticEvaluator() = default;
    virtual double evaluate(const std::vector<int>& labels, RngStream& rng) const = 0;
};

/// Builds the evaluator for `kind` over the pooled rows of `data`. The MMD
/// evaluator computes its kernel matrix (and median-heuristic bandwidth,
/// which is label-invariant) once at construction.
std::unique_ptr<StatisticEvaluator> make_evaluator(const LabeledDataset& data,
                                                   const StatisticKind& kind);

/// Classifier-injecting factories, used to substitute test doubles for the
/// real classifiers (the engine itself never knows the difference).
std::unique_ptr<StatisticEvaluator> make_cpt1_evaluator(
    const LabeledDataset& data, std::shared_ptr<const ProbClassifier> classifier);
std::unique_ptr<StatisticEvaluator> make_cpt2_evaluator(
    const LabeledDataset& data, std::shared_ptr<const ProbClassifier> classifier);
std::unique_ptr<StatisticEvaluator> make_acc_evaluator(
    const LabeledDataset& data, std::shared_ptr<const ProbClassifier> classifier, int folds);

/// Label-permutation test: fits the statistic once on the original labels,
/// then on B uniform random relabelings with the class sizes held fixed.
/// Any replication error propagates (silent dropping would bias the null
/// sample). Only the (seed, stream) identity of `rng` matters; replications
/// are independent of thread count.
TestResult permutation_test(const LabeledDataset& data, const StatisticKind& kind, int B,
                            double alpha, const RngStream& rng, int threads = 1);

/// Same engine with a caller-supplied evaluator.
TestResult run_permutation_test(const LabeledDataset& data, const StatisticEvaluator& evaluator,
                                const StatisticKind& kind, int B, double alpha,
                                const RngStream& rng, int threads = 1);

/// Add-one permutation p-value: (1 + #{null >= observed}) / (B + 1).
double permutation_p_value(const std::vector<double>& null_sample, double observed);

/// Upper-tail critical value: the ceil((1 - alpha) * (B + 1))-th order
/// statistic of the null sample, or +infinity when that rank exceeds B
/// (alpha below the 1/(B+1) resolution). Rejection `observed > critical`
/// is exactly equivalent to p_value <= alpha, ties included.
double permutation_critical_value(std::vector<double> null_sample, double alpha);

/// Empirical CDF of replicated p-values on a grid of levels: one ROC point
/// (#{p <= alpha} / count) per grid entry.
std::vector<double> p_value_ecdf(const std::vector<double>& p_values,
                                 const std::vector<double>& grid);

/// Uniform random 0/1 labeling of `total` rows with exactly `ones` ones.
std::vector<int> random_relabeling(Eigen::Index total, Eigen::Index ones, RngStream& rng);

}  // namespace cpt
