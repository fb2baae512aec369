#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "cpt/classifiers.hpp"
#include "cpt/matrix.hpp"
#include "cpt/rng.hpp"

namespace cpt {

enum class StatisticTag { Cpt1, Cpt2, Acc, Mmd };

/// Which test statistic to run, plus everything it needs. The classifier
/// spec is ignored by MMD; acc_folds only matters for ACC.
struct StatisticKind {
    StatisticTag tag = StatisticTag::Cpt1;
    ClassifierSpec classifier;
    int acc_folds = 2;           // ACC cross-validation folds
    double mmd_bandwidth = 0.0;  // <= 0 selects the median heuristic
};

/// Short display name, e.g. "cpt1-forest", "acc-knn", "mmd".
std::string statistic_label(const StatisticKind& kind);

/// True class-probability model: log-densities of the two components and the
/// class-1 prior. Log-densities may return -infinity outside their support.
using LogDensity = std::function<double(const Eigen::RowVectorXd&)>;

struct OracleModel {
    LogDensity log_density_f;  // class-1 component
    LogDensity log_density_g;  // class-0 component
    double pi = 0.5;           // P(Y = 1), in (0,1)
};

/// Mean log-odds of the class-1 probability estimates over the n label-1
/// rows, centered by log(n/m). `probs` must hold exactly the label-1 rows.
double statistic_w1(const ProbEstimate& probs, Eigen::Index n, Eigen::Index m);

/// Empirical variance of the probability estimates over all pooled rows.
double statistic_w2(const ProbEstimate& probs);

/// Oracle statistic: mean of log(f(x)/g(x)) over class-1 points, the ideal
/// W1. Returns +infinity when any point has g = 0 but f > 0; a point with
/// f = 0 violates the contract (class-1 points must lie in supp f).
double statistic_u(const OracleModel& oracle, const SampleMatrix& class1_points);

/// Mirror of statistic_u: mean of log(g(x)/f(x)) over class-0 points.
double statistic_v(const OracleModel& oracle, const SampleMatrix& class0_points);

/// Mean over stratified cross-validation folds of the held-out accuracy,
/// thresholding the probability estimate at 1/2 (ties predict label 1).
double statistic_acc(const ClassifierSpec& spec, const LabeledDataset& data, int folds,
                     RngStream& rng);
double statistic_acc(const ProbClassifier& classifier, const LabeledDataset& data, int folds,
                     RngStream& rng);

/// Fold id (0..folds-1) per row; each fold receives both classes in near
/// class-proportional counts. Throws FoldTooSmall when a class has fewer
/// rows than folds.
std::vector<int> stratified_fold_assignment(const std::vector<int>& labels, int folds,
                                            RngStream& rng);

/// Unbiased squared maximum mean discrepancy with the Gaussian kernel
/// exp(-|x-y|^2 / (2 sigma^2)): mean off-diagonal within-sample-1 kernel
/// + mean off-diagonal within-sample-0 kernel - 2 * mean cross kernel.
/// A non-positive bandwidth selects the median heuristic on the pooled
/// sample. Each sample needs at least two rows (off-diagonal means).
double statistic_mmd(const SampleMatrix& sample1, const SampleMatrix& sample0,
                     double bandwidth = 0.0);

/// Median of all pairwise Euclidean distances of the pooled rows. Throws
/// DegenerateBandwidth when the median distance is zero.
double median_heuristic_bandwidth(const SampleMatrix& pooled);

}  // namespace cpt
