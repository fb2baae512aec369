#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "cpt/matrix.hpp"
#include "cpt/rng.hpp"

namespace cpt {

enum class ClassifierKind { Knn, Logistic, Forest };

/// Everything that determines a fit. Two fits with equal spec and data are
/// bit-identical, and fits are invariant under row reordering of the
/// training set (the forest resample is keyed on stable row ids).
struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::Forest;

    int knn_k = 0;  // 0 = floor(sqrt(N)) at fit time

    double logistic_l2 = 1e-3;
    int logistic_max_iter = 500;
    double logistic_tol = 1e-6;

    int forest_trees = 500;
    int forest_mtry = 0;  // 0 = floor(sqrt(d))
    int forest_min_leaf = 10;

    std::uint64_t seed = 0;
};

/// Estimated P(Y = 1 | X = x) per evaluation row, clipped into
/// [epsilon, 1 - epsilon] so log-odds stay finite.
struct ProbEstimate {
    Eigen::VectorXd values;
    double epsilon = 0.0;
    bool converged = true;  // only the logistic solver can clear this
};

/// Default clipping constant: 1/(2N) for a training set of N rows. Shrinks
/// with N, so consistency is preserved while |log-odds| <= log(2N - 1).
double default_epsilon(Eigen::Index n_train);

/// A fitted-on-demand classification probability estimator. The single
/// entry point keeps retraining explicit: every call is a fresh fit.
class ProbClassifier {
public:
    virtual ~ProbClassifier() = default;
    virtual ProbEstimate fit_predict(const LabeledDataset& train,
                                     const SampleMatrix& eval) const = 0;
};

std::unique_ptr<ProbClassifier> make_classifier(const ClassifierSpec& spec);

/// Fits the classifier described by `spec` on `train` and evaluates the
/// class-1 probability on every row of `eval`.
ProbEstimate fit_predict_proba(const ClassifierSpec& spec, const LabeledDataset& train,
                               const SampleMatrix& eval);

/// k-nearest-neighbor vote: share of label-1 rows among the k nearest
/// training rows in Euclidean distance, distance ties broken by lowest
/// training row index.
ProbEstimate knn_proba(int k, const LabeledDataset& train, const SampleMatrix& eval);

ProbEstimate logistic_fit_predict(const ClassifierSpec& spec, const LabeledDataset& train,
                                  const SampleMatrix& eval);

ProbEstimate forest_fit_predict(const ClassifierSpec& spec, const LabeledDataset& train,
                                const SampleMatrix& eval);

/// L2-penalized logistic fit by full-batch gradient descent with Armijo
/// backtracking. The intercept is unpenalized. Objective is the mean
/// negative log-likelihood plus (l2/2)*|w|^2.
struct LogisticModel {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> objective_trace;  // value after each accepted step
};

LogisticModel fit_logistic(const ClassifierSpec& spec, const LabeledDataset& train);

double logistic_objective(const Eigen::VectorXd& weights, double intercept,
                          const LabeledDataset& data, double l2);

void logistic_gradient(const Eigen::VectorXd& weights, double intercept,
                       const LabeledDataset& data, double l2, Eigen::VectorXd& grad_w,
                       double& grad_b);

/// Out-of-bag misclassification rate of a forest fit (rows are scored only
/// by trees whose resample excluded them).
double forest_oob_error(const ClassifierSpec& spec, const LabeledDataset& train);

}  // namespace cpt
