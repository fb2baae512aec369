#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cpt/matrix.hpp"
#include "cpt/rng.hpp"

namespace cpt {

enum class ScenarioKind { MeanShift, CovDiff, Ggm, MarginalDiff, TextCorpus };

std::string scenario_label(ScenarioKind kind);

/// One synthetic (or corpus-subsampling) data setting. Fields outside the
/// active kind are ignored. Empty `delta` means no shift; empty `diag`
/// selects the ramp 1.0, 1.1, 1.2, ... used by the covariance setting.
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::MeanShift;
    Eigen::Index d = 100;
    Eigen::Index n = 100;  // rows of sample 1
    Eigen::Index m = 100;  // rows of sample 0

    double sigma = 1.0;    // MeanShift: common noise scale
    Eigen::VectorXd delta; // MeanShift: mean of sample 0

    Eigen::VectorXd diag;  // CovDiff: common variance diagonal
    double rho1 = 0.01;    // CovDiff: off-diagonal covariance of sample 1
    double rho2 = 0.21;    // CovDiff: off-diagonal covariance of sample 0

    double tau = 0.65;     // Ggm: probability an edge is removed in graph 2
    double ridge1 = 0.1;   // Ggm: diagonal boost of precision 1
    double ridge2 = 0.1;   // Ggm: diagonal boost of precision 2

    std::shared_ptr<const LabeledDataset> corpus;  // TextCorpus rows to subsample

    std::uint64_t seed = 0;
};

/// sample1 ~ N(0, sigma^2 I), sample2 ~ N(delta, sigma^2 I), n rows each.
/// An empty delta stands for the zero vector (null case).
std::pair<SampleMatrix, SampleMatrix> gen_mean_shift(Eigen::Index d, Eigen::Index n,
                                                     double sigma, const Eigen::VectorXd& delta,
                                                     RngStream& rng);

/// Mean-zero Gaussian pair sharing the diagonal `diag` with constant
/// off-diagonal covariance rho1 (sample 1) and rho2 (sample 2).
std::pair<SampleMatrix, SampleMatrix> gen_cov_diff(Eigen::Index d, Eigen::Index n,
                                                   const Eigen::VectorXd& diag, double rho1,
                                                   double rho2, RngStream& rng);

/// Precision pair Q_k = (D_k - A_k) + delta_k I of two Gaussian graphical
/// models: A1 has iid U(0,1) off-diagonal weights, A2 removes each edge of
/// A1 independently with probability tau (one coin per undirected edge),
/// and D_k is the degree (row-sum) diagonal.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ggm_precision_pair(Eigen::Index d, double tau,
                                                               double delta1, double delta2,
                                                               RngStream& rng);

/// Samples n rows from each graphical model N(0, Q_k^{-1}).
std::pair<SampleMatrix, SampleMatrix> gen_ggm_pair(Eigen::Index d, double tau, double delta1,
                                                   double delta2, Eigen::Index n,
                                                   RngStream& rng);

/// sample1: first coordinate Exp(1), the rest iid N(1,1); sample2: all
/// coordinates iid N(1,1). Equal mean vector and covariance, different
/// first marginal.
std::pair<SampleMatrix, SampleMatrix> gen_marginal_diff(Eigen::Index d, Eigen::Index n,
                                                        RngStream& rng);

/// One raw text document with its binary class label.
struct Document {
    std::string text;
    int label = 0;
};

/// Lowercased alphanumeric token runs, in order of appearance.
std::vector<std::string> tokenize(const std::string& text);

/// Binary presence document-term matrix over the vocabulary of terms whose
/// document frequency is at least min_df (a fraction of all documents),
/// minus remove_terms. Columns are sorted lexicographically.
LabeledDataset build_doc_term_matrix(const std::vector<Document>& corpus, double min_df,
                                     const std::vector<std::string>& remove_terms = {});

/// Draws one (sample1, sample0) pair with spec.n and spec.m rows. For the
/// TextCorpus kind this subsamples rows per class without replacement from
/// spec.corpus; synthetic kinds draw fresh data.
std::pair<SampleMatrix, SampleMatrix> generate_scenario(const ScenarioSpec& spec,
                                                        RngStream& rng);

}  // namespace cpt
