#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cpt/errors.hpp"

namespace cpt {

/// Dense observations-by-features table. Rows are observations, columns are
/// features. Construction rejects empty or non-finite input.
class SampleMatrix {
public:
    explicit SampleMatrix(Eigen::MatrixXd values);

    Eigen::Index rows() const { return values_.rows(); }
    Eigen::Index cols() const { return values_.cols(); }
    const Eigen::MatrixXd& values() const { return values_; }

private:
    Eigen::MatrixXd values_;
};

/// Pooled two-sample data with 0/1 labels. Label 1 marks rows from the first
/// sample, label 0 rows from the second. Each row carries a stable id so
/// that fits keyed on ids are invariant under row reordering.
class LabeledDataset {
public:
    LabeledDataset(SampleMatrix features, std::vector<int> labels);
    LabeledDataset(SampleMatrix features, std::vector<int> labels,
                   std::vector<std::int64_t> row_ids);

    const SampleMatrix& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<std::int64_t>& row_ids() const { return row_ids_; }

    Eigen::Index size() const { return features_.rows(); }
    Eigen::Index n_class1() const { return n_class1_; }
    Eigen::Index n_class0() const { return size() - n_class1_; }
    Eigen::Index dim() const { return features_.cols(); }

    /// Empirical P(Y = 1), i.e. n / N.
    double pi_hat() const { return static_cast<double>(n_class1_) / static_cast<double>(size()); }

    /// Same features and ids under a different labeling.
    LabeledDataset relabeled(std::vector<int> labels) const;

private:
    SampleMatrix features_;
    std::vector<int> labels_;
    std::vector<std::int64_t> row_ids_;
    Eigen::Index n_class1_ = 0;
};

/// Stacks two samples into one labeled dataset: sample1 rows get label 1,
/// sample0 rows get label 0.
LabeledDataset pooled(const SampleMatrix& sample1, const SampleMatrix& sample0);

}  // namespace cpt
