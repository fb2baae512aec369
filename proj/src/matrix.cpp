#include "cpt/matrix.hpp"

#include <numeric>
#include <string>
#include <utility>

namespace cpt {

SampleMatrix::SampleMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw InvalidArgument("SampleMatrix needs at least one row and one column");
    }
    if (!values_.allFinite()) {
        throw InvalidArgument("SampleMatrix entries must be finite");
    }
}

LabeledDataset::LabeledDataset(SampleMatrix features, std::vector<int> labels)
    : LabeledDataset(std::move(features), std::move(labels), {}) {}

LabeledDataset::LabeledDataset(SampleMatrix features, std::vector<int> labels,
                               std::vector<std::int64_t> row_ids)
    : features_(std::move(features)), labels_(std::move(labels)), row_ids_(std::move(row_ids)) {
    const auto n_rows = static_cast<std::size_t>(features_.rows());
    if (labels_.size() != n_rows) {
        throw LengthMismatch("label count " + std::to_string(labels_.size()) +
                             " does not match row count " + std::to_string(n_rows));
    }
    if (row_ids_.empty()) {
        row_ids_.resize(n_rows);
        std::iota(row_ids_.begin(), row_ids_.end(), std::int64_t{0});
    } else if (row_ids_.size() != n_rows) {
        throw LengthMismatch("row id count does not match row count");
    }
    for (int label : labels_) {
        if (label != 0 && label != 1) {
            throw InvalidArgument("labels must be 0 or 1");
        }
        n_class1_ += label;
    }
    if (n_class1_ == 0 || n_class1_ == features_.rows()) {
        throw SingleClassTrainingSet("dataset must contain both classes");
    }
}

LabeledDataset LabeledDataset::relabeled(std::vector<int> labels) const {
    return LabeledDataset(features_, std::move(labels), row_ids_);
}

LabeledDataset pooled(const SampleMatrix& sample1, const SampleMatrix& sample0) {
    if (sample1.cols() != sample0.cols()) {
        throw DimensionMismatch("samples have " + std::to_string(sample1.cols()) + " and " +
                                std::to_string(sample0.cols()) + " columns");
    }
    Eigen::MatrixXd stacked(sample1.rows() + sample0.rows(), sample1.cols());
    stacked.topRows(sample1.rows()) = sample1.values();
    stacked.bottomRows(sample0.rows()) = sample0.values();
    std::vector<int> labels(static_cast<std::size_t>(stacked.rows()), 0);
    std::fill(labels.begin(), labels.begin() + sample1.rows(), 1);
    return LabeledDataset(SampleMatrix(std::move(stacked)), std::move(labels));
}

}  // namespace cpt
