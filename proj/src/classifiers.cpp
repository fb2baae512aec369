#include "cpt/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cpt {

double default_epsilon(Eigen::Index n_train) {
    return 1.0 / (2.0 * static_cast<double>(n_train));
}

namespace detail {

void check_eval_dim(const LabeledDataset& train, const SampleMatrix& eval) {
    if (train.dim() != eval.cols()) {
        throw DimensionMismatch("training data has " + std::to_string(train.dim()) +
                                " features, evaluation data has " + std::to_string(eval.cols()));
    }
}

Eigen::VectorXd clipped(Eigen::VectorXd values, double epsilon) {
    return values.cwiseMax(epsilon).cwiseMin(1.0 - epsilon);
}

}  // namespace detail

namespace {

class KnnClassifier final : public ProbClassifier {
public:
    explicit KnnClassifier(ClassifierSpec spec) : spec_(spec) {}
    ProbEstimate fit_predict(const LabeledDataset& train, const SampleMatrix& eval) const override {
        return knn_proba(spec_.knn_k != 0 ? spec_.knn_k
                                          : static_cast<int>(std::sqrt(static_cast<double>(train.size()))),
                         train, eval);
    }

private:
    ClassifierSpec spec_;
};

class LogisticClassifier final : public ProbClassifier {
public:
    explicit LogisticClassifier(ClassifierSpec spec) : spec_(spec) {}
    ProbEstimate fit_predict(const LabeledDataset& train, const SampleMatrix& eval) const override {
        return logistic_fit_predict(spec_, train, eval);
    }

private:
    ClassifierSpec spec_;
};

class ForestClassifier final : public ProbClassifier {
public:
    explicit ForestClassifier(ClassifierSpec spec) : spec_(spec) {}
    ProbEstimate fit_predict(const LabeledDataset& train, const SampleMatrix& eval) const override {
        return forest_fit_predict(spec_, train, eval);
    }

private:
    ClassifierSpec spec_;
};

}  // namespace

std::unique_ptr<ProbClassifier> make_classifier(const ClassifierSpec& spec) {
    switch (spec.kind) {
        case ClassifierKind::Knn:
            return std::make_unique<KnnClassifier>(spec);
        case ClassifierKind::Logistic:
            return std::make_unique<LogisticClassifier>(spec);
        case ClassifierKind::Forest:
            return std::make_unique<ForestClassifier>(spec);
    }
    throw InvalidArgument("unknown classifier kind");
}

ProbEstimate fit_predict_proba(const ClassifierSpec& spec, const LabeledDataset& train,
                               const SampleMatrix& eval) {
    return make_classifier(spec)->fit_predict(train, eval);
}

ProbEstimate knn_proba(int k, const LabeledDataset& train, const SampleMatrix& eval) {
    detail::check_eval_dim(train, eval);
    const Eigen::Index n_train = train.size();
    if (k < 1 || k > n_train - 1) {
        throw KTooLarge("k = " + std::to_string(k) + " outside [1, " +
                        std::to_string(n_train - 1) + "]");
    }
    const Eigen::MatrixXd& x = train.features().values();
    const auto& labels = train.labels();

    Eigen::VectorXd probs(eval.rows());
    std::vector<std::pair<double, Eigen::Index>> order(static_cast<std::size_t>(n_train));
    for (Eigen::Index e = 0; e < eval.rows(); ++e) {
        const auto point = eval.values().row(e);
        for (Eigen::Index i = 0; i < n_train; ++i) {
            order[static_cast<std::size_t>(i)] = {(x.row(i) - point).squaredNorm(), i};
        }
        std::partial_sort(order.begin(), order.begin() + k, order.end());
        int votes = 0;
        for (int j = 0; j < k; ++j) {
            votes += labels[static_cast<std::size_t>(order[static_cast<std::size_t>(j)].second)];
        }
        probs(e) = static_cast<double>(votes) / static_cast<double>(k);
    }
    const double eps = default_epsilon(n_train);
    return ProbEstimate{detail::clipped(std::move(probs), eps), eps, true};
}

}  // namespace cpt
