#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "cpt/parallel.hpp"
#include "cpt/permutation.hpp"

namespace cpt {

namespace {

class Cpt1Evaluator : public StatisticEvaluator {
public:
    Cpt1Evaluator(const LabeledDataset& data, std::shared_ptr<const ProbClassifier> classifier)
        : base_(data), classifier_(std::move(classifier)) {}

    double evaluate(const std::vector<int>& labels, RngStream&) const override {
        const LabeledDataset train = base_.relabeled(labels);
        const ProbEstimate probs = classifier_->fit_predict(train, base_.features());
        Eigen::VectorXd class1(train.n_class1());
        Eigen::Index at = 0;
        for (Eigen::Index i = 0; i < base_.size(); ++i) {
            if (labels[static_cast<std::size_t>(i)] == 1) {
                class1(at++) = probs.values(i);
            }
        }
        const ProbEstimate restricted{std::move(class1), probs.epsilon, probs.converged};
        return statistic_w1(restricted, train.n_class1(), train.n_class0());
    }

private:
    LabeledDataset base_;
    std::shared_ptr<const ProbClassifier> classifier_;
};

class Cpt2Evaluator : public StatisticEvaluator {
public:
    Cpt2Evaluator(const LabeledDataset& data, std::shared_ptr<const ProbClassifier> classifier)
        : base_(data), classifier_(std::move(classifier)) {}

    double evaluate(const std::vector<int>& labels, RngStream&) const override {
        const LabeledDataset train = base_.relabeled(labels);
        return statistic_w2(classifier_->fit_predict(train, base_.features()));
    }

private:
    LabeledDataset base_;
    std::shared_ptr<const ProbClassifier> classifier_;
};

class AccEvaluator : public StatisticEvaluator {
public:
    AccEvaluator(const LabeledDataset& data, std::shared_ptr<const ProbClassifier> classifier,
                 int folds)
        : base_(data), classifier_(std::move(classifier)), folds_(folds) {}

    double evaluate(const std::vector<int>& labels, RngStream& rng) const override {
        return statistic_acc(*classifier_, base_.relabeled(labels), folds_, rng);
    }

private:
    LabeledDataset base_;
    std::shared_ptr<const ProbClassifier> classifier_;
    int folds_;
};

class MmdEvaluator : public StatisticEvaluator {
public:
    MmdEvaluator(const LabeledDataset& data, double bandwidth) {
        if (data.n_class1() < 2 || data.n_class0() < 2) {
            throw InvalidArgument(
                "statistic_mmd needs at least two rows per sample (off-diagonal means)");
        }
        if (bandwidth <= 0.0) {
            // the median heuristic sees only the pooled rows, so it is
            // invariant under relabeling and safe to freeze here
            bandwidth = median_heuristic_bandwidth(data.features());
        }
        const double scale = -0.5 / (bandwidth * bandwidth);
        const Eigen::MatrixXd& x = data.features().values();
        kernel_.resize(x.rows(), x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            kernel_(i, i) = 1.0;
            for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
                const double k = std::exp(scale * (x.row(i) - x.row(j)).squaredNorm());
                kernel_(i, j) = k;
                kernel_(j, i) = k;
            }
        }
    }

    double evaluate(const std::vector<int>& labels, RngStream&) const override {
        const auto total = static_cast<Eigen::Index>(labels.size());
        double within1 = 0.0;
        double within0 = 0.0;
        double cross = 0.0;
        Eigen::Index ones = 0;
        for (Eigen::Index i = 0; i < total; ++i) {
            ones += labels[static_cast<std::size_t>(i)];
            for (Eigen::Index j = i + 1; j < total; ++j) {
                const int pair = labels[static_cast<std::size_t>(i)] +
                                 labels[static_cast<std::size_t>(j)];
                (pair == 2 ? within1 : pair == 0 ? within0 : cross) += kernel_(i, j);
            }
        }
        const double n = static_cast<double>(ones);
        const double m = static_cast<double>(total - ones);
        return 2.0 * within1 / (n * (n - 1.0)) + 2.0 * within0 / (m * (m - 1.0)) -
               2.0 * cross / (n * m);
    }

private:
    Eigen::MatrixXd kernel_;
};

}  // namespace

std::unique_ptr<StatisticEvaluator> make_cpt1_evaluator(
    const LabeledDataset& data, std::shared_ptr<const ProbClassifier> classifier) {
    return std::make_unique<Cpt1Evaluator>(data, std::move(classifier));
}

std::unique_ptr<StatisticEvaluator> make_cpt2_evaluator(
    const LabeledDataset& data, std::shared_ptr<const ProbClassifier> classifier) {
    return std::make_unique<Cpt2Evaluator>(data, std::move(classifier));
}

std::unique_ptr<StatisticEvaluator> make_acc_evaluator(
    const LabeledDataset& data, std::shared_ptr<const ProbClassifier> classifier, int folds) {
    return std::make_unique<AccEvaluator>(data, std::move(classifier), folds);
}

std::unique_ptr<StatisticEvaluator> make_evaluator(const LabeledDataset& data,
                                                   const StatisticKind& kind) {
    switch (kind.tag) {
        case StatisticTag::Cpt1:
            return make_cpt1_evaluator(data, make_classifier(kind.classifier));
        case StatisticTag::Cpt2:
            return make_cpt2_evaluator(data, make_classifier(kind.classifier));
        case StatisticTag::Acc:
            return make_acc_evaluator(data, make_classifier(kind.classifier), kind.acc_folds);
        case StatisticTag::Mmd:
            return std::make_unique<MmdEvaluator>(data, kind.mmd_bandwidth);
    }
    throw InvalidArgument("unknown statistic kind");
}

std::vector<int> random_relabeling(Eigen::Index total, Eigen::Index ones, RngStream& rng) {
    if (total < 1 || ones < 0 || ones > total) {
        throw InvalidArgument("random_relabeling needs 0 <= ones <= total");
    }
    std::vector<Eigen::Index> index(static_cast<std::size_t>(total));
    std::iota(index.begin(), index.end(), 0);
    std::vector<int> labels(static_cast<std::size_t>(total), 0);
    for (Eigen::Index i = 0; i < ones; ++i) {
        const auto j = i + static_cast<Eigen::Index>(
                               rng.below(static_cast<std::uint64_t>(total - i)));
        std::swap(index[static_cast<std::size_t>(i)], index[static_cast<std::size_t>(j)]);
        labels[static_cast<std::size_t>(index[static_cast<std::size_t>(i)])] = 1;
    }
    return labels;
}

double permutation_p_value(const std::vector<double>& null_sample, double observed) {
    std::size_t at_least = 0;
    for (double value : null_sample) {
        at_least += value >= observed;
    }
    return static_cast<double>(1 + at_least) / static_cast<double>(null_sample.size() + 1);
}

double permutation_critical_value(std::vector<double> null_sample, double alpha) {
    if (null_sample.empty()) {
        throw EmptyInput("permutation_critical_value needs a nonempty null sample");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1)");
    }
    const auto count = static_cast<std::ptrdiff_t>(null_sample.size());
    // rank = ceil((1-alpha)(B+1)) written as B+1-floor(alpha(B+1)): the same
    // integer for all alpha, and exactly consistent with the add-one p-value
    const auto tail = static_cast<std::ptrdiff_t>(
        std::floor(alpha * static_cast<double>(count + 1)));
    if (tail < 1) {
        return std::numeric_limits<double>::infinity();  // alpha below 1/(B+1)
    }
    const std::ptrdiff_t rank = count + 1 - tail;
    std::sort(null_sample.begin(), null_sample.end());
    return null_sample[static_cast<std::size_t>(rank - 1)];
}

std::vector<double> p_value_ecdf(const std::vector<double>& p_values,
                                 const std::vector<double>& grid) {
    if (p_values.empty()) {
        throw EmptyInput("p_value_ecdf needs at least one p-value");
    }
    std::vector<double> ecdf;
    ecdf.reserve(grid.size());
    for (double alpha : grid) {
        std::size_t hits = 0;
        for (double p : p_values) {
            hits += p <= alpha;
        }
        ecdf.push_back(static_cast<double>(hits) / static_cast<double>(p_values.size()));
    }
    return ecdf;
}

TestResult run_permutation_test(const LabeledDataset& data, const StatisticEvaluator& evaluator,
                                const StatisticKind& kind, int B, double alpha,
                                const RngStream& rng, int threads) {
    if (B < 1) {
        throw InvalidArgument("permutation count B must be at least 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1)");
    }
    const std::uint64_t master = rng.derive(0).seed();

    TestResult result;
    result.statistic_kind = kind;
    result.alpha = alpha;
    result.num_permutations = B;
    result.seed = master;

    RngStream observed_rng(master, 0);
    result.observed = evaluator.evaluate(data.labels(), observed_rng);

    std::vector<double> nulls(static_cast<std::size_t>(B));
    const Eigen::Index total = data.size();
    const Eigen::Index ones = data.n_class1();
    parallel_for(threads, B, [&](int j) {
        RngStream rep(master, static_cast<std::uint64_t>(j) + 1);
        const std::vector<int> labels = random_relabeling(total, ones, rep);
        nulls[static_cast<std::size_t>(j)] = evaluator.evaluate(labels, rep);
    });
    std::sort(nulls.begin(), nulls.end());

    result.p_value = permutation_p_value(nulls, result.observed);
    result.critical_value = permutation_critical_value(nulls, alpha);
    result.null_sample = std::move(nulls);
    return result;
}

TestResult permutation_test(const LabeledDataset& data, const StatisticKind& kind, int B,
                            double alpha, const RngStream& rng, int threads) {
    const std::unique_ptr<StatisticEvaluator> evaluator = make_evaluator(data, kind);
    return run_permutation_test(data, *evaluator, kind, B, alpha, rng, threads);
}

}  // namespace cpt
