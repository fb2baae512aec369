#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cpt/stats.hpp"

namespace cpt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string classifier_label(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::Knn: return "knn";
        case ClassifierKind::Logistic: return "logistic";
        case ClassifierKind::Forest: return "forest";
    }
    return "unknown";
}

}  // namespace

std::string statistic_label(const StatisticKind& kind) {
    switch (kind.tag) {
        case StatisticTag::Cpt1: return "cpt1-" + classifier_label(kind.classifier.kind);
        case StatisticTag::Cpt2: return "cpt2-" + classifier_label(kind.classifier.kind);
        case StatisticTag::Acc: return "acc-" + classifier_label(kind.classifier.kind);
        case StatisticTag::Mmd: return "mmd";
    }
    return "unknown";
}

double statistic_w1(const ProbEstimate& probs, Eigen::Index n, Eigen::Index m) {
    if (n < 1 || m < 1) {
        throw InvalidArgument("statistic_w1 needs n >= 1 and m >= 1");
    }
    if (probs.values.size() != n) {
        throw LengthMismatch("statistic_w1: got " + std::to_string(probs.values.size()) +
                             " probabilities for n = " + std::to_string(n) + " label-1 rows");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = probs.values(i);
        sum += std::log(p) - std::log1p(-p);
    }
    return sum / static_cast<double>(n) -
           std::log(static_cast<double>(n) / static_cast<double>(m));
}

double statistic_w2(const ProbEstimate& probs) {
    const Eigen::Index total = probs.values.size();
    if (total < 2) {
        throw LengthMismatch("statistic_w2 needs at least 2 probabilities, got " +
                             std::to_string(total));
    }
    const double mean = probs.values.mean();
    return (probs.values.array() - mean).square().sum() / static_cast<double>(total);
}

double statistic_u(const OracleModel& oracle, const SampleMatrix& class1_points) {
    const Eigen::MatrixXd& x = class1_points.values();
    double sum = 0.0;
    bool outside_g = false;
    Eigen::RowVectorXd row(x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        row = x.row(i);
        const double lf = oracle.log_density_f(row);
        if (lf == -kInf) {
            throw PointOutsideSupportOfF("class-1 point " + std::to_string(i) +
                                         " has zero density under f");
        }
        const double lg = oracle.log_density_g(row);
        if (lg == -kInf) {
            outside_g = true;  // keep scanning: an f-support violation still errors
        } else if (!outside_g) {
            sum += lf - lg;
        }
    }
    return outside_g ? kInf : sum / static_cast<double>(x.rows());
}

double statistic_v(const OracleModel& oracle, const SampleMatrix& class0_points) {
    const Eigen::MatrixXd& x = class0_points.values();
    double sum = 0.0;
    bool outside_f = false;
    Eigen::RowVectorXd row(x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        row = x.row(i);
        const double lg = oracle.log_density_g(row);
        if (lg == -kInf) {
            // mirror contract: class-0 points must lie in the support of
            // their own component, which here plays the role of f
            throw PointOutsideSupportOfF("class-0 point " + std::to_string(i) +
                                         " has zero density under g");
        }
        const double lf = oracle.log_density_f(row);
        if (lf == -kInf) {
            outside_f = true;
        } else if (!outside_f) {
            sum += lg - lf;
        }
    }
    return outside_f ? kInf : sum / static_cast<double>(x.rows());
}

std::vector<int> stratified_fold_assignment(const std::vector<int>& labels, int folds,
                                            RngStream& rng) {
    if (folds < 2) {
        throw InvalidArgument("cross-validation needs at least 2 folds");
    }
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i] == 1 ? 1 : 0].push_back(i);
    }
    for (int c : {1, 0}) {
        if (by_class[c].size() < static_cast<std::size_t>(folds)) {
            throw FoldTooSmall("class " + std::to_string(c) + " has " +
                               std::to_string(by_class[c].size()) + " rows, fewer than " +
                               std::to_string(folds) + " folds");
        }
    }
    std::vector<int> fold(labels.size(), 0);
    for (int c : {1, 0}) {
        std::vector<std::size_t>& rows = by_class[c];
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            const std::uint64_t j = i + rng.below(rows.size() - i);
            std::swap(rows[i], rows[j]);
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            fold[rows[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
        }
    }
    return fold;
}

double statistic_acc(const ProbClassifier& classifier, const LabeledDataset& data, int folds,
                     RngStream& rng) {
    const std::vector<int> fold = stratified_fold_assignment(data.labels(), folds, rng);
    const Eigen::MatrixXd& x = data.features().values();

    double accuracy_sum = 0.0;
    for (int k = 0; k < folds; ++k) {
        std::vector<Eigen::Index> train_rows;
        std::vector<Eigen::Index> test_rows;
        for (Eigen::Index i = 0; i < data.size(); ++i) {
            (fold[static_cast<std::size_t>(i)] == k ? test_rows : train_rows).push_back(i);
        }

        Eigen::MatrixXd train_x(static_cast<Eigen::Index>(train_rows.size()), data.dim());
        std::vector<int> train_y(train_rows.size());
        std::vector<std::int64_t> train_ids(train_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            train_x.row(static_cast<Eigen::Index>(i)) = x.row(train_rows[i]);
            train_y[i] = data.labels()[static_cast<std::size_t>(train_rows[i])];
            train_ids[i] = data.row_ids()[static_cast<std::size_t>(train_rows[i])];
        }
        Eigen::MatrixXd test_x(static_cast<Eigen::Index>(test_rows.size()), data.dim());
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            test_x.row(static_cast<Eigen::Index>(i)) = x.row(test_rows[i]);
        }

        const LabeledDataset train(SampleMatrix(std::move(train_x)), std::move(train_y),
                                   std::move(train_ids));
        const ProbEstimate probs = classifier.fit_predict(train, SampleMatrix(std::move(test_x)));

        Eigen::Index correct = 0;
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            const int predicted = probs.values(static_cast<Eigen::Index>(i)) >= 0.5 ? 1 : 0;
            correct += predicted == data.labels()[static_cast<std::size_t>(test_rows[i])];
        }
        accuracy_sum += static_cast<double>(correct) / static_cast<double>(test_rows.size());
    }
    return accuracy_sum / folds;
}

double statistic_acc(const ClassifierSpec& spec, const LabeledDataset& data, int folds,
                     RngStream& rng) {
    return statistic_acc(*make_classifier(spec), data, folds, rng);
}

double median_heuristic_bandwidth(const SampleMatrix& pooled) {
    const Eigen::MatrixXd& x = pooled.values();
    const Eigen::Index total = x.rows();
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(total * (total - 1) / 2));
    for (Eigen::Index i = 0; i < total; ++i) {
        for (Eigen::Index j = i + 1; j < total; ++j) {
            dist.push_back((x.row(i) - x.row(j)).norm());
        }
    }
    if (dist.empty()) {
        throw DegenerateBandwidth("median heuristic needs at least two pooled rows");
    }
    std::sort(dist.begin(), dist.end());
    const std::size_t half = dist.size() / 2;
    const double median =
        dist.size() % 2 == 1 ? dist[half] : 0.5 * (dist[half - 1] + dist[half]);
    if (median <= 0.0) {
        throw DegenerateBandwidth("median pairwise distance is zero; all points coincide");
    }
    return median;
}

double statistic_mmd(const SampleMatrix& sample1, const SampleMatrix& sample0,
                     double bandwidth) {
    if (sample1.cols() != sample0.cols()) {
        throw DimensionMismatch("statistic_mmd: samples have " + std::to_string(sample1.cols()) +
                                " and " + std::to_string(sample0.cols()) + " columns");
    }
    const Eigen::Index n = sample1.rows();
    const Eigen::Index m = sample0.rows();
    if (n < 2 || m < 2) {
        throw InvalidArgument(
            "statistic_mmd needs at least two rows per sample (off-diagonal means)");
    }
    if (bandwidth <= 0.0) {
        Eigen::MatrixXd stacked(n + m, sample1.cols());
        stacked.topRows(n) = sample1.values();
        stacked.bottomRows(m) = sample0.values();
        bandwidth = median_heuristic_bandwidth(SampleMatrix(std::move(stacked)));
    }
    const double scale = -0.5 / (bandwidth * bandwidth);
    const Eigen::MatrixXd& a = sample1.values();
    const Eigen::MatrixXd& b = sample0.values();

    double within1 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            within1 += std::exp(scale * (a.row(i) - a.row(j)).squaredNorm());
        }
    }
    double within0 = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            within0 += std::exp(scale * (b.row(i) - b.row(j)).squaredNorm());
        }
    }
    double cross = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            cross += std::exp(scale * (a.row(i) - b.row(j)).squaredNorm());
        }
    }
    return 2.0 * within1 / (static_cast<double>(n) * static_cast<double>(n - 1)) +
           2.0 * within0 / (static_cast<double>(m) * static_cast<double>(m - 1)) -
           2.0 * cross / (static_cast<double>(n) * static_cast<double>(m));
}

}  // namespace cpt
