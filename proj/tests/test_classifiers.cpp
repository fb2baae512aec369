#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cpt/classifiers.hpp"
#include "cpt/rng.hpp"
#include "doctest.h"

using cpt::ClassifierKind;
using cpt::ClassifierSpec;
using cpt::LabeledDataset;
using cpt::ProbEstimate;
using cpt::RngStream;
using cpt::SampleMatrix;

namespace {

// 1-D training set from column values; labels supplied by the caller.
LabeledDataset line_data(const std::vector<double>& xs, const std::vector<int>& labels) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m(static_cast<Eigen::Index>(i), 0) = xs[i];
    }
    return LabeledDataset(SampleMatrix(m), labels);
}

SampleMatrix single_point(double x) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = x;
    return SampleMatrix(m);
}

// Two well-separated Gaussian blobs in 2-D: class 1 near (+series), class 0
// near (-series). Returned rows are interleaved so neither class is a
// contiguous block.
LabeledDataset blob_data(int per_class, double gap, std::uint64_t seed) {
    RngStream rng(seed, 0);
    Eigen::MatrixXd x(2 * per_class, 2);
    std::vector<int> labels(static_cast<std::size_t>(2 * per_class));
    for (int i = 0; i < 2 * per_class; ++i) {
        const int label = i % 2;
        const double center = label == 1 ? gap : -gap;
        x(i, 0) = center + rng.normal();
        x(i, 1) = center + rng.normal();
        labels[static_cast<std::size_t>(i)] = label;
    }
    return LabeledDataset(SampleMatrix(x), labels);
}

// XOR layout: four clusters at (+-1, +-1) with sd 0.3; label 1 where the
// coordinate signs agree. Linearly inseparable but easy for a forest.
LabeledDataset xor_data(int per_cluster, std::uint64_t seed) {
    RngStream rng(seed, 0);
    Eigen::MatrixXd x(4 * per_cluster, 2);
    std::vector<int> labels;
    int row = 0;
    for (int cx = 0; cx < 2; ++cx) {
        for (int cy = 0; cy < 2; ++cy) {
            for (int i = 0; i < per_cluster; ++i, ++row) {
                x(row, 0) = (cx != 0 ? 1.0 : -1.0) + 0.3 * rng.normal();
                x(row, 1) = (cy != 0 ? 1.0 : -1.0) + 0.3 * rng.normal();
                labels.push_back(cx == cy ? 1 : 0);
            }
        }
    }
    return LabeledDataset(SampleMatrix(x), labels);
}

// Applies one row permutation to features, labels, and ids together.
LabeledDataset permuted_copy(const LabeledDataset& data, const std::vector<Eigen::Index>& perm) {
    Eigen::MatrixXd x(data.size(), data.dim());
    std::vector<int> labels(static_cast<std::size_t>(data.size()));
    std::vector<std::int64_t> ids(static_cast<std::size_t>(data.size()));
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const Eigen::Index src = perm[static_cast<std::size_t>(i)];
        x.row(i) = data.features().values().row(src);
        labels[static_cast<std::size_t>(i)] = data.labels()[static_cast<std::size_t>(src)];
        ids[static_cast<std::size_t>(i)] = data.row_ids()[static_cast<std::size_t>(src)];
    }
    return LabeledDataset(SampleMatrix(x), labels, ids);
}

}  // namespace

TEST_CASE("knn k=1 memorizes a label-1 training point") {
    const LabeledDataset train = line_data({0.0, 10.0}, {1, 0});
    const ProbEstimate est = cpt::knn_proba(1, train, single_point(1.0));
    // Nearest neighbor of x=1 is the label-1 point at 0; clipped to 1-eps.
    CHECK(est.epsilon == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(est.values(0) == doctest::Approx(0.75).epsilon(1e-15));

    const ProbEstimate other = cpt::knn_proba(1, train, single_point(9.0));
    CHECK(other.values(0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("knn votes over the three nearest points on a line") {
    // Points at x = 0..4 with labels (1,1,0,0,0); evaluated at x=1 the three
    // nearest are x=1, x=0, x=2 (tie between 0 and 2 is irrelevant at k=3),
    // giving votes 1,1,0.
    const LabeledDataset train = line_data({0, 1, 2, 3, 4}, {1, 1, 0, 0, 0});
    const ProbEstimate est = cpt::knn_proba(3, train, single_point(1.0));
    CHECK(est.values(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("knn distance ties go to the lowest training row index") {
    // Four corners of a square, all equidistant from the center. With k=3
    // the excluded point must be the highest index, so labels (1,1,0,0)
    // yield votes 1,1,0.
    Eigen::MatrixXd corners(4, 2);
    corners << 1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0;
    const LabeledDataset train(SampleMatrix(corners), {1, 1, 0, 0});
    const SampleMatrix center(Eigen::MatrixXd::Zero(1, 2));

    const ProbEstimate est = cpt::knn_proba(3, train, center);
    CHECK(est.values(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    // k = N-1 with labels (0,1,1,1): excluding the last point leaves votes
    // 0,1,1, again pinned by the index tie-break.
    const LabeledDataset flipped(SampleMatrix(corners), {0, 1, 1, 1});
    CHECK(cpt::knn_proba(3, flipped, center).values(0) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("knn rejects k outside [1, N-1]") {
    const LabeledDataset train = line_data({0, 1, 2, 3}, {1, 1, 0, 0});
    CHECK_THROWS_AS(cpt::knn_proba(0, train, single_point(0.0)), cpt::KTooLarge);
    CHECK_THROWS_AS(cpt::knn_proba(4, train, single_point(0.0)), cpt::KTooLarge);
    CHECK_THROWS_AS(cpt::knn_proba(-2, train, single_point(0.0)), cpt::KTooLarge);
    CHECK_NOTHROW(cpt::knn_proba(3, train, single_point(0.0)));
}

TEST_CASE("knn dimension mismatch is reported") {
    const LabeledDataset train = line_data({0, 1, 2, 3}, {1, 1, 0, 0});
    const SampleMatrix wide(Eigen::MatrixXd::Zero(1, 2));
    CHECK_THROWS_AS(cpt::knn_proba(1, train, wide), cpt::DimensionMismatch);
}

TEST_CASE("spec k=0 means floor(sqrt(N)) neighbors") {
    // N = 10 -> k = 3. Compare the dispatched estimate against an explicit
    // knn_proba call on a few evaluation points.
    const LabeledDataset train =
        line_data({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {1, 1, 1, 1, 1, 0, 0, 0, 0, 0});
    Eigen::MatrixXd eval(3, 1);
    eval << 0.2, 4.6, 8.1;

    ClassifierSpec spec;
    spec.kind = ClassifierKind::Knn;
    spec.knn_k = 0;
    const ProbEstimate via_spec = cpt::fit_predict_proba(spec, train, SampleMatrix(eval));
    const ProbEstimate direct = cpt::knn_proba(3, train, SampleMatrix(eval));
    CHECK(via_spec.values == direct.values);
}

TEST_CASE("logistic with zero features returns the class frequency") {
    const SampleMatrix zeros(Eigen::MatrixXd::Zero(6, 2));
    const LabeledDataset balanced(zeros, {1, 0, 1, 0, 1, 0});

    ClassifierSpec spec;
    spec.kind = ClassifierKind::Logistic;
    const ProbEstimate est = cpt::logistic_fit_predict(spec, balanced, zeros);
    CHECK(est.converged);
    for (Eigen::Index i = 0; i < est.values.size(); ++i) {
        CHECK(est.values(i) == doctest::Approx(0.5).epsilon(1e-9));
    }

    // Unbalanced case: the unpenalized intercept still matches n/N.
    const LabeledDataset skewed(zeros, {1, 0, 0, 0, 0, 0});
    const ProbEstimate skew_est = cpt::logistic_fit_predict(spec, skewed, zeros);
    CHECK(skew_est.converged);
    CHECK(skew_est.values(0) == doctest::Approx(1.0 / 6.0).epsilon(1e-5));
}

TEST_CASE("logistic estimates are monotone on separated 1-D data") {
    const LabeledDataset train =
        line_data({-3, -2.5, -2, -1.5, 1.5, 2, 2.5, 3}, {0, 0, 0, 0, 1, 1, 1, 1});
    Eigen::MatrixXd grid(13, 1);
    for (int i = 0; i < 13; ++i) grid(i, 0) = -3.0 + 0.5 * i;

    ClassifierSpec spec;
    spec.kind = ClassifierKind::Logistic;
    spec.logistic_l2 = 1.0;
    const ProbEstimate est = cpt::logistic_fit_predict(spec, train, SampleMatrix(grid));
    for (int i = 1; i < 13; ++i) {
        CHECK(est.values(i) > est.values(i - 1));
    }
    CHECK(est.values(0) < 0.5);
    CHECK(est.values(12) > 0.5);
}

TEST_CASE("logistic objective decreases along accepted steps") {
    const LabeledDataset train = blob_data(40, 1.0, 11);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Logistic;
    const cpt::LogisticModel model = cpt::fit_logistic(spec, train);
    REQUIRE(model.objective_trace.size() > 1);
    for (std::size_t i = 1; i < model.objective_trace.size(); ++i) {
        CHECK(model.objective_trace[i] < model.objective_trace[i - 1]);
    }
    CHECK(model.converged);
    CHECK(model.iterations >= 1);
}

TEST_CASE("logistic analytic gradient matches central differences") {
    RngStream rng(55, 0);
    for (int trial = 0; trial < 5; ++trial) {
        const int rows = 12;
        const int cols = 3;
        Eigen::MatrixXd x(rows, cols);
        std::vector<int> labels;
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) x(i, j) = rng.normal();
            labels.push_back(i % 2);
        }
        const LabeledDataset data(SampleMatrix(x), labels);
        const double l2 = 0.3;

        Eigen::VectorXd w(cols);
        for (int j = 0; j < cols; ++j) w(j) = rng.normal();
        const double b = rng.normal();

        Eigen::VectorXd grad_w(cols);
        double grad_b = 0.0;
        cpt::logistic_gradient(w, b, data, l2, grad_w, grad_b);

        const double h = 1e-6;
        for (int j = 0; j < cols; ++j) {
            Eigen::VectorXd lo = w, hi = w;
            lo(j) -= h;
            hi(j) += h;
            const double numeric = (cpt::logistic_objective(hi, b, data, l2) -
                                    cpt::logistic_objective(lo, b, data, l2)) /
                                   (2.0 * h);
            CHECK(grad_w(j) == doctest::Approx(numeric).epsilon(1e-6));
        }
        const double numeric_b = (cpt::logistic_objective(w, b + h, data, l2) -
                                  cpt::logistic_objective(w, b - h, data, l2)) /
                                 (2.0 * h);
        CHECK(grad_b == doctest::Approx(numeric_b).epsilon(1e-6));
    }
}

TEST_CASE("logistic recovers the true posterior on 1-D mean-shift data") {
    // Class 1 ~ N(1,1), class 0 ~ N(0,1), equal sizes: the true posterior
    // is sigmoid(x - 1/2). At N=4000 the fit should sit within 0.05 of the
    // truth across a grid spanning both bulks.
    RngStream rng(313, 0);
    const int half = 2000;
    Eigen::MatrixXd x(2 * half, 1);
    std::vector<int> labels;
    for (int i = 0; i < half; ++i) {
        x(i, 0) = 1.0 + rng.normal();
        labels.push_back(1);
    }
    for (int i = 0; i < half; ++i) {
        x(half + i, 0) = rng.normal();
        labels.push_back(0);
    }
    const LabeledDataset train(SampleMatrix(x), labels);

    Eigen::MatrixXd grid(11, 1);
    for (int i = 0; i < 11; ++i) grid(i, 0) = -2.0 + 0.5 * i;
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Logistic;
    const ProbEstimate est = cpt::logistic_fit_predict(spec, train, SampleMatrix(grid));
    CHECK(est.converged);
    for (int i = 0; i < 11; ++i) {
        const double truth = 1.0 / (1.0 + std::exp(-(grid(i, 0) - 0.5)));
        CHECK(std::abs(est.values(i) - truth) < 0.05);
    }
}

TEST_CASE("single root-leaf tree returns the class frequency everywhere") {
    const LabeledDataset train =
        line_data({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {1, 0, 0, 1, 0, 0, 1, 0, 1, 0});
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Forest;
    spec.forest_trees = 1;
    spec.forest_min_leaf = 10;  // the root already satisfies the leaf bound

    Eigen::MatrixXd eval(3, 1);
    eval << -5.0, 4.5, 100.0;
    const ProbEstimate est = cpt::forest_fit_predict(spec, train, SampleMatrix(eval));
    for (int i = 0; i < 3; ++i) {
        CHECK(est.values(i) == doctest::Approx(0.4).epsilon(1e-15));
    }
}

TEST_CASE("forest memorizes well-separated clusters") {
    const LabeledDataset train = blob_data(30, 10.0, 21);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Forest;
    spec.forest_trees = 50;
    spec.forest_min_leaf = 1;
    spec.seed = 5;

    const ProbEstimate est = cpt::forest_fit_predict(spec, train, train.features());
    for (Eigen::Index i = 0; i < train.size(); ++i) {
        if (train.labels()[static_cast<std::size_t>(i)] == 1) {
            CHECK(est.values(i) > 0.95);
        } else {
            CHECK(est.values(i) < 0.05);
        }
    }
}

TEST_CASE("forest learns the XOR pattern out of bag") {
    // Linearly inseparable four-cluster layout; the interaction is easy for
    // axis-aligned trees, so out-of-bag error should be far below chance.
    const LabeledDataset train = xor_data(100, 900);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Forest;
    spec.forest_trees = 200;
    spec.forest_min_leaf = 10;
    spec.seed = 0;
    CHECK(cpt::forest_oob_error(spec, train) < 0.1);
}

TEST_CASE("forest fits are invariant under row reordering") {
    const LabeledDataset train = xor_data(25, 77);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(train.size()));
    std::iota(perm.begin(), perm.end(), 0);
    // Deterministic shuffle so the test never flakes.
    RngStream rng(123, 0);
    for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.below(i))]);
    }
    const LabeledDataset shuffled = permuted_copy(train, perm);

    ClassifierSpec spec;
    spec.kind = ClassifierKind::Forest;
    spec.forest_trees = 30;
    spec.forest_min_leaf = 5;
    spec.seed = 9;

    Eigen::MatrixXd eval(5, 2);
    eval << 0.0, 0.0, 1.0, 1.0, -1.0, 1.0, 0.5, -0.5, -1.2, -0.8;
    const ProbEstimate a = cpt::forest_fit_predict(spec, train, SampleMatrix(eval));
    const ProbEstimate b = cpt::forest_fit_predict(spec, shuffled, SampleMatrix(eval));
    CHECK(a.values == b.values);
}

TEST_CASE("knn and logistic are invariant under row reordering") {
    const LabeledDataset train = blob_data(20, 1.5, 31);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(train.size()));
    std::iota(perm.begin(), perm.end(), 0);
    RngStream rng(321, 0);
    for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.below(i))]);
    }
    const LabeledDataset shuffled = permuted_copy(train, perm);

    Eigen::MatrixXd eval(4, 2);
    eval << 0.3, -0.1, 1.4, 1.1, -0.7, 0.2, 2.0, -2.0;
    const SampleMatrix grid(eval);

    CHECK(cpt::knn_proba(5, train, grid).values == cpt::knn_proba(5, shuffled, grid).values);

    ClassifierSpec spec;
    spec.kind = ClassifierKind::Logistic;
    const ProbEstimate la = cpt::logistic_fit_predict(spec, train, grid);
    const ProbEstimate lb = cpt::logistic_fit_predict(spec, shuffled, grid);
    CHECK((la.values - lb.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("equal spec and data give bit-equal estimates") {
    const LabeledDataset train = xor_data(20, 41);
    Eigen::MatrixXd eval(3, 2);
    eval << 0.1, 0.2, -1.0, 0.5, 0.9, -0.9;
    const SampleMatrix grid(eval);

    for (ClassifierKind kind :
         {ClassifierKind::Knn, ClassifierKind::Logistic, ClassifierKind::Forest}) {
        ClassifierSpec spec;
        spec.kind = kind;
        spec.forest_trees = 25;
        spec.seed = 17;
        const ProbEstimate a = cpt::fit_predict_proba(spec, train, grid);
        const ProbEstimate b = cpt::fit_predict_proba(spec, train, grid);
        CHECK(a.values == b.values);
    }

    // A different forest seed must change something.
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Forest;
    spec.forest_trees = 25;
    spec.seed = 17;
    const ProbEstimate a = cpt::fit_predict_proba(spec, train, grid);
    spec.seed = 18;
    const ProbEstimate b = cpt::fit_predict_proba(spec, train, grid);
    CHECK(a.values != b.values);
}

TEST_CASE("all classifiers clip into [eps, 1-eps]") {
    const LabeledDataset train = blob_data(25, 8.0, 61);
    const double eps = cpt::default_epsilon(train.size());
    CHECK(eps == doctest::Approx(0.01).epsilon(1e-15));

    Eigen::MatrixXd eval(4, 2);
    eval << 9.0, 9.0, -9.0, -9.0, 0.0, 0.0, 30.0, -30.0;
    const SampleMatrix grid(eval);

    for (ClassifierKind kind :
         {ClassifierKind::Knn, ClassifierKind::Logistic, ClassifierKind::Forest}) {
        ClassifierSpec spec;
        spec.kind = kind;
        spec.knn_k = 1;
        spec.forest_trees = 40;
        spec.forest_min_leaf = 1;
        const ProbEstimate est = cpt::fit_predict_proba(spec, train, grid);
        CHECK(est.epsilon == doctest::Approx(eps).epsilon(1e-15));
        CHECK(est.values.size() == 4);
        for (Eigen::Index i = 0; i < est.values.size(); ++i) {
            CHECK(est.values(i) >= eps);
            CHECK(est.values(i) <= 1.0 - eps);
        }
    }

    // The deep-forest estimate at a far label-1 point actually hits the
    // clip boundary, so the bound above is not vacuous.
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Knn;
    spec.knn_k = 1;
    const ProbEstimate est = cpt::fit_predict_proba(spec, train, grid);
    CHECK(est.values(0) == doctest::Approx(1.0 - eps).epsilon(1e-15));
}

TEST_CASE("forest validates mtry and tree count") {
    const LabeledDataset train = blob_data(10, 1.0, 71);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Forest;
    spec.forest_mtry = 3;  // only 2 features exist
    CHECK_THROWS_AS(cpt::forest_fit_predict(spec, train, train.features()),
                    cpt::InvalidArgument);

    spec.forest_mtry = 0;
    spec.forest_trees = 0;
    CHECK_THROWS_AS(cpt::forest_fit_predict(spec, train, train.features()),
                    cpt::InvalidArgument);

    spec.forest_trees = 10;
    spec.forest_min_leaf = 0;
    CHECK_THROWS_AS(cpt::forest_fit_predict(spec, train, train.features()),
                    cpt::InvalidArgument);
}

TEST_CASE("logistic flags non-convergence instead of failing") {
    const LabeledDataset train = blob_data(40, 1.0, 81);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Logistic;
    spec.logistic_max_iter = 1;
    spec.logistic_tol = 1e-14;
    const ProbEstimate est = cpt::logistic_fit_predict(spec, train, train.features());
    CHECK_FALSE(est.converged);
    CHECK(est.values.size() == train.size());
}
