// Python surface for the toolkit: the permutation test, the raw statistics,
// the synthetic generators, the closed-form minimax power, and direct access
// to the probability estimators. NumPy arrays map onto Eigen matrices.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpt/bench.hpp"
#include "cpt/generators.hpp"
#include "cpt/io.hpp"
#include "cpt/permutation.hpp"

namespace py = pybind11;

namespace {

cpt::ClassifierSpec classifier_spec(const std::string& classifier, int knn_k, double logistic_l2,
                                    int logistic_max_iter, double logistic_tol, int trees,
                                    int mtry, int min_leaf, std::uint64_t seed) {
    cpt::ClassifierSpec spec;
    if (classifier == "knn") {
        spec.kind = cpt::ClassifierKind::Knn;
    } else if (classifier == "logistic") {
        spec.kind = cpt::ClassifierKind::Logistic;
    } else if (classifier == "forest") {
        spec.kind = cpt::ClassifierKind::Forest;
    } else {
        throw cpt::InvalidArgument("classifier '" + classifier +
                                   "' is not one of knn, logistic, forest");
    }
    spec.knn_k = knn_k;
    spec.logistic_l2 = logistic_l2;
    spec.logistic_max_iter = logistic_max_iter;
    spec.logistic_tol = logistic_tol;
    spec.forest_trees = trees;
    spec.forest_mtry = mtry;
    spec.forest_min_leaf = min_leaf;
    spec.seed = seed;
    return spec;
}

cpt::StatisticKind statistic_kind(const std::string& stat, const cpt::ClassifierSpec& classifier,
                                  int folds, double mmd_bandwidth) {
    cpt::StatisticKind kind;
    if (stat == "cpt1") {
        kind.tag = cpt::StatisticTag::Cpt1;
    } else if (stat == "cpt2") {
        kind.tag = cpt::StatisticTag::Cpt2;
    } else if (stat == "acc") {
        kind.tag = cpt::StatisticTag::Acc;
    } else if (stat == "mmd") {
        kind.tag = cpt::StatisticTag::Mmd;
    } else {
        throw cpt::InvalidArgument("stat '" + stat + "' is not one of cpt1, cpt2, acc, mmd");
    }
    kind.classifier = classifier;
    kind.acc_folds = folds;
    kind.mmd_bandwidth = mmd_bandwidth;
    return kind;
}

cpt::ScenarioSpec scenario_spec(const std::string& kind, Eigen::Index d, Eigen::Index n,
                                Eigen::Index m, double sigma,
                                const std::optional<Eigen::VectorXd>& delta,
                                const std::optional<Eigen::VectorXd>& diag, double rho1,
                                double rho2, double tau, double ridge1, double ridge2,
                                std::uint64_t seed) {
    cpt::ScenarioSpec spec;
    if (kind == "mean-shift") {
        spec.kind = cpt::ScenarioKind::MeanShift;
    } else if (kind == "cov-diff") {
        spec.kind = cpt::ScenarioKind::CovDiff;
    } else if (kind == "ggm") {
        spec.kind = cpt::ScenarioKind::Ggm;
    } else if (kind == "marginal-diff") {
        spec.kind = cpt::ScenarioKind::MarginalDiff;
    } else {
        throw cpt::InvalidArgument("kind '" + kind +
                                   "' is not one of mean-shift, cov-diff, ggm, marginal-diff");
    }
    spec.d = d;
    spec.n = n;
    spec.m = m;
    spec.sigma = sigma;
    if (delta) {
        spec.delta = *delta;
    }
    if (diag) {
        spec.diag = *diag;
    } else {
        spec.diag = Eigen::VectorXd::Ones(d);
    }
    spec.rho1 = rho1;
    spec.rho2 = rho2;
    spec.tau = tau;
    spec.ridge1 = ridge1;
    spec.ridge2 = ridge2;
    spec.seed = seed;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-sample hypothesis tests built on classification probabilities";

    py::register_exception<cpt::Error>(m, "Error");

    py::class_<cpt::TestResult>(m, "TestResult")
        .def_readonly("observed", &cpt::TestResult::observed)
        .def_readonly("p_value", &cpt::TestResult::p_value)
        .def_readonly("critical_value", &cpt::TestResult::critical_value)
        .def_readonly("alpha", &cpt::TestResult::alpha)
        .def_readonly("num_permutations", &cpt::TestResult::num_permutations)
        .def_readonly("null_sample", &cpt::TestResult::null_sample)
        .def_readonly("seed", &cpt::TestResult::seed)
        .def("reject", &cpt::TestResult::reject)
        .def_property_readonly(
            "statistic",
            [](const cpt::TestResult& result) { return statistic_label(result.statistic_kind); })
        .def("__repr__", [](const cpt::TestResult& result) {
            return "TestResult(statistic='" + statistic_label(result.statistic_kind) +
                   "', observed=" + cpt::format_double(result.observed) +
                   ", p_value=" + cpt::format_double(result.p_value) + ")";
        });

    m.def(
        "permutation_test",
        [](const Eigen::MatrixXd& sample1, const Eigen::MatrixXd& sample0,
           const std::string& stat, const std::string& classifier, int permutations,
           double alpha, std::uint64_t seed, int threads, int knn_k, double logistic_l2,
           int logistic_max_iter, double logistic_tol, int trees, int mtry, int min_leaf,
           int folds, double mmd_bandwidth) {
            const cpt::LabeledDataset data =
                cpt::pooled(cpt::SampleMatrix(sample1), cpt::SampleMatrix(sample0));
            const cpt::StatisticKind kind = statistic_kind(
                stat,
                classifier_spec(classifier, knn_k, logistic_l2, logistic_max_iter, logistic_tol,
                                trees, mtry, min_leaf, cpt::mix_seed(seed, 0x636c617373ULL)),
                folds, mmd_bandwidth);
            return cpt::permutation_test(data, kind, permutations, alpha,
                                         cpt::RngStream(seed, 0), threads);
        },
        py::arg("sample1"), py::arg("sample0"), py::kw_only(), py::arg("stat") = "cpt1",
        py::arg("classifier") = "forest", py::arg("permutations") = 200, py::arg("alpha") = 0.05,
        py::arg("seed") = 0, py::arg("threads") = 1, py::arg("knn_k") = 0,
        py::arg("logistic_l2") = 1e-3, py::arg("logistic_max_iter") = 500,
        py::arg("logistic_tol") = 1e-6, py::arg("trees") = 500, py::arg("mtry") = 0,
        py::arg("min_leaf") = 10, py::arg("folds") = 2, py::arg("mmd_bandwidth") = 0.0,
        "Label-permutation two-sample test of sample1 (label 1) vs sample0 (label 0).");

    m.def(
        "statistic_w1",
        [](const Eigen::VectorXd& probabilities, Eigen::Index n, Eigen::Index m) {
            cpt::ProbEstimate estimate;
            estimate.values = probabilities;
            return cpt::statistic_w1(estimate, n, m);
        },
        py::arg("probabilities"), py::arg("n"), py::arg("m"),
        "Mean log-odds of the class-1 probabilities (one per label-1 row) minus log(n/m).");

    m.def(
        "statistic_w2",
        [](const Eigen::VectorXd& probabilities) {
            cpt::ProbEstimate estimate;
            estimate.values = probabilities;
            return cpt::statistic_w2(estimate);
        },
        py::arg("probabilities"),
        "Empirical variance of the pooled class-1 probability estimates.");

    m.def(
        "statistic_mmd",
        [](const Eigen::MatrixXd& sample1, const Eigen::MatrixXd& sample0, double bandwidth) {
            return cpt::statistic_mmd(cpt::SampleMatrix(sample1), cpt::SampleMatrix(sample0),
                                      bandwidth);
        },
        py::arg("sample1"), py::arg("sample0"), py::arg("bandwidth") = 0.0,
        "Unbiased squared MMD with a Gaussian kernel; bandwidth <= 0 selects the median "
        "heuristic.");

    m.def(
        "median_heuristic_bandwidth",
        [](const Eigen::MatrixXd& pooled_rows) {
            return cpt::median_heuristic_bandwidth(cpt::SampleMatrix(pooled_rows));
        },
        py::arg("pooled"), "Median pairwise Euclidean distance of the rows.");

    m.def(
        "fit_predict_proba",
        [](const Eigen::MatrixXd& train, const std::vector<int>& labels,
           const Eigen::MatrixXd& eval, const std::string& classifier, int knn_k,
           double logistic_l2, int logistic_max_iter, double logistic_tol, int trees, int mtry,
           int min_leaf, std::uint64_t seed) {
            const cpt::LabeledDataset data(cpt::SampleMatrix(train), labels);
            const cpt::ProbEstimate estimate = cpt::fit_predict_proba(
                classifier_spec(classifier, knn_k, logistic_l2, logistic_max_iter, logistic_tol,
                                trees, mtry, min_leaf, seed),
                data, cpt::SampleMatrix(eval));
            return estimate.values;
        },
        py::arg("train"), py::arg("labels"), py::arg("eval"), py::kw_only(),
        py::arg("classifier") = "forest", py::arg("knn_k") = 0, py::arg("logistic_l2") = 1e-3,
        py::arg("logistic_max_iter") = 500, py::arg("logistic_tol") = 1e-6,
        py::arg("trees") = 500, py::arg("mtry") = 0, py::arg("min_leaf") = 10,
        py::arg("seed") = 0,
        "Fits the classifier on (train, labels) and returns clipped P(Y=1|x) per eval row.");

    m.def(
        "generate_scenario",
        [](const std::string& kind, Eigen::Index d, Eigen::Index n, Eigen::Index m,
           std::uint64_t seed, double sigma, const std::optional<Eigen::VectorXd>& delta,
           const std::optional<Eigen::VectorXd>& diag, double rho1, double rho2, double tau,
           double ridge1, double ridge2) {
            const cpt::ScenarioSpec spec = scenario_spec(kind, d, n, m, sigma, delta, diag,
                                                         rho1, rho2, tau, ridge1, ridge2, seed);
            cpt::RngStream rng(seed, 0);
            auto [sample1, sample0] = cpt::generate_scenario(spec, rng);
            return py::make_tuple(sample1.values(), sample0.values());
        },
        py::arg("kind"), py::kw_only(), py::arg("d") = 100, py::arg("n") = 100,
        py::arg("m") = 100, py::arg("seed") = 0, py::arg("sigma") = 1.0,
        py::arg("delta") = std::nullopt, py::arg("diag") = std::nullopt,
        py::arg("rho1") = 0.01, py::arg("rho2") = 0.21, py::arg("tau") = 0.65,
        py::arg("ridge1") = 0.1, py::arg("ridge2") = 0.1,
        "Draws one synthetic scenario; returns (sample1, sample0) as arrays.");

    m.def("minimax_power", &cpt::minimax_power, py::arg("alpha"), py::arg("d"), py::arg("n"),
          py::arg("delta_sq"), py::arg("sigma"),
          "Closed-form best achievable power for the Gaussian mean-shift problem.");
}
