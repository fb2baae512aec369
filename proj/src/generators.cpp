#include <algorithm>
#include <cctype>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "cpt/generators.hpp"
#include "cpt/linalg.hpp"

namespace cpt {

namespace {

Eigen::MatrixXd shifted_gaussian(Eigen::Index rows, Eigen::Index d, double sigma,
                                 const Eigen::VectorXd& mean, RngStream& rng) {
    Eigen::MatrixXd out(rows, d);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            out(i, j) = (mean.size() != 0 ? mean(j) : 0.0) + sigma * rng.normal();
        }
    }
    return out;
}

std::pair<SampleMatrix, SampleMatrix> mean_shift_sized(Eigen::Index d, Eigen::Index n1,
                                                       Eigen::Index n0, double sigma,
                                                       const Eigen::VectorXd& delta,
                                                       RngStream& rng) {
    if (d < 1 || n1 < 1 || n0 < 1) {
        throw InvalidArgument("mean shift scenario needs d, n, m >= 1");
    }
    if (sigma <= 0.0) {
        throw InvalidArgument("sigma must be positive");
    }
    if (delta.size() != 0 && delta.size() != d) {
        throw DimensionMismatch("delta has " + std::to_string(delta.size()) +
                                " entries for dimension " + std::to_string(d));
    }
    const Eigen::VectorXd zero;
    SampleMatrix sample1(shifted_gaussian(n1, d, sigma, zero, rng));
    SampleMatrix sample2(shifted_gaussian(n0, d, sigma, delta, rng));
    return {std::move(sample1), std::move(sample2)};
}

Eigen::MatrixXd constant_offdiag_cov(const Eigen::VectorXd& diag, double rho) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(diag.size(), diag.size(), rho);
    cov.diagonal() = diag;
    return cov;
}

Eigen::VectorXd ramp_diag(Eigen::Index d) {
    Eigen::VectorXd diag(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        diag(i) = 1.0 + 0.1 * static_cast<double>(i);
    }
    return diag;
}

std::pair<SampleMatrix, SampleMatrix> cov_diff_sized(Eigen::Index d, Eigen::Index n1,
                                                     Eigen::Index n0,
                                                     const Eigen::VectorXd& diag, double rho1,
                                                     double rho2, RngStream& rng) {
    if (d < 1 || n1 < 1 || n0 < 1) {
        throw InvalidArgument("covariance scenario needs d, n, m >= 1");
    }
    const Eigen::VectorXd variances = diag.size() != 0 ? diag : ramp_diag(d);
    if (variances.size() != d) {
        throw DimensionMismatch("diag has " + std::to_string(variances.size()) +
                                " entries for dimension " + std::to_string(d));
    }
    const CholeskyFactor chol1 = cholesky(constant_offdiag_cov(variances, rho1));
    const CholeskyFactor chol2 = cholesky(constant_offdiag_cov(variances, rho2));
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
    SampleMatrix sample1 = sample_mvn(zero, chol1, n1, rng);
    SampleMatrix sample2 = sample_mvn(zero, chol2, n0, rng);
    return {std::move(sample1), std::move(sample2)};
}

std::pair<SampleMatrix, SampleMatrix> ggm_sized(Eigen::Index d, double tau, double delta1,
                                                double delta2, Eigen::Index n1, Eigen::Index n0,
                                                RngStream& rng) {
    const auto [q1, q2] = ggm_precision_pair(d, tau, delta1, delta2, rng);
    const CholeskyFactor chol1 = cholesky(q1);
    const CholeskyFactor chol2 = cholesky(q2);
    SampleMatrix sample1 = sample_precision_mvn(chol1, n1, rng);
    SampleMatrix sample2 = sample_precision_mvn(chol2, n0, rng);
    return {std::move(sample1), std::move(sample2)};
}

std::pair<SampleMatrix, SampleMatrix> marginal_diff_sized(Eigen::Index d, Eigen::Index n1,
                                                          Eigen::Index n0, RngStream& rng) {
    if (d < 2) {
        throw InvalidArgument("marginal difference scenario needs d >= 2");
    }
    if (n1 < 1 || n0 < 1) {
        throw InvalidArgument("marginal difference scenario needs n, m >= 1");
    }
    Eigen::MatrixXd first(n1, d);
    for (Eigen::Index i = 0; i < n1; ++i) {
        first(i, 0) = rng.exponential();
        for (Eigen::Index j = 1; j < d; ++j) {
            first(i, j) = 1.0 + rng.normal();
        }
    }
    Eigen::MatrixXd second(n0, d);
    for (Eigen::Index i = 0; i < n0; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            second(i, j) = 1.0 + rng.normal();
        }
    }
    return {SampleMatrix(std::move(first)), SampleMatrix(std::move(second))};
}

/// Distinct row positions of `from`, `count` of them, drawn without
/// replacement in random order.
std::vector<Eigen::Index> draw_without_replacement(const std::vector<Eigen::Index>& from,
                                                   Eigen::Index count, RngStream& rng) {
    std::vector<Eigen::Index> pool = from;
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto j = static_cast<std::size_t>(i) +
                       static_cast<std::size_t>(rng.below(pool.size() - static_cast<std::size_t>(i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(count));
    return pool;
}

std::pair<SampleMatrix, SampleMatrix> subsample_corpus(const LabeledDataset& corpus,
                                                       Eigen::Index n1, Eigen::Index n0,
                                                       RngStream& rng) {
    std::vector<Eigen::Index> class1;
    std::vector<Eigen::Index> class0;
    for (Eigen::Index i = 0; i < corpus.size(); ++i) {
        (corpus.labels()[static_cast<std::size_t>(i)] == 1 ? class1 : class0).push_back(i);
    }
    if (n1 > static_cast<Eigen::Index>(class1.size()) ||
        n0 > static_cast<Eigen::Index>(class0.size())) {
        throw InvalidArgument("corpus has " + std::to_string(class1.size()) + "/" +
                              std::to_string(class0.size()) +
                              " class-1/class-0 documents, fewer than requested " +
                              std::to_string(n1) + "/" + std::to_string(n0));
    }
    const std::vector<Eigen::Index> pick1 = draw_without_replacement(class1, n1, rng);
    const std::vector<Eigen::Index> pick0 = draw_without_replacement(class0, n0, rng);

    const Eigen::MatrixXd& x = corpus.features().values();
    Eigen::MatrixXd first(n1, corpus.dim());
    for (Eigen::Index i = 0; i < n1; ++i) {
        first.row(i) = x.row(pick1[static_cast<std::size_t>(i)]);
    }
    Eigen::MatrixXd second(n0, corpus.dim());
    for (Eigen::Index i = 0; i < n0; ++i) {
        second.row(i) = x.row(pick0[static_cast<std::size_t>(i)]);
    }
    return {SampleMatrix(std::move(first)), SampleMatrix(std::move(second))};
}

}  // namespace

std::string scenario_label(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::MeanShift: return "mean-shift";
        case ScenarioKind::CovDiff: return "cov-diff";
        case ScenarioKind::Ggm: return "ggm";
        case ScenarioKind::MarginalDiff: return "marginal-diff";
        case ScenarioKind::TextCorpus: return "text";
    }
    return "unknown";
}

std::pair<SampleMatrix, SampleMatrix> gen_mean_shift(Eigen::Index d, Eigen::Index n,
                                                     double sigma, const Eigen::VectorXd& delta,
                                                     RngStream& rng) {
    return mean_shift_sized(d, n, n, sigma, delta, rng);
}

std::pair<SampleMatrix, SampleMatrix> gen_cov_diff(Eigen::Index d, Eigen::Index n,
                                                   const Eigen::VectorXd& diag, double rho1,
                                                   double rho2, RngStream& rng) {
    return cov_diff_sized(d, n, n, diag, rho1, rho2, rng);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ggm_precision_pair(Eigen::Index d, double tau,
                                                               double delta1, double delta2,
                                                               RngStream& rng) {
    if (d < 2) {
        throw InvalidArgument("graphical model needs d >= 2");
    }
    if (tau < 0.0 || tau > 1.0) {
        throw InvalidArgument("tau must lie in [0, 1]");
    }
    if (delta1 <= 0.0 || delta2 <= 0.0) {
        throw InvalidArgument("diagonal boosts delta1, delta2 must be positive");
    }
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const double u = rng.uniform01();
            a1(i, j) = u;
            a1(j, i) = u;
        }
    }
    // one coin per undirected edge keeps A2 symmetric
    Eigen::MatrixXd a2 = a1;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            if (rng.uniform01() < tau) {
                a2(i, j) = 0.0;
                a2(j, i) = 0.0;
            }
        }
    }
    auto laplacian_plus = [](const Eigen::MatrixXd& a, double boost) {
        Eigen::MatrixXd q = -a;
        q.diagonal() = a.rowwise().sum();
        q.diagonal().array() += boost;
        return q;
    };
    return {laplacian_plus(a1, delta1), laplacian_plus(a2, delta2)};
}

std::pair<SampleMatrix, SampleMatrix> gen_ggm_pair(Eigen::Index d, double tau, double delta1,
                                                   double delta2, Eigen::Index n,
                                                   RngStream& rng) {
    return ggm_sized(d, tau, delta1, delta2, n, n, rng);
}

std::pair<SampleMatrix, SampleMatrix> gen_marginal_diff(Eigen::Index d, Eigen::Index n,
                                                        RngStream& rng) {
    return marginal_diff_sized(d, n, n, rng);
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

LabeledDataset build_doc_term_matrix(const std::vector<Document>& corpus, double min_df,
                                     const std::vector<std::string>& remove_terms) {
    if (corpus.empty()) {
        throw EmptyInput("corpus is empty");
    }
    if (!(min_df > 0.0 && min_df <= 1.0)) {
        throw InvalidArgument("min_df must lie in (0, 1]");
    }

    std::vector<std::unordered_set<std::string>> doc_terms(corpus.size());
    std::unordered_map<std::string, Eigen::Index> doc_freq;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::string& token : tokenize(corpus[i].text)) {
            doc_terms[i].insert(std::move(token));
        }
        for (const std::string& term : doc_terms[i]) {
            ++doc_freq[term];  // presence, not occurrence count
        }
    }

    std::unordered_set<std::string> banned;
    for (const std::string& term : remove_terms) {
        for (std::string& token : tokenize(term)) {
            banned.insert(std::move(token));
        }
    }

    // 1e-9 slack keeps exact boundaries like 1/2 >= 0.5 safe from rounding
    const double needed = min_df * static_cast<double>(corpus.size()) - 1e-9;
    std::vector<std::string> vocabulary;
    for (const auto& [term, count] : doc_freq) {
        if (static_cast<double>(count) >= needed && banned.count(term) == 0) {
            vocabulary.push_back(term);
        }
    }
    if (vocabulary.empty()) {
        throw EmptyVocabulary("no term clears min_df = " + std::to_string(min_df) +
                              " after removals");
    }
    std::sort(vocabulary.begin(), vocabulary.end());

    Eigen::MatrixXd presence(static_cast<Eigen::Index>(corpus.size()),
                             static_cast<Eigen::Index>(vocabulary.size()));
    std::vector<int> labels(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::size_t j = 0; j < vocabulary.size(); ++j) {
            presence(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                doc_terms[i].count(vocabulary[j]) != 0 ? 1.0 : 0.0;
        }
        labels[i] = corpus[i].label;
    }
    return LabeledDataset(SampleMatrix(std::move(presence)), std::move(labels));
}

std::pair<SampleMatrix, SampleMatrix> generate_scenario(const ScenarioSpec& spec,
                                                        RngStream& rng) {
    switch (spec.kind) {
        case ScenarioKind::MeanShift:
            return mean_shift_sized(spec.d, spec.n, spec.m, spec.sigma, spec.delta, rng);
        case ScenarioKind::CovDiff:
            return cov_diff_sized(spec.d, spec.n, spec.m, spec.diag, spec.rho1, spec.rho2, rng);
        case ScenarioKind::Ggm:
            return ggm_sized(spec.d, spec.tau, spec.ridge1, spec.ridge2, spec.n, spec.m, rng);
        case ScenarioKind::MarginalDiff:
            return marginal_diff_sized(spec.d, spec.n, spec.m, rng);
        case ScenarioKind::TextCorpus:
            if (!spec.corpus) {
                throw InvalidArgument("text scenario needs a corpus");
            }
            return subsample_corpus(*spec.corpus, spec.n, spec.m, rng);
    }
    throw InvalidArgument("unknown scenario kind");
}

}  // namespace cpt
