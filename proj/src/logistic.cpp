#include <cmath>

#include "cpt/classifiers.hpp"

namespace cpt {

namespace detail {
void check_eval_dim(const LabeledDataset& train, const SampleMatrix& eval);
Eigen::VectorXd clipped(Eigen::VectorXd values, double epsilon);
}  // namespace detail

namespace {

inline double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
inline double log1pexp(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

Eigen::VectorXd label_vector(const LabeledDataset& data) {
    Eigen::VectorXd y(data.size());
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        y(i) = data.labels()[static_cast<std::size_t>(i)];
    }
    return y;
}

}  // namespace

double logistic_objective(const Eigen::VectorXd& weights, double intercept,
                          const LabeledDataset& data, double l2) {
    const Eigen::MatrixXd& x = data.features().values();
    const Eigen::VectorXd z = (x * weights).array() + intercept;
    double nll = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        nll += log1pexp(z(i)) - data.labels()[static_cast<std::size_t>(i)] * z(i);
    }
    return nll / static_cast<double>(data.size()) + 0.5 * l2 * weights.squaredNorm();
}

void logistic_gradient(const Eigen::VectorXd& weights, double intercept,
                       const LabeledDataset& data, double l2, Eigen::VectorXd& grad_w,
                       double& grad_b) {
    const Eigen::MatrixXd& x = data.features().values();
    Eigen::VectorXd residual = (x * weights).array() + intercept;
    for (Eigen::Index i = 0; i < residual.size(); ++i) {
        residual(i) = sigmoid(residual(i)) - data.labels()[static_cast<std::size_t>(i)];
    }
    const double inv_n = 1.0 / static_cast<double>(data.size());
    grad_w = inv_n * (x.transpose() * residual) + l2 * weights;
    grad_b = inv_n * residual.sum();
}

LogisticModel fit_logistic(const ClassifierSpec& spec, const LabeledDataset& train) {
    if (spec.logistic_l2 < 0.0) {
        throw InvalidArgument("logistic_l2 must be nonnegative");
    }
    if (spec.logistic_max_iter < 1 || spec.logistic_tol <= 0.0) {
        throw InvalidArgument("logistic_max_iter and logistic_tol must be positive");
    }
    const Eigen::Index d = train.dim();
    LogisticModel model;
    model.weights = Eigen::VectorXd::Zero(d);
    model.intercept = 0.0;

    double objective = logistic_objective(model.weights, model.intercept, train, spec.logistic_l2);
    Eigen::VectorXd grad_w(d);
    double grad_b = 0.0;
    double step = 1.0;
    constexpr double kArmijo = 1e-4;

    for (int iter = 0; iter < spec.logistic_max_iter; ++iter) {
        logistic_gradient(model.weights, model.intercept, train, spec.logistic_l2, grad_w, grad_b);
        const double grad_sq = grad_w.squaredNorm() + grad_b * grad_b;
        if (std::sqrt(grad_sq) <= spec.logistic_tol) {
            model.converged = true;
            break;
        }

        // backtracking line search along the negative gradient
        double t = step;
        bool accepted = false;
        for (int half = 0; half < 60; ++half) {
            const Eigen::VectorXd w_next = model.weights - t * grad_w;
            const double b_next = model.intercept - t * grad_b;
            const double obj_next = logistic_objective(w_next, b_next, train, spec.logistic_l2);
            if (obj_next <= objective - kArmijo * t * grad_sq) {
                model.weights = w_next;
                model.intercept = b_next;
                objective = obj_next;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            break;  // no descent step representable; gradient test decides convergence
        }
        model.objective_trace.push_back(objective);
        model.iterations = iter + 1;
        step = std::min(t * 2.0, 1e6);
    }
    if (!model.converged) {
        logistic_gradient(model.weights, model.intercept, train, spec.logistic_l2, grad_w, grad_b);
        model.converged = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b) <= spec.logistic_tol;
    }
    return model;
}

ProbEstimate logistic_fit_predict(const ClassifierSpec& spec, const LabeledDataset& train,
                                  const SampleMatrix& eval) {
    detail::check_eval_dim(train, eval);
    const LogisticModel model = fit_logistic(spec, train);
    Eigen::VectorXd z = (eval.values() * model.weights).array() + model.intercept;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z(i) = sigmoid(z(i));
    }
    const double eps = default_epsilon(train.size());
    return ProbEstimate{detail::clipped(std::move(z), eps), eps, model.converged};
}

}  // namespace cpt
