#include "cpt/linalg.hpp"

#include <cmath>
#include <string>

namespace cpt {

CholeskyFactor cholesky(const Eigen::MatrixXd& spd) {
    const Eigen::Index d = spd.rows();
    if (d < 1 || spd.cols() != d) {
        throw InvalidArgument("cholesky input must be a square matrix");
    }
    const double scale = std::max(1.0, spd.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            if (std::abs(spd(i, j) - spd(j, i)) > 1e-12 * scale) {
                throw InvalidArgument("cholesky input is not symmetric");
            }
        }
    }

    Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        double pivot = spd(j, j) - lower.row(j).head(j).squaredNorm();
        if (pivot <= 0.0) {
            throw NotPositiveDefinite("pivot " + std::to_string(pivot) + " at column " +
                                      std::to_string(j));
        }
        lower(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < d; ++i) {
            const double dot = lower.row(i).head(j).dot(lower.row(j).head(j));
            lower(i, j) = (spd(i, j) - dot) / lower(j, j);
        }
    }
    return CholeskyFactor{std::move(lower)};
}

SampleMatrix sample_mvn(const Eigen::VectorXd& mean, const CholeskyFactor& chol,
                        Eigen::Index count, RngStream& rng) {
    const Eigen::Index d = chol.dim();
    if (mean.size() != d) {
        throw DimensionMismatch("mean has length " + std::to_string(mean.size()) +
                                ", factor has dimension " + std::to_string(d));
    }
    if (count < 1) {
        throw InvalidArgument("sample count must be positive");
    }
    Eigen::MatrixXd out(count, d);
    Eigen::VectorXd z(d);
    for (Eigen::Index r = 0; r < count; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            z(c) = rng.normal();
        }
        out.row(r) = (mean + chol.lower.triangularView<Eigen::Lower>() * z).transpose();
    }
    return SampleMatrix(std::move(out));
}

SampleMatrix sample_precision_mvn(const CholeskyFactor& precision_chol, Eigen::Index count,
                                  RngStream& rng) {
    const Eigen::Index d = precision_chol.dim();
    if (precision_chol.lower.diagonal().minCoeff() < 1e-12) {
        throw SingularFactor("precision factor has a near-zero diagonal entry");
    }
    if (count < 1) {
        throw InvalidArgument("sample count must be positive");
    }
    const auto upper = precision_chol.lower.transpose().triangularView<Eigen::Upper>();
    Eigen::MatrixXd out(count, d);
    Eigen::VectorXd z(d);
    for (Eigen::Index r = 0; r < count; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            z(c) = rng.normal();
        }
        out.row(r) = upper.solve(z).transpose();
    }
    return SampleMatrix(std::move(out));
}

}  // namespace cpt
