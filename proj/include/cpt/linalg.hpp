#pragma once

#include <Eigen/Dense>

#include "cpt/matrix.hpp"
#include "cpt/rng.hpp"

namespace cpt {

/// Lower-triangular Cholesky factor L with L * L^T equal to the factored
/// symmetric positive-definite matrix.
struct CholeskyFactor {
    Eigen::MatrixXd lower;

    Eigen::Index dim() const { return lower.rows(); }
};

/// Cholesky factorization of a symmetric positive-definite matrix.
/// Throws NotPositiveDefinite when a pivot is <= 0 and InvalidArgument when
/// the input is not square or not symmetric (tolerance 1e-12, scaled).
CholeskyFactor cholesky(const Eigen::MatrixXd& spd);

/// Draws `count` iid rows of mean + L * z with z standard normal.
SampleMatrix sample_mvn(const Eigen::VectorXd& mean, const CholeskyFactor& chol,
                        Eigen::Index count, RngStream& rng);

/// Draws `count` iid rows of N(0, Q^{-1}) given the Cholesky factor of the
/// precision matrix Q, by back-solving L^T x = z. No inverse is formed.
SampleMatrix sample_precision_mvn(const CholeskyFactor& precision_chol, Eigen::Index count,
                                  RngStream& rng);

}  // namespace cpt
