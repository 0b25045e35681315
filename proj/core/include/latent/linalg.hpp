#pragma once

#include <Eigen/Core>

namespace latent::linalg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, orthonormal
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Sweeps run until
/// the off-diagonal Frobenius norm drops below 1e-12 * ||A||_F. Eigenvalues
/// come back sorted in descending order; each eigenvector is sign-fixed so
/// that its largest-magnitude entry is positive.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a);

/// Principal square root of a symmetric PSD matrix via its
/// eigendecomposition; negative eigenvalues are clamped to zero.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& a);

/// Lower Cholesky factor. Throws NumericalError if `a` is not positive
/// definite.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a);

/// Solves (L L^T) x = b using two triangular solves.
Eigen::VectorXd cholesky_solve(const Eigen::MatrixXd& lower,
                               const Eigen::VectorXd& b);

/// Column means and unbiased (n - 1) covariance of the rows of `samples`.
void mean_and_covariance(const Eigen::MatrixXd& samples, Eigen::VectorXd& mean,
                         Eigen::MatrixXd& cov);

}  // namespace latent::linalg
