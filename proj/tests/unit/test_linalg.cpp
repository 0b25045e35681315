#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "latent/error.hpp"
#include "latent/linalg.hpp"
#include "test_support.hpp"

using namespace latent;
using latent::testing::random_matrix;
using latent::testing::random_spd;

TEST_CASE("jacobi_eigen solves the 2x2 case in closed form") {
  // [[2, 1], [1, 2]] has eigenvalues 3 and 1 with eigenvectors (1, 1)/sqrt2
  // and (1, -1)/sqrt2; the sign rule makes the largest entry positive.
  Eigen::Matrix2d a;
  a << 2, 1, 1, 2;
  const auto eig = linalg::jacobi_eigen(a);
  CHECK(eig.values(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eig.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(eig.vectors(0, 0) - r) < 1e-12);
  CHECK(std::abs(eig.vectors(1, 0) - r) < 1e-12);
  CHECK(std::abs(std::abs(eig.vectors(0, 1)) - r) < 1e-12);
  CHECK(eig.vectors(0, 1) * eig.vectors(1, 1) < 0.0);
}

TEST_CASE("jacobi_eigen on diagonal input sorts and keeps unit vectors") {
  Eigen::Matrix3d a = Eigen::Vector3d(1.0, 5.0, 3.0).asDiagonal();
  const auto eig = linalg::jacobi_eigen(a);
  CHECK(eig.values(0) == 5.0);
  CHECK(eig.values(1) == 3.0);
  CHECK(eig.values(2) == 1.0);
  CHECK(eig.vectors(1, 0) == 1.0);
  CHECK(eig.vectors(2, 1) == 1.0);
  CHECK(eig.vectors(0, 2) == 1.0);
}

TEST_CASE("jacobi_eigen agrees with a reference solver on random SPD matrices") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Eigen::MatrixXd a = random_spd(seed, 12);
    const auto eig = linalg::jacobi_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
    const Eigen::VectorXd ref_values = ref.eigenvalues().reverse();
    CHECK((eig.values - ref_values).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd recon =
        eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    CHECK((recon - a).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd gram = eig.vectors.transpose() * eig.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index j = 0; j < 12; ++j) {
      Eigen::Index k;
      eig.vectors.col(j).cwiseAbs().maxCoeff(&k);
      CHECK(eig.vectors(k, j) > 0.0);
    }
  }
}

TEST_CASE("jacobi_eigen rejects non-square input") {
  CHECK_THROWS_AS(linalg::jacobi_eigen(Eigen::MatrixXd::Zero(2, 3)), DimensionError);
}

TEST_CASE("symmetric_sqrt squares back to the input") {
  const Eigen::MatrixXd a = random_spd(7, 9);
  const Eigen::MatrixXd r = linalg::symmetric_sqrt(a);
  CHECK((r * r - a).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cholesky_lower and cholesky_solve") {
  const Eigen::MatrixXd a = random_spd(3, 6);
  const Eigen::MatrixXd l = linalg::cholesky_lower(a);
  CHECK((l * l.transpose() - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(l.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero());
  const Eigen::VectorXd b = latent::testing::random_vector(4, 6);
  const Eigen::VectorXd x = linalg::cholesky_solve(l, b);
  CHECK((a * x - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cholesky_lower reports indefinite matrices as numerical failures") {
  Eigen::Matrix2d a;
  a << 1, 2, 2, 1;
  CHECK_THROWS_AS(linalg::cholesky_lower(a), NumericalError);
}

TEST_CASE("mean_and_covariance uses the unbiased denominator") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  linalg::mean_and_covariance(x, mean, cov);
  CHECK(mean(0) == doctest::Approx(3.0));
  CHECK(mean(1) == doctest::Approx(4.0));
  CHECK((cov - Eigen::MatrixXd::Constant(2, 2, 4.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mean_and_covariance matches the textbook formula on random data") {
  const Eigen::MatrixXd x = random_matrix(11, 50, 4);
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  linalg::mean_and_covariance(x, mean, cov);
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd ref = c.transpose() * c / 49.0;
  CHECK((cov - ref).cwiseAbs().maxCoeff() < 1e-12);
}
