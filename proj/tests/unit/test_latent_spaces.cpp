#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "latent/error.hpp"
#include "latent/latent_spaces.hpp"
#include "test_support.hpp"

using namespace latent;
using namespace latent::testing;

namespace {

/// I_s (x) Sigma Mahalanobis of the flattened stack, formed explicitly.
double kronecker_energy(const GaussianModel& m, const StyleStack& stack) {
  const Eigen::Index s = stack.scales();
  const Eigen::Index d = stack.dim();
  const Eigen::MatrixXd reg = m.cov_v + m.epsilon * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(s * d, s * d);
  Eigen::VectorXd diff(s * d);
  for (Eigen::Index k = 0; k < s; ++k) {
    big.block(k * d, k * d, d, d) = reg;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double w = stack.styles(k, i);
      diff(k * d + i) = (w >= 0.0 ? w : 5.0 * w) - m.mean_v(i);
    }
  }
  return diff.dot(big.fullPivLu().solve(diff));
}

}  // namespace

TEST_CASE("lru examples") {
  Eigen::VectorXd x(4);
  x << -2.0, -0.0, 0.0, 3.0;
  const Eigen::VectorXd y = lru(x, 0.2);
  CHECK(y(0) == doctest::Approx(-0.4));
  CHECK(y(1) == 0.0);
  CHECK(y(3) == 3.0);
  CHECK(lru(x, 5.0)(0) == -10.0);
  CHECK_THROWS_AS(lru(x, 0.0), ArgumentError);
  CHECK_THROWS_AS(lru(x, -1.0), ArgumentError);
}

TEST_CASE("lru_derivative takes the positive branch at zero") {
  Eigen::VectorXd x(3);
  x << -1.0, 0.0, 1.0;
  const Eigen::VectorXd g = lru_derivative(x, 0.2);
  CHECK(g(0) == 0.2);
  CHECK(g(1) == 1.0);
  CHECK(g(2) == 1.0);
}

TEST_CASE("lru round trip holds within 4 ulp including boundary values") {
  Eigen::VectorXd x = random_vector(17, 100000, 10.0);
  const Eigen::VectorXd back = lru(lru(x, kForwardSlope), kInverseSlope);
  std::uint64_t worst = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) worst = std::max(worst, ulp_distance(back(i), x(i)));
  CHECK(worst <= 4);

  const std::vector<double> edges = {0.0, -0.0, 1e-300, -1e-300, 1e300, -1e300};
  for (double e : edges) {
    Eigen::VectorXd one = Eigen::VectorXd::Constant(1, e);
    CHECK(ulp_distance(lru(lru(one, 0.2), 5.0)(0), e) <= 4);
    CHECK(ulp_distance(lru(lru(one, 5.0), 0.2)(0), e) <= 4);
  }
}

TEST_CASE("w_to_v and v_to_w are mutual inverses") {
  const LatentW w{random_vector(3, 32)};
  const LatentW back = v_to_w(w_to_v(w));
  for (Eigen::Index i = 0; i < 32; ++i) CHECK(ulp_distance(back.values(i), w.values(i)) <= 4);
}

TEST_CASE("lerp endpoints and midpoint") {
  const LatentW a{random_vector(4, 5)};
  const LatentW b{random_vector(5, 5)};
  CHECK(lerp(a, b, 0.0) == a);
  CHECK(lerp(a, b, 1.0) == b);
  CHECK((lerp(a, b, 0.5).values - 0.5 * (a.values + b.values)).cwiseAbs().maxCoeff() < 1e-15);
  const StyleStack sa{random_matrix(6, 3, 5)};
  const StyleStack sb{random_matrix(7, 3, 5)};
  CHECK(lerp(sa, sb, 0.0) == sa);
  CHECK_THROWS_AS(lerp(a, LatentW{random_vector(1, 4)}, 0.5), DimensionError);
}

TEST_CASE("broadcast_style repeats the style") {
  const LatentW w{random_vector(8, 4)};
  const StyleStack s = broadcast_style(w, 3);
  CHECK(s.scales() == 3);
  for (Eigen::Index k = 0; k < 3; ++k) CHECK(s.row(k) == w);
  CHECK_THROWS_AS(broadcast_style(w, 0), ArgumentError);
}

TEST_CASE("block prior equals the explicit Kronecker Mahalanobis") {
  const GaussianModel m = model_from_cov(random_spd(21, 3), random_vector(22, 3, 0.3));
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const StyleStack stack{random_matrix(1000 + i, 2, 3)};
    worst = std::max(worst, relative_error(mahalanobis_sq_plus(m, stack),
                                           kronecker_energy(m, stack), 1e-300));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("block prior of a broadcast style is s times the single prior") {
  const GaussianModel m = model_from_cov(random_spd(23, 4), Eigen::VectorXd::Zero(4));
  const LatentW w{random_vector(24, 4)};
  const double single = mahalanobis_sq(m, w_to_v(w));
  CHECK(mahalanobis_sq_plus(m, broadcast_style(w, 5)) == doctest::Approx(5.0 * single));
  CHECK_THROWS_AS(mahalanobis_sq_plus(m, StyleStack{Eigen::MatrixXd::Zero(2, 3)}),
                  DimensionError);
}

TEST_CASE("prior gradients match central differences away from kinks") {
  const GaussianModel m = model_from_cov(random_spd(25, 6), random_vector(26, 6, 0.2));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::VectorXd w = random_vector(300 + seed, 6);
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (std::abs(w(i)) < 0.05) w(i) = 0.05;  // keep FD steps on one branch
    const Eigen::VectorXd g = prior_grad_w(m, LatentW{w});
    const Eigen::MatrixXd fd = finite_difference(
        [&](const Eigen::MatrixXd& x) { return mahalanobis_sq(m, w_to_v(LatentW{x})); }, w, 1e-6);
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(relative_error(g(i), fd(i), 1e-6) < 1e-5);
  }

  Eigen::MatrixXd stack = random_matrix(400, 3, 6);
  stack = stack.unaryExpr([](double v) { return std::abs(v) < 0.05 ? 0.05 : v; });
  const Eigen::MatrixXd g = prior_grad_plus(m, StyleStack{stack});
  const Eigen::MatrixXd fd = finite_difference(
      [&](const Eigen::MatrixXd& x) { return mahalanobis_sq_plus(m, StyleStack{x}); }, stack,
      1e-6);
  for (Eigen::Index i = 0; i < g.size(); ++i)
    CHECK(relative_error(g.data()[i], fd.data()[i], 1e-6) < 1e-5);
}
