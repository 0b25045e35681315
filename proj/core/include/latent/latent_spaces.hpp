#pragma once

#include <Eigen/Core>

#include "latent/gaussian_model.hpp"
#include "latent/types.hpp"

namespace latent {

/// Negative slope of the mapping network's final activation.
inline constexpr double kForwardSlope = 0.2;
/// Slope that undoes it, written as the literal 5.0 rather than 1 / 0.2.
inline constexpr double kInverseSlope = 5.0;

/// Leaky ReLU: x for x >= 0, slope * x otherwise. Requires slope > 0.
Eigen::VectorXd lru(const Eigen::Ref<const Eigen::VectorXd>& x, double slope);
Eigen::MatrixXd lru_matrix(const Eigen::Ref<const Eigen::MatrixXd>& x, double slope);

/// d lru / dx with the derivative at exactly 0 taken from the positive branch.
Eigen::VectorXd lru_derivative(const Eigen::Ref<const Eigen::VectorXd>& x,
                               double slope);

LatentV w_to_v(const LatentW& w);
LatentW v_to_w(const LatentV& v);

/// (1 - t) a + t b.
LatentW lerp(const LatentW& a, const LatentW& b, double t);
LatentV lerp(const LatentV& a, const LatentV& b, double t);
StyleStack lerp(const StyleStack& a, const StyleStack& b, double t);

/// s identical rows equal to w.
StyleStack broadcast_style(const LatentW& w, int scales);

/// Block-diagonal W+ prior: sum over rows of mahalanobis_sq(w_to_v(row)).
/// Equal to the energy under I_s (x) Sigma without forming that matrix.
double mahalanobis_sq_plus(const GaussianModel& model, const StyleStack& stack);

/// Gradient of mahalanobis_sq(w_to_v(w)) with respect to w, chained through
/// the LRU_5 derivative.
Eigen::VectorXd prior_grad_w(const GaussianModel& model, const LatentW& w);

/// Row-wise gradient of mahalanobis_sq_plus with respect to the stack.
Eigen::MatrixXd prior_grad_plus(const GaussianModel& model, const StyleStack& stack);

}  // namespace latent
