#include "latent/latent_spaces.hpp"

#include <string>

#include "latent/error.hpp"

namespace latent {
namespace {

void require_slope(double slope) {
  if (!(slope > 0.0)) throw ArgumentError("lru: slope must be positive");
}

double lru_scalar(double x, double slope) { return x >= 0.0 ? x : slope * x; }

}  // namespace

Eigen::VectorXd lru(const Eigen::Ref<const Eigen::VectorXd>& x, double slope) {
  require_slope(slope);
  return x.unaryExpr([slope](double v) { return lru_scalar(v, slope); });
}

Eigen::MatrixXd lru_matrix(const Eigen::Ref<const Eigen::MatrixXd>& x, double slope) {
  require_slope(slope);
  return x.unaryExpr([slope](double v) { return lru_scalar(v, slope); });
}

Eigen::VectorXd lru_derivative(const Eigen::Ref<const Eigen::VectorXd>& x,
                               double slope) {
  require_slope(slope);
  return x.unaryExpr([slope](double v) { return v >= 0.0 ? 1.0 : slope; });
}

LatentV w_to_v(const LatentW& w) { return {lru(w.values, kInverseSlope)}; }

LatentW v_to_w(const LatentV& v) { return {lru(v.values, kForwardSlope)}; }

LatentW lerp(const LatentW& a, const LatentW& b, double t) {
  require_dims(a.dim() == b.dim(), "lerp: dimension mismatch");
  return {(1.0 - t) * a.values + t * b.values};
}

LatentV lerp(const LatentV& a, const LatentV& b, double t) {
  require_dims(a.dim() == b.dim(), "lerp: dimension mismatch");
  return {(1.0 - t) * a.values + t * b.values};
}

StyleStack lerp(const StyleStack& a, const StyleStack& b, double t) {
  require_dims(a.scales() == b.scales() && a.dim() == b.dim(),
               "lerp: stack shape mismatch");
  return {(1.0 - t) * a.styles + t * b.styles};
}

StyleStack broadcast_style(const LatentW& w, int scales) {
  if (scales < 1) throw ArgumentError("broadcast_style: scales must be >= 1");
  return {w.values.transpose().replicate(scales, 1)};
}

double mahalanobis_sq_plus(const GaussianModel& model, const StyleStack& stack) {
  require_dims(stack.dim() == model.dim,
               "mahalanobis_sq_plus: stack dimension " +
                   std::to_string(stack.dim()) + " != model dimension " +
                   std::to_string(model.dim));
  double total = 0.0;
  for (Eigen::Index k = 0; k < stack.scales(); ++k)
    total += mahalanobis_sq(model, w_to_v(stack.row(k)));
  return total;
}

Eigen::VectorXd prior_grad_w(const GaussianModel& model, const LatentW& w) {
  const LatentV v = w_to_v(w);
  return mahalanobis_sq_grad(model, v).cwiseProduct(
      lru_derivative(w.values, kInverseSlope));
}

Eigen::MatrixXd prior_grad_plus(const GaussianModel& model, const StyleStack& stack) {
  require_dims(stack.dim() == model.dim, "prior_grad_plus: dimension mismatch");
  Eigen::MatrixXd grad(stack.scales(), stack.dim());
  for (Eigen::Index k = 0; k < stack.scales(); ++k)
    grad.row(k) = prior_grad_w(model, stack.row(k)).transpose();
  return grad;
}

}  // namespace latent
