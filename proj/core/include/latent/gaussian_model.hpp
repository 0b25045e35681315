#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>

#include "latent/types.hpp"

namespace latent {

/// Gaussian fit of the V-space latent distribution together with everything
/// derived from it: the eigendecomposition used by the PCA-space correction,
/// the Cholesky factor used by Mahalanobis energies, and W-space statistics
/// used by truncation and by the inversion initializer.
///
/// Immutable once built; all queries are const.
struct GaussianModel {
  int dim = 0;
  std::size_t sample_count = 0;
  Eigen::VectorXd mean_v;
  Eigen::MatrixXd cov_v;
  Eigen::MatrixXd eigvecs;  // columns, descending eigenvalue order
  Eigen::VectorXd eigvals;  // clamped to >= 0
  Eigen::MatrixXd chol;     // lower factor of cov_v + epsilon * I
  double epsilon = 0.0;
  Eigen::VectorXd mean_w;
  Eigen::VectorXd std_w;    // per-coordinate std of the W samples

  /// sigma = max_i sqrt(lambda_i).
  double max_sigma() const;
};

/// Relative covariance regularization: epsilon = kEpsilonScale * tr(cov) / d.
inline constexpr double kEpsilonScale = 1e-6;

/// Fits the model to paired samples. Row i of `samples_v` must be the V-image
/// of row i of `samples_w`.
GaussianModel fit_gaussian(const Eigen::MatrixXd& samples_v,
                           const Eigen::MatrixXd& samples_w);

/// Plain Gaussian fit of arbitrary feature vectors (W statistics mirror V).
GaussianModel fit_gaussian(const Eigen::MatrixXd& samples);

/// Rebuilds the derived fields (eigenstructure, Cholesky, epsilon) from
/// mean/covariance. Used by fitting and by deserialization.
GaussianModel make_model(Eigen::VectorXd mean_v, Eigen::MatrixXd cov_v,
                         Eigen::VectorXd mean_w, Eigen::VectorXd std_w,
                         std::size_t sample_count);

/// (v - mu)^T (Sigma + eps I)^{-1} (v - mu) via two triangular solves.
double mahalanobis_sq(const GaussianModel& model, const LatentV& v);
double mahalanobis_sq(const GaussianModel& model,
                      const Eigen::Ref<const Eigen::VectorXd>& v);

/// Gradient 2 (Sigma + eps I)^{-1} (v - mu).
Eigen::VectorXd mahalanobis_sq_grad(const GaussianModel& model, const LatentV& v);
Eigen::VectorXd mahalanobis_sq_grad(const GaussianModel& model,
                                    const Eigen::Ref<const Eigen::VectorXd>& v);

/// n rows mu + chol * xi with xi ~ N(0, I). Row i draws from its own stream
/// split_seed(seed, i), so the output is independent of thread count.
Eigen::MatrixXd sample_latents(const GaussianModel& model, std::uint64_t seed,
                               std::size_t n);

/// Frechet (2-Wasserstein) distance between the two Gaussians.
double frechet_distance(const GaussianModel& a, const GaussianModel& b);

/// Checks the structural invariants (orthonormality, reconstruction,
/// Cholesky product, ordering). Returns an empty string when all hold,
/// otherwise a description of the first violation.
std::string check_invariants(const GaussianModel& model, double tol = 1e-8);

nlohmann::json to_json(const GaussianModel& model);
GaussianModel model_from_json(const nlohmann::json& doc);

}  // namespace latent
