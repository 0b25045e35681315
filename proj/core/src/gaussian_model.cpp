#include "latent/gaussian_model.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "latent/error.hpp"
#include "latent/linalg.hpp"
#include "latent/parallel.hpp"
#include "latent/rng.hpp"

namespace latent {
namespace {

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return flat;
}

Eigen::VectorXd vector_from(const nlohmann::json& doc, const char* key,
                            Eigen::Index n) {
  const auto values = doc.at(key).get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != n)
    throw FormatError(std::string("model json: '") + key + "' has wrong length");
  return Eigen::Map<const Eigen::VectorXd>(values.data(), n);
}

Eigen::MatrixXd matrix_from(const nlohmann::json& doc, const char* key,
                            Eigen::Index n) {
  const auto values = doc.at(key).get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != n * n)
    throw FormatError(std::string("model json: '") + key + "' has wrong length");
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = values[static_cast<std::size_t>(i * n + j)];
  return m;
}

void check_dim(const GaussianModel& model, Eigen::Index n, const char* op) {
  if (n != model.dim)
    throw DimensionError(std::string(op) + ": expected dimension " +
                         std::to_string(model.dim) + ", got " + std::to_string(n));
}

}  // namespace

double GaussianModel::max_sigma() const {
  return eigvals.size() == 0 ? 0.0 : std::sqrt(std::max(0.0, eigvals.maxCoeff()));
}

GaussianModel make_model(Eigen::VectorXd mean_v, Eigen::MatrixXd cov_v,
                         Eigen::VectorXd mean_w, Eigen::VectorXd std_w,
                         std::size_t sample_count) {
  const Eigen::Index d = mean_v.size();
  require_dims(d > 0 && cov_v.rows() == d && cov_v.cols() == d &&
                   mean_w.size() == d && std_w.size() == d,
               "make_model: inconsistent dimensions");

  GaussianModel m;
  m.dim = static_cast<int>(d);
  m.sample_count = sample_count;
  m.mean_v = std::move(mean_v);
  m.cov_v = std::move(cov_v);
  m.mean_w = std::move(mean_w);
  m.std_w = std::move(std_w);

  auto eig = linalg::jacobi_eigen(m.cov_v);
  m.eigvals = eig.values.cwiseMax(0.0);
  m.eigvecs = std::move(eig.vectors);

  const double trace = m.cov_v.trace();
  m.epsilon = kEpsilonScale * trace / static_cast<double>(d);
  // Zero-variance data: fall back to an absolute floor so the factor exists.
  if (!(m.epsilon > 0.0)) m.epsilon = kEpsilonScale;
  m.chol = linalg::cholesky_lower(
      m.cov_v + m.epsilon * Eigen::MatrixXd::Identity(d, d));
  return m;
}

GaussianModel fit_gaussian(const Eigen::MatrixXd& samples_v,
                           const Eigen::MatrixXd& samples_w) {
  require_dims(samples_v.rows() == samples_w.rows() &&
                   samples_v.cols() == samples_w.cols(),
               "fit_gaussian: V and W sample matrices differ in shape");
  if (samples_v.rows() < 2)
    throw ArgumentError("fit_gaussian: need at least 2 samples");
  if (samples_v.cols() < 1) throw DimensionError("fit_gaussian: zero dimension");
  require_finite(samples_v, "fit_gaussian: V samples");
  require_finite(samples_w, "fit_gaussian: W samples");

  Eigen::VectorXd mean_v, mean_w;
  Eigen::MatrixXd cov_v, cov_w;
  linalg::mean_and_covariance(samples_v, mean_v, cov_v);
  mean_w = samples_w.colwise().mean().transpose();
  const Eigen::MatrixXd centered_w = samples_w.rowwise() - mean_w.transpose();
  Eigen::VectorXd std_w =
      (centered_w.colwise().squaredNorm().transpose() /
       static_cast<double>(samples_w.rows() - 1))
          .cwiseSqrt();
  return make_model(std::move(mean_v), std::move(cov_v), std::move(mean_w),
                    std::move(std_w), static_cast<std::size_t>(samples_v.rows()));
}

GaussianModel fit_gaussian(const Eigen::MatrixXd& samples) {
  return fit_gaussian(samples, samples);
}

double mahalanobis_sq(const GaussianModel& model,
                      const Eigen::Ref<const Eigen::VectorXd>& v) {
  check_dim(model, v.size(), "mahalanobis_sq");
  const Eigen::VectorXd diff = v - model.mean_v;
  const Eigen::VectorXd y = model.chol.triangularView<Eigen::Lower>().solve(diff);
  return y.squaredNorm();
}

double mahalanobis_sq(const GaussianModel& model, const LatentV& v) {
  return mahalanobis_sq(model, v.values);
}

Eigen::VectorXd mahalanobis_sq_grad(const GaussianModel& model,
                                    const Eigen::Ref<const Eigen::VectorXd>& v) {
  check_dim(model, v.size(), "mahalanobis_sq_grad");
  return 2.0 * linalg::cholesky_solve(model.chol, v - model.mean_v);
}

Eigen::VectorXd mahalanobis_sq_grad(const GaussianModel& model, const LatentV& v) {
  return mahalanobis_sq_grad(model, v.values);
}

Eigen::MatrixXd sample_latents(const GaussianModel& model, std::uint64_t seed,
                               std::size_t n) {
  if (n < 1) throw ArgumentError("sample_latents: n must be >= 1");
  const Eigen::Index d = model.dim;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  parallel_for(n, [&](std::size_t i) {
    Rng rng = make_rng(split_seed(seed, i));
    Eigen::VectorXd xi(d);
    fill_normal(rng, {xi.data(), static_cast<std::size_t>(d)});
    out.row(static_cast<Eigen::Index>(i)) =
        (model.mean_v + model.chol.triangularView<Eigen::Lower>() * xi).transpose();
  });
  return out;
}

double frechet_distance(const GaussianModel& a, const GaussianModel& b) {
  require_dims(a.dim == b.dim, "frechet_distance: dimension mismatch");
  const double mean_term = (a.mean_v - b.mean_v).squaredNorm();
  const Eigen::MatrixXd root_a = linalg::symmetric_sqrt(a.cov_v);
  const Eigen::MatrixXd inner = root_a * b.cov_v * root_a;
  const Eigen::MatrixXd cross = linalg::symmetric_sqrt(inner);
  const double trace_term = a.cov_v.trace() + b.cov_v.trace() - 2.0 * cross.trace();
  return std::max(0.0, mean_term + trace_term);
}

std::string check_invariants(const GaussianModel& m, double tol) {
  std::ostringstream err;
  const Eigen::Index d = m.dim;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  const double orth = (m.eigvecs.transpose() * m.eigvecs - id).cwiseAbs().maxCoeff();
  if (orth > 1e-10) err << "eigvecs not orthonormal (" << orth << ")";
  const double recon =
      (m.eigvecs * m.eigvals.asDiagonal() * m.eigvecs.transpose() - m.cov_v)
          .cwiseAbs()
          .maxCoeff();
  if (err.tellp() == 0 && recon > tol) err << "eigen reconstruction off by " << recon;
  const double chol =
      (m.chol * m.chol.transpose() - (m.cov_v + m.epsilon * id)).cwiseAbs().maxCoeff();
  if (err.tellp() == 0 && chol > tol) err << "cholesky product off by " << chol;
  for (Eigen::Index i = 0; err.tellp() == 0 && i < d; ++i) {
    if (m.eigvals(i) < 0.0) err << "negative eigenvalue at " << i;
    else if (i > 0 && m.eigvals(i) > m.eigvals(i - 1))
      err << "eigenvalues not descending at " << i;
  }
  return err.str();
}

nlohmann::json to_json(const GaussianModel& m) {
  return {
      {"dim", m.dim},
      {"sample_count", m.sample_count},
      {"mean_v", vector_json(m.mean_v)},
      {"mean_w", vector_json(m.mean_w)},
      {"std_w", vector_json(m.std_w)},
      {"cov_v", matrix_json(m.cov_v)},
      {"eigvals", vector_json(m.eigvals)},
      {"eigvecs", matrix_json(m.eigvecs)},
      {"epsilon", m.epsilon},
  };
}

GaussianModel model_from_json(const nlohmann::json& doc) {
  try {
    const int d = doc.at("dim").get<int>();
    if (d < 1) throw FormatError("model json: dim must be positive");
    GaussianModel m;
    m.dim = d;
    m.sample_count = doc.at("sample_count").get<std::size_t>();
    m.mean_v = vector_from(doc, "mean_v", d);
    m.mean_w = vector_from(doc, "mean_w", d);
    m.std_w = vector_from(doc, "std_w", d);
    m.cov_v = matrix_from(doc, "cov_v", d);
    m.eigvals = vector_from(doc, "eigvals", d);
    m.eigvecs = matrix_from(doc, "eigvecs", d);
    m.epsilon = doc.at("epsilon").get<double>();
    m.chol = linalg::cholesky_lower(
        m.cov_v + m.epsilon * Eigen::MatrixXd::Identity(d, d));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model json: ") + e.what());
  }
}

}  // namespace latent
