#include "latent/correction.hpp"

#include <cmath>

#include "latent/error.hpp"
#include "latent/latent_spaces.hpp"

namespace latent {

std::string to_string(CorrectionMethod method) {
  return method == CorrectionMethod::Truncation ? "truncation" : "compression";
}

CorrectionMethod parse_correction_method(const std::string& text) {
  if (text == "truncation") return CorrectionMethod::Truncation;
  if (text == "compression") return CorrectionMethod::Compression;
  throw ArgumentError("unknown correction method '" + text +
                      "' (expected truncation or compression)");
}

void CorrectionConfig::validate() const {
  if (!(psi >= 0.0 && psi <= 1.0)) throw ArgumentError("psi must lie in [0, 1]");
  if (!(tau > 0.0)) throw ArgumentError("tau must be positive");
}

nlohmann::json to_json(const CorrectionConfig& c) {
  return {{"method", to_string(c.method)}, {"psi", c.psi}, {"tau", c.tau}};
}

CorrectionConfig correction_config_from_json(const nlohmann::json& doc) {
  try {
    CorrectionConfig c;
    c.method = parse_correction_method(doc.value("method", to_string(c.method)));
    c.psi = doc.value("psi", c.psi);
    c.tau = doc.value("tau", c.tau);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("correction config: ") + e.what());
  }
}

LatentW truncate(const LatentW& w, const GaussianModel& model, double psi) {
  require_dims(w.dim() == model.dim, "truncate: dimension mismatch");
  return {psi * w.values + (1.0 - psi) * model.mean_w};
}

Eigen::VectorXd to_pc(const LatentV& v, const GaussianModel& model) {
  require_dims(v.dim() == model.dim, "to_pc: dimension mismatch");
  return model.eigvecs.transpose() * (v.values - model.mean_v);
}

LatentV from_pc(const Eigen::VectorXd& pc, const GaussianModel& model) {
  require_dims(pc.size() == model.dim, "from_pc: dimension mismatch");
  return {model.eigvecs * pc + model.mean_v};
}

Eigen::VectorXd compress_pc(const Eigen::VectorXd& pc, double threshold) {
  if (!(threshold > 0.0)) throw ArgumentError("compress_pc: threshold must be positive");
  return pc.unaryExpr([threshold](double x) {
    const double a = std::abs(x);
    if (!(a > threshold)) return x;
    return std::copysign(threshold * (std::log(a / threshold) + 1.0), x);
  });
}

double compression_threshold(const GaussianModel& model, double tau) {
  return tau * model.max_sigma();
}

LatentW correct_latent(const LatentW& w, const GaussianModel& model,
                       const CorrectionConfig& config) {
  config.validate();
  if (config.method == CorrectionMethod::Truncation) return truncate(w, model, config.psi);
  require_dims(w.dim() == model.dim, "correct_latent: dimension mismatch");
  const double threshold = compression_threshold(model, config.tau);
  const Eigen::VectorXd pc = to_pc(w_to_v(w), model);
  // Untouched coordinates skip the basis round trip so that in-threshold
  // latents come back as exactly as the LRU pair allows.
  if ((pc.array().abs() <= threshold).all()) return v_to_w(w_to_v(w));
  return v_to_w(from_pc(compress_pc(pc, threshold), model));
}

StyleStack correct_stack(const StyleStack& stack, const GaussianModel& model,
                         const CorrectionConfig& config) {
  StyleStack out{Eigen::MatrixXd(stack.scales(), stack.dim())};
  for (Eigen::Index k = 0; k < stack.scales(); ++k)
    out.styles.row(k) = correct_latent(stack.row(k), model, config).values.transpose();
  return out;
}

}  // namespace latent
