#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <string>

#include "latent/gaussian_model.hpp"
#include "latent/types.hpp"

namespace latent {

enum class CorrectionMethod { Truncation, Compression };

std::string to_string(CorrectionMethod method);
CorrectionMethod parse_correction_method(const std::string& text);

struct CorrectionConfig {
  CorrectionMethod method = CorrectionMethod::Compression;
  double psi = 0.7;  // truncation factor
  double tau = 0.5;  // compression factor

  /// Throws ArgumentError unless 0 <= psi <= 1 and tau > 0.
  void validate() const;
};

nlohmann::json to_json(const CorrectionConfig& config);
CorrectionConfig correction_config_from_json(const nlohmann::json& doc);

/// psi * w + (1 - psi) * mean_w.
LatentW truncate(const LatentW& w, const GaussianModel& model, double psi);

/// PC coordinates E^T (v - mu) and their inverse E v^p + mu.
Eigen::VectorXd to_pc(const LatentV& v, const GaussianModel& model);
LatentV from_pc(const Eigen::VectorXd& pc, const GaussianModel& model);

/// Coordinates with |x| > threshold become
/// sign(x) * threshold * (ln(|x| / threshold) + 1); the rest pass through.
Eigen::VectorXd compress_pc(const Eigen::VectorXd& pc, double threshold);

/// tau * max_sigma.
double compression_threshold(const GaussianModel& model, double tau);

/// w -> v -> v^p -> compress -> v -> w, or truncation, per config.
LatentW correct_latent(const LatentW& w, const GaussianModel& model,
                       const CorrectionConfig& config);

/// Applies correct_latent to every row independently.
StyleStack correct_stack(const StyleStack& stack, const GaussianModel& model,
                         const CorrectionConfig& config);

}  // namespace latent
