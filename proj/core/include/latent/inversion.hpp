#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latent/feature_net.hpp"
#include "latent/gaussian_model.hpp"
#include "latent/generator.hpp"
#include "latent/types.hpp"

namespace latent {

enum class TargetSpace { W, WPlus };
enum class LossKind { PixelMse, FeatureProxy };

std::string to_string(TargetSpace space);
std::string to_string(LossKind kind);
TargetSpace parse_target_space(const std::string& text);
LossKind parse_loss_kind(const std::string& text);

struct NoiseRamp {
  double initial_std_factor = 0.05;
  double ramp_fraction = 0.75;
};

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct InversionConfig {
  TargetSpace target_space = TargetSpace::W;
  double prior_weight = 1e-4;  // lambda
  double learning_rate = 0.1;
  int iterations = 1000;
  NoiseRamp noise;
  AdamParams adam;
  LossKind loss = LossKind::PixelMse;
  std::uint64_t seed = 0;

  /// Defaults for a target space: W uses lr 0.1 / 1000 iterations, W+ uses
  /// lr 0.05 / 10000 iterations.
  static InversionConfig defaults_for(TargetSpace space);

  /// Throws ArgumentError on lambda < 0, iterations < 1, or a ramp fraction
  /// outside (0, 1].
  void validate() const;
};

nlohmann::json to_json(const InversionConfig& config);
/// Missing keys keep the defaults of the document's target space.
InversionConfig inversion_config_from_json(const nlohmann::json& doc);

struct InversionResult {
  TargetSpace space = TargetSpace::W;
  Eigen::MatrixXd latent;  // 1 x d for W, s x d for W+
  std::vector<double> loss_trace;
  std::vector<double> prior_trace;
  double final_image_error = 0.0;
  int iterations_run = 0;
  InversionConfig config;

  LatentW latent_w() const;               // W results only
  StyleStack latent_stack(int scales) const;  // broadcasts W results
};

nlohmann::json to_json(const InversionResult& result);
InversionResult inversion_result_from_json(const nlohmann::json& doc);

struct LossValue {
  double loss = 0.0;
  Eigen::VectorXd cotangent;  // d loss / d image_a
};

/// pixel-mse: mean squared difference, gradient 2 (a - b) / N.
/// feature-proxy: mean squared difference of proxy_feature_net features.
LossValue reconstruction_loss(const Image& image_a, const Image& image_b, LossKind kind);

/// The fixed random feature network used by the feature-proxy loss for
/// images with `input_size` values. Built once per size and shared.
const FeatureNet& proxy_feature_net(Eigen::Index input_size);

struct AdamState {
  Eigen::MatrixXd m;
  Eigen::MatrixXd v;
  long step = 0;
};

/// Bias-corrected ADAM. Updates `state` in place and returns the parameter
/// delta -lr * m_hat / (sqrt(v_hat) + eps). A fresh (empty) state is sized
/// from the gradient.
Eigen::MatrixXd adam_step(AdamState& state, const Eigen::MatrixXd& gradient, double lr,
                          const AdamParams& params);

/// Objective L(I, G(x)) + lambda * prior(x) and its gradient with respect to
/// the parameters (1 x d for W, s x d for W+).
struct ObjectiveValue {
  double loss = 0.0;
  double prior = 0.0;  // unweighted energy; 0 when lambda == 0
  double total = 0.0;
  Eigen::MatrixXd gradient;
};

ObjectiveValue inversion_objective(const Image& target, const GeneratorBundle& bundle,
                                   const GaussianModel& model, const InversionConfig& config,
                                   const Eigen::MatrixXd& params);

/// Initial parameters: mean_w, broadcast to every row for W+.
Eigen::MatrixXd initial_latent(const GeneratorBundle& bundle, const GaussianModel& model,
                               TargetSpace space);

/// Solves the (optionally regularized) inversion with ADAM and a
/// ramped-down latent noise. Each iteration evaluates the objective at
/// latent + noise and applies the update to the latent. Traces record the
/// values at those evaluation points; final_image_error is measured at the
/// returned latent. `start` overrides the mean_w initializer.
InversionResult invert(const Image& target, const GeneratorBundle& bundle,
                       const GaussianModel& model, const InversionConfig& config,
                       const std::optional<Eigen::MatrixXd>& start = std::nullopt);

}  // namespace latent
