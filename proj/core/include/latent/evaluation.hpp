#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "latent/correction.hpp"
#include "latent/feature_net.hpp"
#include "latent/gaussian_model.hpp"
#include "latent/generator.hpp"
#include "latent/inversion.hpp"
#include "latent/types.hpp"

namespace latent {

/// Euclidean norm of the difference (the whole s x d stack for W+).
double latent_error(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

/// Frechet distance between Gaussians fit to the features of two image sets.
double fid_proxy(const std::vector<Image>& images_a, const std::vector<Image>& images_b,
                 const FeatureNet& net);

/// Cosine similarity of the two feature vectors, 0 if either is zero.
double identity_similarity(const Image& image_a, const Image& image_b, const FeatureNet& net);

/// Mean over pixels of the per-pixel standard deviation across the batch.
double mean_pixel_std(const std::vector<Image>& images);

/// Seeds of the fixed feature networks, derived from a command seed.
FeatureNet fid_feature_net(std::uint64_t seed, Eigen::Index input_size);
FeatureNet identity_feature_net(std::uint64_t seed, Eigen::Index input_size);

// ---------------------------------------------------------------------------
// Interpolation experiment

/// The 11-point grid {0, 0.1, ..., 1}.
std::vector<double> default_t_grid();

struct Condition {
  std::string label;
  InversionConfig config;
};

enum class TargetSource { Generated, Foreign };
std::string to_string(TargetSource source);
TargetSource parse_target_source(const std::string& text);

struct InterpolationSettings {
  std::vector<Condition> conditions;
  int pairs = 20;
  std::vector<double> t_grid = default_t_grid();
  std::uint64_t seed = 0;
  /// Start every inversion at its true latent instead of mean_w.
  bool oracle_start = false;
  /// Generated: targets come from the inverted generator. Foreign: targets
  /// come from a second generator seeded with foreign_seed, so no true
  /// latent exists in the inverted model and latent errors are absent.
  TargetSource targets = TargetSource::Generated;
  std::uint64_t foreign_seed = 1;

  /// Throws ArgumentError on an empty condition list, pairs < 1, or a grid
  /// outside [0, 1] that lacks 0, 0.5 or 1.
  void validate() const;
};

nlohmann::json to_json(const InterpolationSettings& settings);
InterpolationSettings interpolation_settings_from_json(const nlohmann::json& doc);

struct EndpointRecord {
  double image_error = 0.0;                 // final_image_error of the inversion
  std::optional<double> latent_error;       // absent for foreign targets
  double prior_energy = 0.0;                // unweighted energy of the estimate
};

struct PairRecord {
  std::string condition;
  int pair = 0;
  bool failed = false;
  std::string failure;
  EndpointRecord endpoints[2];
  std::vector<double> curve;  // one error per t
};

struct ConditionSummary {
  std::string label;
  InversionConfig config;
  int pairs_ok = 0;
  int pairs_failed = 0;
  std::vector<double> mean_error;  // per t
  std::vector<double> std_error;   // per t, sample std (0 for one pair)
  double mean_endpoint_error = 0.0;
  double median_latent_error = 0.0;  // NaN when no latent errors exist
  double mean_prior_energy = 0.0;
};

struct ExperimentReport {
  std::string kind;
  std::vector<double> t_grid;
  std::vector<ConditionSummary> conditions;
  std::vector<PairRecord> records;

  const ConditionSummary& condition(const std::string& label) const;
};

/// For each pair, draws two true latents (one style for W conditions, s
/// distinct styles for W+), renders the targets, inverts both, and compares
/// the interpolation of the estimates with the true interpolation at every
/// t using the condition's reconstruction loss. Interpolation happens in
/// the condition's space. Latents and inversion seeds depend only on
/// (settings.seed, pair, endpoint), so every condition sees the same
/// targets and the same noise; each condition's own config.seed is ignored.
ExperimentReport interpolation_experiment(const GeneratorBundle& bundle,
                                          const GaussianModel& model,
                                          const InterpolationSettings& settings);

/// Rebuilds the condition summaries from the raw records.
std::vector<ConditionSummary> summarize(const std::vector<Condition>& conditions,
                                        const std::vector<PairRecord>& records,
                                        std::size_t grid_size);

/// The default sweep grid {0, 1e-5, 1e-4, 1e-3}.
std::vector<double> default_lambda_grid();

/// One interpolation condition per lambda, all derived from `base`, labeled
/// "lambda=<value>".
ExperimentReport lambda_sweep(const GeneratorBundle& bundle, const GaussianModel& model,
                              const InversionConfig& base, const std::vector<double>& grid,
                              InterpolationSettings settings);

std::string lambda_label(double lambda);

// ---------------------------------------------------------------------------
// Principal-component magnitudes

struct PcGroupStats {
  int count = 0;
  Eigen::VectorXd mean;  // per dimension, |v^p_i|
  Eigen::VectorXd std;
};

struct PcProfile {
  int k = 0;
  double threshold = 0.0;  // tau * sigma
  PcGroupStats flagged;    // max_i |v^p_i| > threshold over all d coordinates
  PcGroupStats unflagged;
  double flagged_fraction() const;
};

/// Rows of `latents_w` are W latents.
PcProfile pc_magnitude_profile(const Eigen::MatrixXd& latents_w, const GaussianModel& model,
                               int k, double tau);

/// Gaussian prediction of the flagged fraction:
/// 1 - prod_i P(|N(0, lambda_i)| <= threshold).
double predicted_flag_fraction(const GaussianModel& model, double tau);

nlohmann::json to_json(const PcProfile& profile);

// ---------------------------------------------------------------------------
// Truncation / compression trade-off

struct TradeoffSettings {
  std::vector<double> psi_values = {0.5, 0.7, 0.85};
  int samples = 2048;
  std::uint64_t seed = 0;
  double match_tolerance = 0.05;  // relative fid mismatch accepted
  double tau_low = 1e-3;
  double tau_high = 20.0;
  int max_bisections = 60;

  void validate() const;
};

nlohmann::json to_json(const TradeoffSettings& settings);
TradeoffSettings tradeoff_settings_from_json(const nlohmann::json& doc);

struct OperatingPoint {
  double psi = 0.0;
  double tau = 0.0;
  bool matched = false;
  double fid_truncation = 0.0;
  double fid_compression = 0.0;
  double identity_truncation = 0.0;
  double identity_compression = 0.0;
  double pixel_std_truncation = 0.0;
  double pixel_std_compression = 0.0;
};

struct TradeoffReport {
  int samples = 0;
  double fid_uncorrected = 0.0;
  double pixel_std_uncorrected = 0.0;
  std::vector<OperatingPoint> points;
};

/// Draws `samples` W latents and an independent reference batch of the same
/// size. For each psi it measures the fid_proxy of the truncated batch
/// against the reference, then bisects log(tau) until the compressed
/// batch's fid_proxy lies within the tolerance of it. Identity similarity
/// compares each corrected image with its uncorrected original.
TradeoffReport fid_tradeoff(const GeneratorBundle& bundle, const GaussianModel& model,
                            const TradeoffSettings& settings);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const ExperimentReport& report);
nlohmann::json to_json(const TradeoffReport& report);

/// One CSV per condition, named curve_<label>.csv, with columns
/// t,mean_error,std_error,condition. Returns the written paths.
std::vector<std::filesystem::path> write_curve_csvs(const std::filesystem::path& directory,
                                                    const ExperimentReport& report);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace latent
