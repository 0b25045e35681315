#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <vector>

#include "latent/types.hpp"

namespace latent {

/// Shape record of the toy generator. Together with the seed it determines
/// every weight bit-exactly.
struct GeneratorDims {
  int latent_dim = 32;      // d
  int hidden_width = 512;   // h
  int mapping_layers = 3;   // L hidden layers
  int scales = 4;           // s
  int channels = 8;         // feature channels c
  int base_resolution = 2;  // side of the learned constant
  int image_channels = 3;

  /// Side length of the output image: base * 2^(s - 1).
  int image_resolution() const;
  int image_size() const;  // res * res * image_channels

  bool operator==(const GeneratorDims&) const = default;
};

/// Fixed scalar constants of the synthesis network. They are part of the
/// architecture rather than the seeded weights.
/// Every weight matrix is drawn as N(0, (gain * sqrt(2 / fan_in))^2); the
/// gains below are 1 unless listed.
struct ArchitectureConstants {
  double mapping_bias_std = 0.1;
  double style_scale_gain = 0.25;  // style -> channel scale
  double style_bias_gain = 0.15;   // style -> channel bias
  double output_gain = 2.0;        // to-RGB
  double noise_strength = 0.2;
  double demod_epsilon = 1e-8;
  bool demodulate = true;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
  double slope = 0.2;
};

/// M: Z -> W. z is rescaled to norm sqrt(d) on entry (pixel normalization),
/// then passes through L + 1 dense layers, each followed by LRU_0.2.
struct MappingNetwork {
  std::vector<DenseLayer> layers;
};

struct SynthesisScale {
  Eigen::MatrixXd style_to_scale;  // c x d
  Eigen::MatrixXd style_to_bias;   // c x d
  Eigen::MatrixXd mixing;          // c x c
  Eigen::MatrixXd noise;           // pixels x c, fixed
};

/// G: W+ -> image. Each scale upsamples (nearest, x2; not the first),
/// multiplies channels by a style-dependent scale, mixes channels with
/// demodulated weights, adds a style-dependent bias and the fixed noise map,
/// then applies LRU_0.2. A linear to-RGB map produces the image.
struct SynthesisNetwork {
  Eigen::MatrixXd constant;  // base_res^2 x c
  std::vector<SynthesisScale> stages;
  Eigen::MatrixXd to_rgb;    // image_channels x c
  Eigen::VectorXd rgb_bias;
};

struct GeneratorBundle {
  GeneratorDims dims;
  std::uint64_t seed = 0;
  ArchitectureConstants constants;
  MappingNetwork mapping;
  SynthesisNetwork synthesis;
};

GeneratorBundle init_generator(std::uint64_t seed, const GeneratorDims& dims = {});
GeneratorBundle init_generator(std::uint64_t seed, const GeneratorDims& dims,
                               const ArchitectureConstants& constants);

/// Standard normal vector normalized to unit length.
Eigen::VectorXd sample_z(std::uint64_t seed, int dim);

LatentW map_latent(const GeneratorBundle& bundle, const Eigen::VectorXd& z);

Image synthesize(const GeneratorBundle& bundle, const StyleStack& stack);
/// The W pathway: synthesize(broadcast_style(w, s)).
Image synthesize(const GeneratorBundle& bundle, const LatentW& w);

/// Exact reverse-mode gradient of <cotangent, synthesize(stack)> with
/// respect to every style entry. Returns a scales x dim matrix.
Eigen::MatrixXd synthesize_vjp(const GeneratorBundle& bundle, const StyleStack& stack,
                               const Eigen::VectorXd& image_cotangent);

/// Maps n latents with z_i = sample_z(split_seed(seed, first_index + i)).
/// Rows are latents; v = w_to_v(w) row by row. Work is chunked by index, so
/// the output does not depend on the thread count.
struct MappedBatch {
  Eigen::MatrixXd w;
  Eigen::MatrixXd v;
};
MappedBatch map_batch(const GeneratorBundle& bundle, std::uint64_t seed, std::size_t n,
                      std::size_t first_index = 0);

/// Bundle persistence: dims, constants and seed; weights are regenerated on
/// load. Missing constants fall back to the defaults.
nlohmann::json to_json(const GeneratorDims& dims);
GeneratorDims dims_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ArchitectureConstants& constants);
ArchitectureConstants constants_from_json(const nlohmann::json& doc);
nlohmann::json bundle_to_json(const GeneratorBundle& bundle);
GeneratorBundle bundle_from_json(const nlohmann::json& doc);

}  // namespace latent
