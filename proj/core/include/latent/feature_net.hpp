#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "latent/types.hpp"

namespace latent {

/// Fixed random two-layer network image -> R^k: a hidden LRU_0.2 layer
/// followed by a linear read-out. Stands in for pretrained perceptual and
/// embedding networks wherever image features are needed.
struct FeatureNet {
  Eigen::MatrixXd hidden_weight;  // hidden x input
  Eigen::VectorXd hidden_bias;
  Eigen::MatrixXd output_weight;  // k x hidden
  Eigen::VectorXd output_bias;

  Eigen::Index input_size() const { return hidden_weight.cols(); }
  Eigen::Index output_size() const { return output_weight.rows(); }
};

FeatureNet make_feature_net(std::uint64_t seed, Eigen::Index input_size,
                            Eigen::Index hidden = 128, Eigen::Index output = 64);

Eigen::VectorXd embed(const FeatureNet& net, const Eigen::VectorXd& pixels);

/// Gradient of <cotangent, embed(pixels)> with respect to the pixels.
Eigen::VectorXd embed_vjp(const FeatureNet& net, const Eigen::VectorXd& pixels,
                          const Eigen::VectorXd& cotangent);

/// One row of features per image.
Eigen::MatrixXd embed_batch(const FeatureNet& net, const std::vector<Image>& images);

}  // namespace latent
