#include "latent/feature_net.hpp"

#include <cmath>

#include "latent/error.hpp"
#include "latent/latent_spaces.hpp"
#include "latent/parallel.hpp"
#include "latent/rng.hpp"

namespace latent {

FeatureNet make_feature_net(std::uint64_t seed, Eigen::Index input_size,
                            Eigen::Index hidden, Eigen::Index output) {
  if (input_size < 1 || hidden < 1 || output < 1)
    throw ArgumentError("make_feature_net: sizes must be >= 1");
  Rng rng = make_rng(seed);
  auto draw = [&rng](Eigen::Index rows, Eigen::Index cols, double stddev) {
    Eigen::MatrixXd m(rows, cols);
    fill_normal(rng, {m.data(), static_cast<std::size_t>(m.size())}, 0.0, stddev);
    return m;
  };
  FeatureNet net;
  net.hidden_weight = draw(hidden, input_size, std::sqrt(2.0 / static_cast<double>(input_size)));
  net.hidden_bias = draw(hidden, 1, 0.1);
  net.output_weight = draw(output, hidden, std::sqrt(1.0 / static_cast<double>(hidden)));
  net.output_bias = Eigen::VectorXd::Zero(output);
  return net;
}

Eigen::VectorXd embed(const FeatureNet& net, const Eigen::VectorXd& pixels) {
  require_dims(pixels.size() == net.input_size(), "embed: image size mismatch");
  const Eigen::VectorXd hidden =
      lru(net.hidden_weight * pixels + net.hidden_bias, kForwardSlope);
  return net.output_weight * hidden + net.output_bias;
}

Eigen::VectorXd embed_vjp(const FeatureNet& net, const Eigen::VectorXd& pixels,
                          const Eigen::VectorXd& cotangent) {
  require_dims(pixels.size() == net.input_size(), "embed_vjp: image size mismatch");
  require_dims(cotangent.size() == net.output_size(), "embed_vjp: cotangent size mismatch");
  const Eigen::VectorXd pre = net.hidden_weight * pixels + net.hidden_bias;
  const Eigen::VectorXd g_hidden = (net.output_weight.transpose() * cotangent)
                                       .cwiseProduct(lru_derivative(pre, kForwardSlope));
  return net.hidden_weight.transpose() * g_hidden;
}

Eigen::MatrixXd embed_batch(const FeatureNet& net, const std::vector<Image>& images) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(images.size()), net.output_size());
  parallel_for(images.size(), [&](std::size_t i) {
    out.row(static_cast<Eigen::Index>(i)) = embed(net, images[i].pixels).transpose();
  });
  return out;
}

}  // namespace latent
