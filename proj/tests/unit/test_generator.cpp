#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "latent/error.hpp"
#include "latent/generator.hpp"
#include "latent/latent_spaces.hpp"
#include "test_support.hpp"

using namespace latent;
using namespace latent::testing;

namespace {

bool same_weights(const GeneratorBundle& a, const GeneratorBundle& b) {
  if (a.mapping.layers.size() != b.mapping.layers.size()) return false;
  for (std::size_t i = 0; i < a.mapping.layers.size(); ++i)
    if (a.mapping.layers[i].weight != b.mapping.layers[i].weight ||
        a.mapping.layers[i].bias != b.mapping.layers[i].bias)
      return false;
  if (a.synthesis.constant != b.synthesis.constant || a.synthesis.to_rgb != b.synthesis.to_rgb)
    return false;
  for (std::size_t k = 0; k < a.synthesis.stages.size(); ++k) {
    const auto& x = a.synthesis.stages[k];
    const auto& y = b.synthesis.stages[k];
    if (x.style_to_scale != y.style_to_scale || x.style_to_bias != y.style_to_bias ||
        x.mixing != y.mixing || x.noise != y.noise)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("init_generator is deterministic and seed-dependent") {
  const GeneratorBundle a = init_generator(5, small_dims());
  const GeneratorBundle b = init_generator(5, small_dims());
  const GeneratorBundle c = init_generator(6, small_dims());
  CHECK(same_weights(a, b));
  CHECK_FALSE(same_weights(a, c));
}

TEST_CASE("init_generator shapes follow the dims") {
  const GeneratorDims d = small_dims();
  const GeneratorBundle g = init_generator(1, d);
  CHECK(g.mapping.layers.size() == static_cast<std::size_t>(d.mapping_layers + 1));
  CHECK(g.mapping.layers.front().weight.cols() == d.latent_dim);
  CHECK(g.mapping.layers.back().weight.rows() == d.latent_dim);
  for (const auto& layer : g.mapping.layers) CHECK(layer.slope == 0.2);
  CHECK(g.synthesis.stages.size() == static_cast<std::size_t>(d.scales));
  CHECK(d.image_resolution() == 8);
  CHECK(synthesize(g, LatentW{Eigen::VectorXd::Zero(8)}).size() == 8 * 8 * 3);
  const GeneratorDims defaults;
  CHECK(defaults.image_resolution() == 16);
}

TEST_CASE("a hidden width of one is a valid network") {
  GeneratorDims d = small_dims();
  d.hidden_width = 1;
  const GeneratorBundle g = init_generator(2, d);
  const LatentW w = map_latent(g, sample_z(3, d.latent_dim));
  CHECK(all_finite(w.values));
  CHECK(all_finite(synthesize(g, w).pixels));
}

TEST_CASE("invalid dims are rejected") {
  GeneratorDims d = small_dims();
  d.scales = 0;
  CHECK_THROWS_AS(init_generator(1, d), ArgumentError);
}

TEST_CASE("sample_z is a unit vector with zero mean") {
  CHECK(std::abs(sample_z(9, 32).norm() - 1.0) < 1e-12);
  CHECK(sample_z(9, 32) == sample_z(9, 32));
  CHECK(sample_z(9, 32) != sample_z(10, 32));
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(8);
  for (std::uint64_t i = 0; i < 50000; ++i) mean += sample_z(split_seed(77, i), 8);
  mean /= 50000.0;
  CHECK(mean.cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("map_latent at z = 0 is the frozen bias chain") {
  const GeneratorBundle g = init_generator(0, small_dims());
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(8);
  const LatentW w = map_latent(g, z);
  // Independent recomputation: only biases flow when z = 0.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(8);
  for (const auto& layer : g.mapping.layers) x = lru(layer.weight * x + layer.bias, 0.2);
  CHECK(w.values == x);
  // Values recorded from the first build.
  const double frozen[8] = {0.079048707882671071,  0.46997339911215275,  0.24352264090366266,
                            0.081138466449670904,  0.21523347495436762,  -0.019336839125689884,
                            0.01945692010231212,   0.049368467352620071};
  for (int i = 0; i < 8; ++i) CHECK(w.values(i) == doctest::Approx(frozen[i]).epsilon(1e-12));
  CHECK_THROWS_AS(map_latent(g, Eigen::VectorXd::Zero(7)), DimensionError);
}

TEST_CASE("mapping is affine where every pre-activation is positive") {
  // A constructed network: identity layers with a large positive bias keep
  // every unit on the positive branch for small inputs.
  GeneratorDims d = small_dims();
  d.hidden_width = 8;
  GeneratorBundle g = init_generator(4, d);
  for (auto& layer : g.mapping.layers) {
    layer.weight = Eigen::MatrixXd::Identity(8, 8);
    layer.bias = Eigen::VectorXd::Constant(8, 10.0);
  }
  const Eigen::VectorXd z1 = sample_z(1, 8);
  const Eigen::VectorXd z2 = sample_z(2, 8);
  const Eigen::VectorXd w1 = map_latent(g, z1).values;
  const Eigen::VectorXd w2 = map_latent(g, z2).values;
  const double scale = std::sqrt(8.0);
  const double bias_total = 10.0 * static_cast<double>(g.mapping.layers.size());
  CHECK((w1.array() - scale * z1.array() - bias_total).abs().maxCoeff() < 1e-12);
  CHECK(((w1 - w2) - scale * (z1 - z2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("map_batch rows match map_latent and ignore thread count") {
  const GeneratorBundle g = init_generator(3, small_dims());
  const MappedBatch b = map_batch(g, 42, 10, 5);
  for (Eigen::Index i = 0; i < 10; ++i) {
    const Eigen::VectorXd z = sample_z(split_seed(42, 5 + static_cast<std::uint64_t>(i)), 8);
    CHECK(b.w.row(i).transpose() == map_latent(g, z).values);
    CHECK(b.v.row(i).transpose() == w_to_v(LatentW{b.w.row(i).transpose()}).values);
  }
  const MappedBatch full = map_batch(g, 42, 15);
  CHECK(full.w.bottomRows(10) == b.w);
}

TEST_CASE("broadcast stacks match the single-style pathway") {
  const GeneratorBundle g = init_generator(7, small_dims());
  const LatentW w = map_latent(g, sample_z(1, 8));
  CHECK(synthesize(g, w) == synthesize(g, broadcast_style(w, 3)));
  CHECK(synthesize(g, w) == synthesize(g, w));
}

TEST_CASE("the finest row changes the image") {
  const GeneratorBundle g = init_generator(7, small_dims());
  StyleStack s{random_matrix(8, 3, 8)};
  const Image before = synthesize(g, s);
  s.styles.row(2) += random_vector(9, 8).transpose();
  CHECK((synthesize(g, s).pixels - before.pixels).norm() > 1e-6);
  CHECK_THROWS_AS(synthesize(g, StyleStack{Eigen::MatrixXd::Zero(2, 8)}), DimensionError);
}

TEST_CASE("synthesize_vjp matches central differences") {
  for (bool demod : {true, false}) {
    ArchitectureConstants k;
    k.demodulate = demod;
    const GeneratorBundle g = init_generator(11, small_dims(), k);
    for (std::uint64_t probe = 0; probe < 3; ++probe) {
      const Eigen::MatrixXd x = random_matrix(100 + probe, 3, 8, 0.8);
      const Eigen::VectorXd cot = random_vector(200 + probe, 8 * 8 * 3);
      const Eigen::MatrixXd grad = synthesize_vjp(g, StyleStack{x}, cot);
      const Eigen::MatrixXd fd = finite_difference(
          [&](const Eigen::MatrixXd& y) { return cot.dot(synthesize(g, StyleStack{y}).pixels); },
          x, 1e-6);
      int bad = 0;
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (relative_error(grad.data()[i], fd.data()[i], 1e-4) > 1e-4) ++bad;
      CHECK(bad == 0);
    }
  }
}

TEST_CASE("synthesize_vjp is linear in the cotangent") {
  const GeneratorBundle g = init_generator(12, small_dims());
  const StyleStack s{random_matrix(13, 3, 8)};
  const Eigen::VectorXd a = random_vector(14, 192);
  const Eigen::VectorXd b = random_vector(15, 192);
  const Eigen::MatrixXd sum = synthesize_vjp(g, s, a + b);
  const Eigen::MatrixXd parts = synthesize_vjp(g, s, a) + synthesize_vjp(g, s, b);
  CHECK((sum - parts).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(synthesize_vjp(g, s, Eigen::VectorXd::Zero(192)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(synthesize_vjp(g, s, Eigen::VectorXd::Zero(10)), DimensionError);
}

TEST_CASE("bundle JSON round trip regenerates identical weights") {
  ArchitectureConstants k;
  k.noise_strength = 0.5;
  k.demodulate = false;
  const GeneratorBundle g = init_generator(21, small_dims(), k);
  const GeneratorBundle r = bundle_from_json(bundle_to_json(g));
  CHECK(r.seed == 21);
  CHECK(r.dims == g.dims);
  CHECK(r.constants.noise_strength == 0.5);
  CHECK_FALSE(r.constants.demodulate);
  CHECK(same_weights(g, r));
  CHECK(bundle_to_json(r).dump() == bundle_to_json(g).dump());
}

TEST_CASE("malformed bundle JSON is a format error") {
  nlohmann::json doc = bundle_to_json(init_generator(1, small_dims()));
  doc.erase("format");
  CHECK_THROWS_AS(bundle_from_json(doc), FormatError);
  CHECK_THROWS_AS(bundle_from_json(nlohmann::json::array()), FormatError);
}
