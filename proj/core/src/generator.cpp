#include "latent/generator.hpp"

#include <cmath>
#include <string>

#include "latent/error.hpp"
#include "latent/latent_spaces.hpp"
#include "latent/parallel.hpp"
#include "latent/rng.hpp"

namespace latent {
namespace {

constexpr std::size_t kMapChunk = 256;

Eigen::MatrixXd normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                              double stddev) {
  Eigen::MatrixXd m(rows, cols);
  fill_normal(rng, {m.data(), static_cast<std::size_t>(m.size())}, 0.0, stddev);
  return m;
}

Eigen::VectorXd normal_vector(Rng& rng, Eigen::Index n, double stddev) {
  Eigen::VectorXd v(n);
  fill_normal(rng, {v.data(), static_cast<std::size_t>(n)}, 0.0, stddev);
  return v;
}

double he_std(Eigen::Index fan_in) { return std::sqrt(2.0 / static_cast<double>(fan_in)); }

void validate_dims(const GeneratorDims& d) {
  if (d.latent_dim < 1 || d.hidden_width < 1 || d.mapping_layers < 1 ||
      d.scales < 1 || d.channels < 1 || d.base_resolution < 1 ||
      d.image_channels < 1)
    throw ArgumentError("generator dims must all be >= 1");
  if (d.scales > 12) throw ArgumentError("generator dims: too many scales");
}

// Per-stage activations kept for the backward pass.
struct StageCache {
  Eigen::MatrixXd input;    // P x c, after upsampling
  Eigen::VectorXd scale;    // c
  Eigen::VectorXd demod;    // c
  Eigen::MatrixXd mixed;    // P x c, before demodulation
  Eigen::MatrixXd pre;      // P x c, before the activation
};

struct ForwardTrace {
  std::vector<StageCache> stages;
  Eigen::MatrixXd features;  // P x c output of the last stage
};

Eigen::MatrixXd upsample(const Eigen::MatrixXd& x, int res) {
  const int out_res = 2 * res;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(out_res) * out_res, x.cols());
  for (int y = 0; y < out_res; ++y)
    for (int xx = 0; xx < out_res; ++xx)
      out.row(y * out_res + xx) = x.row((y / 2) * res + xx / 2);
  return out;
}

Eigen::MatrixXd downsample_sum(const Eigen::MatrixXd& g, int res) {
  const int out_res = 2 * res;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(res) * res, g.cols());
  for (int y = 0; y < out_res; ++y)
    for (int xx = 0; xx < out_res; ++xx)
      out.row((y / 2) * res + xx / 2) += g.row(y * out_res + xx);
  return out;
}

void check_stack(const GeneratorBundle& b, const StyleStack& stack) {
  if (stack.scales() != b.dims.scales || stack.dim() != b.dims.latent_dim)
    throw DimensionError("synthesize: expected a " + std::to_string(b.dims.scales) +
                         "x" + std::to_string(b.dims.latent_dim) + " style stack, got " +
                         std::to_string(stack.scales()) + "x" +
                         std::to_string(stack.dim()));
}

ForwardTrace forward(const GeneratorBundle& b, const StyleStack& stack) {
  check_stack(b, stack);
  const SynthesisNetwork& net = b.synthesis;
  const ArchitectureConstants& k = b.constants;
  ForwardTrace trace;
  trace.stages.reserve(net.stages.size());

  Eigen::MatrixXd x = net.constant;
  int res = b.dims.base_resolution;
  for (std::size_t s = 0; s < net.stages.size(); ++s) {
    const SynthesisScale& stage = net.stages[s];
    StageCache cache;
    if (s > 0) {
      x = upsample(x, res);
      res *= 2;
    }
    const Eigen::VectorXd style = stack.styles.row(static_cast<Eigen::Index>(s)).transpose();
    cache.scale = Eigen::VectorXd::Ones(stage.style_to_scale.rows()) +
                  stage.style_to_scale * style;
    const Eigen::VectorXd bias = stage.style_to_bias * style;

    // Demodulation normalizes each output channel of the modulated mixing
    // weights M diag(scale).
    const Eigen::MatrixXd modulated = stage.mixing * cache.scale.asDiagonal();
    cache.demod = (modulated.rowwise().squaredNorm().array() + k.demod_epsilon).rsqrt();
    if (!k.demodulate) cache.demod.setOnes();

    cache.mixed = (x * cache.scale.asDiagonal()) * stage.mixing.transpose();
    cache.pre = cache.mixed * cache.demod.asDiagonal();
    cache.pre.rowwise() += bias.transpose();
    cache.pre += k.noise_strength * stage.noise;
    cache.input = std::move(x);
    x = lru_matrix(cache.pre, kForwardSlope);
    trace.stages.push_back(std::move(cache));
  }
  trace.features = std::move(x);
  return trace;
}

Image to_image(const GeneratorBundle& b, const Eigen::MatrixXd& features) {
  const int res = b.dims.image_resolution();
  Eigen::MatrixXd rgb = features * b.synthesis.to_rgb.transpose();
  rgb.rowwise() += b.synthesis.rgb_bias.transpose();
  Image img;
  img.height = res;
  img.width = res;
  img.channels = b.dims.image_channels;
  img.pixels.resize(rgb.size());
  // Row-major pixels, channels fastest.
  for (Eigen::Index p = 0; p < rgb.rows(); ++p)
    for (Eigen::Index c = 0; c < rgb.cols(); ++c)
      img.pixels(p * rgb.cols() + c) = rgb(p, c);
  return img;
}

}  // namespace

int GeneratorDims::image_resolution() const {
  return base_resolution * (1 << (scales - 1));
}

int GeneratorDims::image_size() const {
  return image_resolution() * image_resolution() * image_channels;
}

GeneratorBundle init_generator(std::uint64_t seed, const GeneratorDims& dims) {
  return init_generator(seed, dims, ArchitectureConstants{});
}

GeneratorBundle init_generator(std::uint64_t seed, const GeneratorDims& dims,
                               const ArchitectureConstants& constants) {
  validate_dims(dims);
  GeneratorBundle b;
  b.dims = dims;
  b.seed = seed;
  b.constants = constants;
  const ArchitectureConstants& k = b.constants;
  Rng rng = make_rng(split_seed(seed, stream::kWeights));

  const int d = dims.latent_dim;
  const int h = dims.hidden_width;
  std::vector<int> widths{d};
  for (int i = 0; i < dims.mapping_layers; ++i) widths.push_back(h);
  widths.push_back(d);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    DenseLayer layer;
    layer.weight = normal_matrix(rng, widths[i + 1], widths[i], he_std(widths[i]));
    layer.bias = normal_vector(rng, widths[i + 1], k.mapping_bias_std);
    layer.slope = kForwardSlope;
    b.mapping.layers.push_back(std::move(layer));
  }

  const int c = dims.channels;
  const int base = dims.base_resolution;
  b.synthesis.constant = normal_matrix(rng, base * base, c, 1.0);
  int res = base;
  for (int s = 0; s < dims.scales; ++s) {
    if (s > 0) res *= 2;
    SynthesisScale stage;
    stage.style_to_scale = normal_matrix(rng, c, d, k.style_scale_gain * he_std(d));
    stage.style_to_bias = normal_matrix(rng, c, d, k.style_bias_gain * he_std(d));
    stage.mixing = normal_matrix(rng, c, c, he_std(c));
    stage.noise = normal_matrix(rng, res * res, c, 1.0);
    b.synthesis.stages.push_back(std::move(stage));
  }
  b.synthesis.to_rgb = normal_matrix(rng, dims.image_channels, c, k.output_gain * he_std(c));
  b.synthesis.rgb_bias = Eigen::VectorXd::Zero(dims.image_channels);
  return b;
}

Eigen::VectorXd sample_z(std::uint64_t seed, int dim) {
  if (dim < 1) throw ArgumentError("sample_z: dim must be >= 1");
  Rng rng = make_rng(seed);
  Eigen::VectorXd z = normal_vector(rng, dim, 1.0);
  double norm = z.norm();
  while (!(norm > 0.0)) {
    z = normal_vector(rng, dim, 1.0);
    norm = z.norm();
  }
  return z / norm;
}

namespace {

// Columns of `z` are inputs; returns the columns of W.
Eigen::MatrixXd map_columns(const GeneratorBundle& b, const Eigen::MatrixXd& z) {
  Eigen::MatrixXd x = z * std::sqrt(static_cast<double>(b.dims.latent_dim));
  for (const DenseLayer& layer : b.mapping.layers) {
    Eigen::MatrixXd pre = layer.weight * x;
    pre.colwise() += layer.bias;
    x = lru_matrix(pre, layer.slope);
  }
  return x;
}

}  // namespace

LatentW map_latent(const GeneratorBundle& b, const Eigen::VectorXd& z) {
  if (z.size() != b.dims.latent_dim)
    throw DimensionError("map_latent: z has dimension " + std::to_string(z.size()) +
                         ", expected " + std::to_string(b.dims.latent_dim));
  require_finite(z, "map_latent: z");
  const Eigen::MatrixXd w = map_columns(b, z);
  return {w.col(0)};
}

MappedBatch map_batch(const GeneratorBundle& b, std::uint64_t seed, std::size_t n,
                      std::size_t first_index) {
  const int d = b.dims.latent_dim;
  MappedBatch out{Eigen::MatrixXd(static_cast<Eigen::Index>(n), d),
                  Eigen::MatrixXd(static_cast<Eigen::Index>(n), d)};
  const std::size_t chunks = (n + kMapChunk - 1) / kMapChunk;
  parallel_for(chunks, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kMapChunk;
    const std::size_t count = std::min(kMapChunk, n - begin);
    Eigen::MatrixXd z(d, static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i)
      z.col(static_cast<Eigen::Index>(i)) =
          sample_z(split_seed(seed, first_index + begin + i), d);
    const Eigen::MatrixXd w = map_columns(b, z);
    const auto rows = static_cast<Eigen::Index>(begin);
    const auto m = static_cast<Eigen::Index>(count);
    out.w.middleRows(rows, m) = w.transpose();
    out.v.middleRows(rows, m) = lru_matrix(w.transpose(), kInverseSlope);
  });
  return out;
}

Image synthesize(const GeneratorBundle& b, const StyleStack& stack) {
  return to_image(b, forward(b, stack).features);
}

Image synthesize(const GeneratorBundle& b, const LatentW& w) {
  if (w.dim() != b.dims.latent_dim)
    throw DimensionError("synthesize: latent dimension mismatch");
  return synthesize(b, broadcast_style(w, b.dims.scales));
}

Eigen::MatrixXd synthesize_vjp(const GeneratorBundle& b, const StyleStack& stack,
                               const Eigen::VectorXd& image_cotangent) {
  if (image_cotangent.size() != b.dims.image_size())
    throw DimensionError("synthesize_vjp: cotangent has " +
                         std::to_string(image_cotangent.size()) + " entries, expected " +
                         std::to_string(b.dims.image_size()));
  const ForwardTrace trace = forward(b, stack);
  const SynthesisNetwork& net = b.synthesis;
  const int ic = b.dims.image_channels;
  const Eigen::Index pixels = trace.features.rows();

  Eigen::MatrixXd g_rgb(pixels, ic);
  for (Eigen::Index p = 0; p < pixels; ++p)
    for (int c = 0; c < ic; ++c) g_rgb(p, c) = image_cotangent(p * ic + c);
  Eigen::MatrixXd g_x = g_rgb * net.to_rgb;  // P x c

  Eigen::MatrixXd grad(b.dims.scales, b.dims.latent_dim);
  int res = b.dims.image_resolution();
  for (std::size_t si = net.stages.size(); si-- > 0;) {
    const SynthesisScale& stage = net.stages[si];
    const StageCache& cache = trace.stages[si];

    Eigen::MatrixXd g_pre = g_x;
    for (Eigen::Index j = 0; j < g_pre.cols(); ++j)
      for (Eigen::Index p = 0; p < g_pre.rows(); ++p)
        if (cache.pre(p, j) < 0.0) g_pre(p, j) *= kForwardSlope;

    const Eigen::VectorXd g_bias = g_pre.colwise().sum().transpose();
    // pre = mixed * diag(demod) + ...
    const Eigen::VectorXd g_demod =
        (g_pre.cwiseProduct(cache.mixed)).colwise().sum().transpose();
    const Eigen::MatrixXd g_mixed = g_pre * cache.demod.asDiagonal();
    // mixed = (input * diag(scale)) * M^T
    const Eigen::MatrixXd g_scaled = g_mixed * stage.mixing;
    Eigen::VectorXd g_scale =
        (g_scaled.cwiseProduct(cache.input)).colwise().sum().transpose();
    // demod_i = (sum_j M_ij^2 scale_j^2 + eps)^(-1/2)
    const Eigen::VectorXd demod_cubed = cache.demod.array().cube();
    const Eigen::MatrixXd m_sq = stage.mixing.array().square();
    if (b.constants.demodulate) g_scale += (m_sq.transpose() * g_demod.cwiseProduct(demod_cubed))
                   .cwiseProduct(cache.scale) * -1.0;

    grad.row(static_cast<Eigen::Index>(si)) =
        (stage.style_to_scale.transpose() * g_scale +
         stage.style_to_bias.transpose() * g_bias)
            .transpose();

    if (si > 0) {
      const Eigen::MatrixXd g_input = g_scaled * cache.scale.asDiagonal();
      res /= 2;
      g_x = downsample_sum(g_input, res);
    }
  }
  return grad;
}

nlohmann::json to_json(const GeneratorDims& d) {
  return {{"latent_dim", d.latent_dim},
          {"hidden_width", d.hidden_width},
          {"mapping_layers", d.mapping_layers},
          {"scales", d.scales},
          {"channels", d.channels},
          {"base_resolution", d.base_resolution},
          {"image_channels", d.image_channels},
          {"image_height", d.image_resolution()},
          {"image_width", d.image_resolution()}};
}

GeneratorDims dims_from_json(const nlohmann::json& doc) {
  GeneratorDims d;
  try {
    d.latent_dim = doc.value("latent_dim", d.latent_dim);
    d.hidden_width = doc.value("hidden_width", d.hidden_width);
    d.mapping_layers = doc.value("mapping_layers", d.mapping_layers);
    d.scales = doc.value("scales", d.scales);
    d.channels = doc.value("channels", d.channels);
    d.base_resolution = doc.value("base_resolution", d.base_resolution);
    d.image_channels = doc.value("image_channels", d.image_channels);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("generator dims: ") + e.what());
  }
  validate_dims(d);
  if (doc.contains("image_height") &&
      doc.at("image_height").get<int>() != d.image_resolution())
    throw FormatError("generator dims: image_height inconsistent with scales");
  if (doc.contains("image_width") &&
      doc.at("image_width").get<int>() != d.image_resolution())
    throw FormatError("generator dims: image_width inconsistent with scales");
  return d;
}

nlohmann::json to_json(const ArchitectureConstants& k) {
  return {{"mapping_bias_std", k.mapping_bias_std}, {"style_scale_gain", k.style_scale_gain},
          {"style_bias_gain", k.style_bias_gain},   {"output_gain", k.output_gain},
          {"noise_strength", k.noise_strength},     {"demod_epsilon", k.demod_epsilon},
          {"demodulate", k.demodulate}};
}

ArchitectureConstants constants_from_json(const nlohmann::json& doc) {
  ArchitectureConstants k;
  try {
    k.mapping_bias_std = doc.value("mapping_bias_std", k.mapping_bias_std);
    k.style_scale_gain = doc.value("style_scale_gain", k.style_scale_gain);
    k.style_bias_gain = doc.value("style_bias_gain", k.style_bias_gain);
    k.output_gain = doc.value("output_gain", k.output_gain);
    k.noise_strength = doc.value("noise_strength", k.noise_strength);
    k.demod_epsilon = doc.value("demod_epsilon", k.demod_epsilon);
    k.demodulate = doc.value("demodulate", k.demodulate);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("architecture constants: ") + e.what());
  }
  return k;
}

nlohmann::json bundle_to_json(const GeneratorBundle& b) {
  return {{"format", "latent-generator"}, {"version", 1}, {"seed", b.seed},
          {"dims", to_json(b.dims)}, {"constants", to_json(b.constants)}};
}

GeneratorBundle bundle_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", std::string{}) != "latent-generator")
      throw FormatError("bundle json: missing format tag 'latent-generator'");
    const ArchitectureConstants k = doc.contains("constants")
                                        ? constants_from_json(doc.at("constants"))
                                        : ArchitectureConstants{};
    return init_generator(doc.at("seed").get<std::uint64_t>(),
                          dims_from_json(doc.at("dims")), k);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bundle json: ") + e.what());
  }
}

}  // namespace latent
