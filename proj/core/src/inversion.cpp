#include "latent/inversion.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "latent/error.hpp"
#include "latent/feature_net.hpp"
#include "latent/latent_spaces.hpp"
#include "latent/rng.hpp"

namespace latent {
namespace {

constexpr std::uint64_t kProxyNetSeed = 0x5EEDF00DULL;

std::vector<double> matrix_rows(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  return flat;
}

}  // namespace

std::string to_string(TargetSpace space) {
  return space == TargetSpace::W ? "w" : "wplus";
}

std::string to_string(LossKind kind) {
  return kind == LossKind::PixelMse ? "pixel-mse" : "feature-proxy";
}

TargetSpace parse_target_space(const std::string& text) {
  if (text == "w" || text == "W") return TargetSpace::W;
  if (text == "wplus" || text == "w+" || text == "W+") return TargetSpace::WPlus;
  throw ArgumentError("unknown target space '" + text + "' (expected w or wplus)");
}

LossKind parse_loss_kind(const std::string& text) {
  if (text == "pixel-mse") return LossKind::PixelMse;
  if (text == "feature-proxy") return LossKind::FeatureProxy;
  throw ArgumentError("unknown loss '" + text + "' (expected pixel-mse or feature-proxy)");
}

InversionConfig InversionConfig::defaults_for(TargetSpace space) {
  InversionConfig c;
  c.target_space = space;
  if (space == TargetSpace::WPlus) {
    c.learning_rate = 0.05;
    c.iterations = 10000;
  }
  return c;
}

void InversionConfig::validate() const {
  if (!(prior_weight >= 0.0)) throw ArgumentError("prior weight must be >= 0");
  if (iterations < 1) throw ArgumentError("iterations must be >= 1");
  if (!(noise.ramp_fraction > 0.0 && noise.ramp_fraction <= 1.0))
    throw ArgumentError("noise ramp fraction must lie in (0, 1]");
  if (!(noise.initial_std_factor >= 0.0))
    throw ArgumentError("noise std factor must be >= 0");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
}

nlohmann::json to_json(const InversionConfig& c) {
  return {{"target_space", to_string(c.target_space)},
          {"prior_weight", c.prior_weight},
          {"learning_rate", c.learning_rate},
          {"iterations", c.iterations},
          {"noise_std_factor", c.noise.initial_std_factor},
          {"noise_ramp_fraction", c.noise.ramp_fraction},
          {"adam_beta1", c.adam.beta1},
          {"adam_beta2", c.adam.beta2},
          {"adam_epsilon", c.adam.epsilon},
          {"loss", to_string(c.loss)},
          {"seed", c.seed}};
}

InversionConfig inversion_config_from_json(const nlohmann::json& doc) {
  try {
    const TargetSpace space =
        parse_target_space(doc.value("target_space", std::string("w")));
    InversionConfig c = InversionConfig::defaults_for(space);
    c.prior_weight = doc.value("prior_weight", c.prior_weight);
    c.learning_rate = doc.value("learning_rate", c.learning_rate);
    c.iterations = doc.value("iterations", c.iterations);
    c.noise.initial_std_factor = doc.value("noise_std_factor", c.noise.initial_std_factor);
    c.noise.ramp_fraction = doc.value("noise_ramp_fraction", c.noise.ramp_fraction);
    c.adam.beta1 = doc.value("adam_beta1", c.adam.beta1);
    c.adam.beta2 = doc.value("adam_beta2", c.adam.beta2);
    c.adam.epsilon = doc.value("adam_epsilon", c.adam.epsilon);
    c.loss = parse_loss_kind(doc.value("loss", to_string(c.loss)));
    c.seed = doc.value("seed", c.seed);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("inversion config: ") + e.what());
  }
}

LatentW InversionResult::latent_w() const {
  if (space != TargetSpace::W) throw ArgumentError("latent_w: result is in W+");
  return {latent.row(0).transpose()};
}

StyleStack InversionResult::latent_stack(int scales) const {
  if (space == TargetSpace::W) return broadcast_style(latent_w(), scales);
  return {latent};
}

nlohmann::json to_json(const InversionResult& r) {
  return {{"space", to_string(r.space)},
          {"scales", r.latent.rows()},
          {"dim", r.latent.cols()},
          {"latent", matrix_rows(r.latent)},
          {"loss_trace", r.loss_trace},
          {"prior_trace", r.prior_trace},
          {"final_image_error", r.final_image_error},
          {"iterations_run", r.iterations_run},
          {"config", to_json(r.config)}};
}

InversionResult inversion_result_from_json(const nlohmann::json& doc) {
  try {
    InversionResult r;
    r.space = parse_target_space(doc.at("space").get<std::string>());
    const auto rows = doc.at("scales").get<Eigen::Index>();
    const auto cols = doc.at("dim").get<Eigen::Index>();
    const auto flat = doc.at("latent").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
      throw FormatError("inversion result: latent has wrong length");
    r.latent.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        r.latent(i, j) = flat[static_cast<std::size_t>(i * cols + j)];
    r.loss_trace = doc.at("loss_trace").get<std::vector<double>>();
    r.prior_trace = doc.at("prior_trace").get<std::vector<double>>();
    r.final_image_error = doc.at("final_image_error").get<double>();
    r.iterations_run = doc.at("iterations_run").get<int>();
    r.config = inversion_config_from_json(doc.at("config"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("inversion result: ") + e.what());
  }
}

const FeatureNet& proxy_feature_net(Eigen::Index input_size) {
  static std::mutex mu;
  static std::map<Eigen::Index, FeatureNet> nets;
  std::lock_guard lock(mu);
  auto it = nets.find(input_size);
  if (it == nets.end())
    it = nets.emplace(input_size, make_feature_net(kProxyNetSeed, input_size)).first;
  return it->second;
}

LossValue reconstruction_loss(const Image& a, const Image& b, LossKind kind) {
  require_dims(a.size() == b.size() && a.height == b.height && a.width == b.width &&
                   a.channels == b.channels,
               "reconstruction_loss: image shapes differ");
  LossValue out;
  if (kind == LossKind::PixelMse) {
    const Eigen::VectorXd diff = a.pixels - b.pixels;
    const double n = static_cast<double>(diff.size());
    out.loss = diff.squaredNorm() / n;
    out.cotangent = (2.0 / n) * diff;
    return out;
  }
  const FeatureNet& net = proxy_feature_net(a.size());
  const Eigen::VectorXd diff = embed(net, a.pixels) - embed(net, b.pixels);
  const double k = static_cast<double>(diff.size());
  out.loss = diff.squaredNorm() / k;
  out.cotangent = embed_vjp(net, a.pixels, (2.0 / k) * diff);
  return out;
}

Eigen::MatrixXd adam_step(AdamState& state, const Eigen::MatrixXd& g, double lr,
                          const AdamParams& p) {
  if (state.step == 0 && state.m.size() == 0) {
    state.m = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    state.v = Eigen::MatrixXd::Zero(g.rows(), g.cols());
  }
  require_dims(state.m.rows() == g.rows() && state.m.cols() == g.cols() &&
                   state.v.rows() == g.rows() && state.v.cols() == g.cols(),
               "adam_step: gradient shape differs from moment buffers");
  ++state.step;
  state.m = p.beta1 * state.m + (1.0 - p.beta1) * g;
  state.v = p.beta2 * state.v + (1.0 - p.beta2) * g.cwiseProduct(g);
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(p.beta1, t);
  const double c2 = 1.0 - std::pow(p.beta2, t);
  return (-lr * (state.m.array() / c1) /
          ((state.v.array() / c2).sqrt() + p.epsilon))
      .matrix();
}

ObjectiveValue inversion_objective(const Image& target, const GeneratorBundle& bundle,
                                   const GaussianModel& model, const InversionConfig& config,
                                   const Eigen::MatrixXd& params) {
  const int s = bundle.dims.scales;
  const int d = bundle.dims.latent_dim;
  const bool plus = config.target_space == TargetSpace::WPlus;
  require_dims(params.cols() == d && params.rows() == (plus ? s : 1),
               "inversion_objective: parameter shape does not match target space");

  const StyleStack stack =
      plus ? StyleStack{params} : broadcast_style(LatentW{params.row(0).transpose()}, s);
  const Image image = synthesize(bundle, stack);
  const LossValue rec = reconstruction_loss(image, target, config.loss);
  const Eigen::MatrixXd g_stack = synthesize_vjp(bundle, stack, rec.cotangent);

  ObjectiveValue out;
  out.loss = rec.loss;
  out.gradient = plus ? g_stack : Eigen::MatrixXd(g_stack.colwise().sum());
  if (config.prior_weight > 0.0) {
    require_dims(model.dim == d, "inversion_objective: model dimension mismatch");
    if (plus) {
      out.prior = mahalanobis_sq_plus(model, stack);
      out.gradient += config.prior_weight * prior_grad_plus(model, stack);
    } else {
      const LatentW w{params.row(0).transpose()};
      out.prior = mahalanobis_sq(model, w_to_v(w));
      out.gradient.row(0) += config.prior_weight * prior_grad_w(model, w).transpose();
    }
  }
  out.total = out.loss + config.prior_weight * out.prior;
  return out;
}

Eigen::MatrixXd initial_latent(const GeneratorBundle& bundle, const GaussianModel& model,
                               TargetSpace space) {
  require_dims(model.dim == bundle.dims.latent_dim, "initial_latent: model dimension mismatch");
  const int rows = space == TargetSpace::WPlus ? bundle.dims.scales : 1;
  return model.mean_w.transpose().replicate(rows, 1);
}

InversionResult invert(const Image& target, const GeneratorBundle& bundle,
                       const GaussianModel& model, const InversionConfig& config,
                       const std::optional<Eigen::MatrixXd>& start) {
  config.validate();
  require_dims(target.size() == bundle.dims.image_size(),
               "invert: target image does not match generator output shape");
  require_dims(model.dim == bundle.dims.latent_dim, "invert: model dimension mismatch");

  InversionResult result;
  result.space = config.target_space;
  result.config = config;
  Eigen::MatrixXd params = start ? *start : initial_latent(bundle, model, config.target_space);
  require_dims(params.cols() == bundle.dims.latent_dim &&
                   params.rows() == (config.target_space == TargetSpace::WPlus
                                         ? bundle.dims.scales
                                         : 1),
               "invert: start latent has the wrong shape");

  const double latent_scale = model.std_w.norm();
  const double ramp_end = config.noise.ramp_fraction * config.iterations;
  Rng rng = make_rng(split_seed(config.seed, stream::kInversionNoise));
  AdamState adam;
  Eigen::MatrixXd noise(params.rows(), params.cols());
  result.loss_trace.reserve(static_cast<std::size_t>(config.iterations));
  result.prior_trace.reserve(static_cast<std::size_t>(config.iterations));

  for (int t = 0; t < config.iterations; ++t) {
    const double ramp = std::max(0.0, 1.0 - t / ramp_end);
    const double noise_std = config.noise.initial_std_factor * latent_scale * ramp * ramp;
    fill_normal(rng, {noise.data(), static_cast<std::size_t>(noise.size())});
    const ObjectiveValue obj =
        inversion_objective(target, bundle, model, config, params + noise_std * noise);
    if (!std::isfinite(obj.total) || !obj.gradient.allFinite())
      throw NumericalError("invert: objective diverged at iteration " + std::to_string(t),
                           t);
    result.loss_trace.push_back(obj.loss);
    result.prior_trace.push_back(obj.prior);
    params += adam_step(adam, obj.gradient, config.learning_rate, config.adam);
  }

  result.latent = params;
  result.iterations_run = config.iterations;
  const Image final_image = synthesize(bundle, result.latent_stack(bundle.dims.scales));
  result.final_image_error = reconstruction_loss(final_image, target, config.loss).loss;
  if (!std::isfinite(result.final_image_error))
    throw NumericalError("invert: final image error is not finite", config.iterations);
  return result;
}

}  // namespace latent
