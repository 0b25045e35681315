#include "commands.hpp"

#include <latent/correction.hpp>
#include <latent/error.hpp>
#include <latent/evaluation.hpp>
#include <latent/gaussian_model.hpp>
#include <latent/generator.hpp>
#include <latent/image_io.hpp>
#include <latent/inversion.hpp>
#include <latent/io_util.hpp>
#include <latent/latent_io.hpp>
#include <latent/latent_spaces.hpp>
#include <latent/parallel.hpp>
#include <latent/rng.hpp>

#include <algorithm>
#include <chrono>

namespace latentctl {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Shared helpers

std::string input_path(const json& inputs, const std::string& key) {
  const std::string path = inputs.at(key).get<std::string>();
  if (!fs::exists(path)) throw latent::ArgumentError("--" + kebab(key) + ": no such file: " + path);
  return path;
}

latent::GeneratorBundle load_generator(const json& inputs) {
  return latent::bundle_from_json(latent::io::read_json(input_path(inputs, "generator")));
}

latent::GaussianModel load_model(const json& inputs) {
  return latent::model_from_json(latent::io::read_json(input_path(inputs, "model")));
}

void require_model_matches(const latent::GeneratorBundle& b, const latent::GaussianModel& m) {
  if (m.dim != b.dims.latent_dim)
    throw latent::DimensionError("model dimension " + std::to_string(m.dim) +
                                 " does not match generator latent_dim " +
                                 std::to_string(b.dims.latent_dim));
}

template <typename T>
T get(const json& config, const std::string& key) {
  return config.at(key).get<T>();
}

/// Fills null iteration / learning-rate fields from the space defaults.
latent::InversionConfig inversion_config(json& config, latent::TargetSpace space) {
  const latent::InversionConfig defaults = latent::InversionConfig::defaults_for(space);
  if (config.at("iterations").is_null()) config["iterations"] = defaults.iterations;
  if (config.at("learning_rate").is_null()) config["learning_rate"] = defaults.learning_rate;
  json doc = latent::to_json(defaults);
  doc["target_space"] = latent::to_string(space);
  for (const char* key : {"prior_weight", "learning_rate", "iterations", "noise_std_factor",
                          "noise_ramp_fraction", "adam_beta1", "adam_beta2", "adam_epsilon",
                          "loss", "seed"})
    if (config.contains(key)) doc[key] = config.at(key);
  return latent::inversion_config_from_json(doc);
}

std::vector<Param> optimizer_params() {
  return {
      {"learning_rate", ParamType::Double, nullptr, "ADAM step size (default 0.1 for w, 0.05 for wplus)"},
      {"iterations", ParamType::Int, nullptr, "Optimizer iterations (default 1000 for w, 10000 for wplus)", {"iters"}},
      {"noise_std_factor", ParamType::Double, 0.05, "Initial latent-noise std as a multiple of |std_w|"},
      {"noise_ramp_fraction", ParamType::Double, 0.75, "Fraction of iterations over which the noise decays"},
      {"adam_beta1", ParamType::Double, 0.9, "ADAM first-moment decay"},
      {"adam_beta2", ParamType::Double, 0.999, "ADAM second-moment decay"},
      {"adam_epsilon", ParamType::Double, 1e-8, "ADAM denominator offset"},
      {"loss", ParamType::String, "pixel-mse", "Reconstruction loss: pixel-mse or feature-proxy"},
  };
}

std::vector<Param> interpolation_common_params() {
  std::vector<Param> p = {
      {"pairs", ParamType::Int, 20, "Interpolation pairs per condition"},
      {"seed", ParamType::Seed, 0, "Seed for target latents and inversion noise"},
      {"t_grid", ParamType::DoubleList, latent::default_t_grid(), "Interpolation positions"},
      {"targets", ParamType::String, "generated", "Target source: generated or foreign"},
      {"foreign_seed", ParamType::Seed, 1, "Generator seed used for foreign targets"},
      {"oracle_start", ParamType::Bool, false, "Start each inversion at its true latent"},
  };
  for (Param& q : optimizer_params()) p.push_back(std::move(q));
  return p;
}

latent::InterpolationSettings interpolation_settings(const json& config) {
  latent::InterpolationSettings s;
  s.pairs = get<int>(config, "pairs");
  s.seed = get<std::uint64_t>(config, "seed");
  s.t_grid = get<std::vector<double>>(config, "t_grid");
  s.targets = latent::parse_target_source(get<std::string>(config, "targets"));
  s.foreign_seed = get<std::uint64_t>(config, "foreign_seed");
  s.oracle_start = get<bool>(config, "oracle_start");
  return s;
}

std::vector<std::string> write_report(const fs::path& out_dir,
                                      const latent::ExperimentReport& report) {
  std::vector<std::string> files{"report.json"};
  latent::io::write_json(out_dir / "report.json", latent::to_json(report));
  for (const auto& path : latent::write_curve_csvs(out_dir, report))
    files.push_back(path.filename().string());
  return files;
}

json failure_counts(const latent::ExperimentReport& report) {
  json out = json::object();
  for (const auto& c : report.conditions) out[c.label] = c.pairs_failed;
  return out;
}

// ---------------------------------------------------------------------------
// Commands

RunOutput run_init_gan(json& config, const json&, const fs::path& out_dir) {
  latent::GeneratorDims dims;
  dims.latent_dim = get<int>(config, "latent_dim");
  dims.hidden_width = get<int>(config, "hidden_width");
  dims.mapping_layers = get<int>(config, "mapping_layers");
  dims.scales = get<int>(config, "scales");
  dims.channels = get<int>(config, "channels");
  dims.base_resolution = get<int>(config, "base_resolution");
  dims.image_channels = get<int>(config, "image_channels");
  const auto bundle = latent::init_generator(get<std::uint64_t>(config, "seed"), dims);
  latent::io::write_json(out_dir / "generator.json", latent::bundle_to_json(bundle));
  return {{"generator.json"}, {{"image_resolution", dims.image_resolution()}}};
}

RunOutput run_fit_prior(json& config, const json& inputs, const fs::path& out_dir) {
  const auto bundle = load_generator(inputs);
  const long long n = get<long long>(config, "samples");
  if (n < 2) throw latent::ArgumentError("--samples must be >= 2 to estimate a covariance");
  const auto seed = get<std::uint64_t>(config, "seed");
  const auto batch = latent::map_batch(bundle, latent::split_seed(seed, latent::stream::kLatentZ),
                                       static_cast<std::size_t>(n));
  const auto model = latent::fit_gaussian(batch.v, batch.w);
  const std::string problem = latent::check_invariants(model);
  if (!problem.empty()) throw latent::NumericalError("fitted model: " + problem);
  latent::io::write_json(out_dir / "model.json", latent::to_json(model));
  return {{"model.json"}, {{"epsilon", model.epsilon}, {"max_sigma", model.max_sigma()}}};
}

RunOutput run_generate(json& config, const json& inputs, const fs::path& out_dir) {
  const auto bundle = load_generator(inputs);
  const long long count = get<long long>(config, "count");
  if (count < 1) throw latent::ArgumentError("--count must be >= 1");
  const auto space = latent::parse_target_space(get<std::string>(config, "space"));
  const int rows = space == latent::TargetSpace::WPlus ? bundle.dims.scales : 1;
  const auto seed = get<std::uint64_t>(config, "seed");
  const auto w = latent::map_batch(bundle, latent::split_seed(seed, latent::stream::kSamples),
                                   static_cast<std::size_t>(count * rows))
                     .w;

  latent::LatentBatch batch{rows, bundle.dims.latent_dim, {}};
  std::vector<latent::Image> images(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i)
    batch.items.push_back(w.middleRows(i * rows, rows));
  latent::parallel_for(images.size(), [&](std::size_t i) {
    const auto& item = batch.items[i];
    images[i] = rows == 1 ? latent::synthesize(bundle, latent::LatentW{item.row(0).transpose()})
                          : latent::synthesize(bundle, latent::StyleStack{item});
  });
  latent::write_latents(out_dir / "latents.latv", batch);
  latent::write_images_raw(out_dir / "images.imgf", images);
  RunOutput out{{"latents.latv", "images.imgf"}, json::object()};
  if (get<bool>(config, "ppm")) {
    latent::write_ppm_batch(out_dir, "image", images);
    for (std::size_t i = 0; i < images.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "image_%04zu.ppm", i);
      out.files.emplace_back(name);
    }
  }
  return out;
}

RunOutput run_invert(json& config, const json& inputs, const fs::path& out_dir) {
  const auto bundle = load_generator(inputs);
  const auto model = load_model(inputs);
  require_model_matches(bundle, model);
  const auto images = latent::read_images_raw(input_path(inputs, "target"));
  const long long index = get<long long>(config, "target_index");
  if (index < 0 || index >= static_cast<long long>(images.size()))
    throw latent::ArgumentError("--target-index out of range (file holds " +
                                std::to_string(images.size()) + " images)");
  const auto space = latent::parse_target_space(get<std::string>(config, "target_space"));
  const latent::InversionConfig ic = inversion_config(config, space);

  const auto result = latent::invert(images[static_cast<std::size_t>(index)], bundle, model, ic);
  latent::io::write_json(out_dir / "result.json", latent::to_json(result));
  const latent::StyleStack stack = result.latent_stack(bundle.dims.scales);
  latent::write_images_raw(out_dir / "reconstruction.imgf", {latent::synthesize(bundle, stack)});
  latent::write_latents(out_dir / "latent.latv",
                        {static_cast<int>(result.latent.rows()), bundle.dims.latent_dim,
                         {result.latent}});
  return {{"result.json", "reconstruction.imgf", "latent.latv"},
          {{"final_image_error", result.final_image_error}}};
}

RunOutput run_correct(json& config, const json& inputs, const fs::path& out_dir) {
  const auto model = load_model(inputs);
  const fs::path in_path = input_path(inputs, "latents");
  const latent::LatentBatch batch = latent::read_latents(in_path);
  if (batch.dim != model.dim)
    throw latent::DimensionError("latents have dim " + std::to_string(batch.dim) +
                                 ", model has " + std::to_string(model.dim));
  latent::CorrectionConfig cc;
  cc.method = latent::parse_correction_method(get<std::string>(config, "method"));
  cc.psi = get<double>(config, "psi");
  cc.tau = get<double>(config, "tau");
  cc.validate();

  latent::LatentBatch out = batch;
  latent::parallel_for(out.items.size(), [&](std::size_t i) {
    out.items[i] = latent::correct_stack(latent::StyleStack{batch.items[i]}, model, cc).styles;
  });
  std::size_t changed = 0;
  for (std::size_t i = 0; i < out.items.size(); ++i)
    if (out.items[i] != batch.items[i]) ++changed;

  const std::string name = in_path.extension() == ".json" ? "latents.json" : "latents.latv";
  latent::write_latents(out_dir / name, out);
  return {{name},
          {{"sigma", model.max_sigma()},
           {"threshold", latent::compression_threshold(model, cc.tau)},
           {"items", out.items.size()},
           {"items_changed", changed}}};
}

RunOutput run_interpolation(json& config, const json& inputs, const fs::path& out_dir) {
  const auto bundle = load_generator(inputs);
  const auto model = load_model(inputs);
  require_model_matches(bundle, model);
  latent::InterpolationSettings s = interpolation_settings(config);
  const double lambda = get<double>(config, "prior_weight");
  const auto spaces = get<std::vector<std::string>>(config, "spaces");
  if (spaces.empty()) throw latent::ArgumentError("--spaces must name at least one space");

  // Per-space defaults are recorded so the manifest is fully explicit.
  json resolved_iterations = json::object();
  json resolved_rates = json::object();
  for (const auto& name : spaces) {
    const auto space = latent::parse_target_space(name);
    json local = config;
    latent::InversionConfig ic = inversion_config(local, space);
    resolved_iterations[name] = ic.iterations;
    resolved_rates[name] = ic.learning_rate;
    const std::string label = latent::to_string(space);
    ic.prior_weight = 0.0;
    s.conditions.push_back({label, ic});
    if (lambda > 0.0) {
      ic.prior_weight = lambda;
      s.conditions.push_back({label + "-prior", ic});
    }
  }
  const auto report = latent::interpolation_experiment(bundle, model, s);
  return {write_report(out_dir, report),
          {{"iterations", resolved_iterations},
           {"learning_rate", resolved_rates},
           {"failed_pairs", failure_counts(report)}}};
}

RunOutput run_lambda_sweep(json& config, const json& inputs, const fs::path& out_dir) {
  const auto bundle = load_generator(inputs);
  const auto model = load_model(inputs);
  require_model_matches(bundle, model);
  const auto space = latent::parse_target_space(get<std::string>(config, "space"));
  const latent::InversionConfig base = inversion_config(config, space);
  const auto report = latent::lambda_sweep(bundle, model, base,
                                           get<std::vector<double>>(config, "lambdas"),
                                           interpolation_settings(config));
  return {write_report(out_dir, report), {{"failed_pairs", failure_counts(report)}}};
}

RunOutput run_fid_tradeoff(json& config, const json& inputs, const fs::path& out_dir) {
  const auto bundle = load_generator(inputs);
  const auto model = load_model(inputs);
  require_model_matches(bundle, model);
  latent::TradeoffSettings s;
  s.psi_values = get<std::vector<double>>(config, "psi_values");
  s.samples = get<int>(config, "samples");
  s.seed = get<std::uint64_t>(config, "seed");
  s.match_tolerance = get<double>(config, "match_tolerance");
  s.tau_low = get<double>(config, "tau_low");
  s.tau_high = get<double>(config, "tau_high");
  s.max_bisections = get<int>(config, "max_bisections");
  const auto report = latent::fid_tradeoff(bundle, model, s);
  latent::io::write_json(out_dir / "report.json", latent::to_json(report));

  std::string csv =
      "psi,tau,matched,fid_truncation,fid_compression,identity_truncation,"
      "identity_compression,pixel_std_truncation,pixel_std_compression\n";
  for (const auto& p : report.points) {
    for (double v : {p.psi, p.tau}) csv += latent::format_double(v) + ",";
    csv += std::string(p.matched ? "1" : "0");
    for (double v : {p.fid_truncation, p.fid_compression, p.identity_truncation,
                     p.identity_compression, p.pixel_std_truncation, p.pixel_std_compression})
      csv += "," + latent::format_double(v);
    csv += "\n";
  }
  latent::io::write_file(out_dir / "tradeoff.csv", csv);
  const auto unmatched =
      std::count_if(report.points.begin(), report.points.end(), [](auto& p) { return !p.matched; });
  return {{"report.json", "tradeoff.csv"}, {{"unmatched_points", unmatched}}};
}

RunOutput run_pc_profile(json& config, const json& inputs, const fs::path& out_dir) {
  const auto bundle = load_generator(inputs);
  const auto model = load_model(inputs);
  require_model_matches(bundle, model);
  const long long n = get<long long>(config, "samples");
  if (n < 1) throw latent::ArgumentError("--samples must be >= 1");
  if (config.at("k").is_null()) config["k"] = std::min(30, model.dim);
  const int k = get<int>(config, "k");
  const double tau = get<double>(config, "tau");
  const auto seed = get<std::uint64_t>(config, "seed");
  const auto w = latent::map_batch(bundle, latent::split_seed(seed, latent::stream::kSamples),
                                   static_cast<std::size_t>(n))
                     .w;
  const auto profile = latent::pc_magnitude_profile(w, model, k, tau);
  latent::io::write_json(out_dir / "profile.json", latent::to_json(profile));

  std::string csv = "component,flagged_mean,flagged_std,unflagged_mean,unflagged_std\n";
  for (int i = 0; i < k; ++i) {
    auto cell = [&](const latent::PcGroupStats& g, bool mean) {
      return g.count == 0 ? std::string() : latent::format_double(mean ? g.mean(i) : g.std(i));
    };
    csv += std::to_string(i) + "," + cell(profile.flagged, true) + "," +
           cell(profile.flagged, false) + "," + cell(profile.unflagged, true) + "," +
           cell(profile.unflagged, false) + "\n";
  }
  latent::io::write_file(out_dir / "profile.csv", csv);
  return {{"profile.json", "profile.csv"},
          {{"flagged_fraction", profile.flagged_fraction()},
           {"predicted_flagged_fraction", latent::predicted_flag_fraction(model, tau)}}};
}

std::vector<CommandSpec> build_commands() {
  const latent::GeneratorDims dims;
  std::vector<CommandSpec> out;

  out.push_back({"init-gan",
                 "Create a seeded toy generator",
                 {},
                 {{"seed", ParamType::Seed, 0, "Weight seed"},
                  {"latent_dim", ParamType::Int, dims.latent_dim, "Latent dimension d"},
                  {"hidden_width", ParamType::Int, dims.hidden_width, "Mapping hidden width"},
                  {"mapping_layers", ParamType::Int, dims.mapping_layers, "Mapping hidden layers"},
                  {"scales", ParamType::Int, dims.scales, "Synthesis scales"},
                  {"channels", ParamType::Int, dims.channels, "Feature channels"},
                  {"base_resolution", ParamType::Int, dims.base_resolution, "Side of the constant input"},
                  {"image_channels", ParamType::Int, dims.image_channels, "Output channels"}},
                 run_init_gan});

  out.push_back({"fit-prior",
                 "Fit the Gaussian latent model to mapped samples",
                 {{"generator", "Generator JSON"}},
                 {{"samples", ParamType::Int, 100000, "Number of latent samples"},
                  {"seed", ParamType::Seed, 0, "Sampling seed"}},
                 run_fit_prior});

  out.push_back({"generate",
                 "Sample latents and render images",
                 {{"generator", "Generator JSON"}},
                 {{"count", ParamType::Int, 16, "Number of images"},
                  {"seed", ParamType::Seed, 0, "Sampling seed"},
                  {"space", ParamType::String, "w", "w (one style) or wplus (one style per scale)"},
                  {"ppm", ParamType::Bool, false, "Also write PPM previews"}},
                 run_generate});

  std::vector<Param> invert_params = {
      {"target_index", ParamType::Int, 0, "Image index within the target file"},
      {"target_space", ParamType::String, "w", "w or wplus", {"space"}},
      {"prior_weight", ParamType::Double, 1e-4, "Prior weight lambda", {"lambda"}},
      {"seed", ParamType::Seed, 0, "Noise seed"},
  };
  for (Param& q : optimizer_params()) invert_params.push_back(std::move(q));
  out.push_back({"invert",
                 "Invert one target image",
                 {{"generator", "Generator JSON"},
                  {"model", "Model JSON"},
                  {"target", "Raw image file (IMGF)"}},
                 invert_params,
                 run_invert});

  out.push_back({"correct",
                 "Apply truncation or compression to a latent batch",
                 {{"model", "Model JSON"}, {"latents", "Latent batch (.latv or .json)"}},
                 {{"method", ParamType::String, "compression", "truncation or compression"},
                  {"psi", ParamType::Double, 0.7, "Truncation factor"},
                  {"tau", ParamType::Double, 0.5, "Compression factor"}},
                 run_correct});

  std::vector<Param> interp = interpolation_common_params();
  interp.push_back({"spaces", ParamType::StringList, json::array({"w", "wplus"}),
                    "Spaces to evaluate (comma separated)"});
  interp.push_back({"prior_weight", ParamType::Double, 1e-4,
                    "Lambda of the prior conditions (0 runs only the plain ones)", {"lambda"}});
  out.push_back({"experiment interpolation",
                 "Interpolation error curves with and without the prior",
                 {{"generator", "Generator JSON"}, {"model", "Model JSON"}},
                 interp,
                 run_interpolation});

  std::vector<Param> sweep = interpolation_common_params();
  sweep.push_back({"space", ParamType::String, "wplus", "w or wplus"});
  sweep.push_back({"lambdas", ParamType::DoubleList, latent::default_lambda_grid(),
                   "Prior weights to sweep (comma separated)"});
  out.push_back({"experiment lambda-sweep",
                 "Interpolation experiment over a grid of prior weights",
                 {{"generator", "Generator JSON"}, {"model", "Model JSON"}},
                 sweep,
                 run_lambda_sweep});

  const latent::TradeoffSettings ts;
  out.push_back({"experiment fid-tradeoff",
                 "Match truncation and compression by fid_proxy and compare them",
                 {{"generator", "Generator JSON"}, {"model", "Model JSON"}},
                 {{"psi_values", ParamType::DoubleList, ts.psi_values, "Truncation factors"},
                  {"samples", ParamType::Int, ts.samples, "Samples per batch"},
                  {"seed", ParamType::Seed, 0, "Sampling seed"},
                  {"match_tolerance", ParamType::Double, ts.match_tolerance, "Relative fid tolerance"},
                  {"tau_low", ParamType::Double, ts.tau_low, "Lower end of the tau search"},
                  {"tau_high", ParamType::Double, ts.tau_high, "Upper end of the tau search"},
                  {"max_bisections", ParamType::Int, ts.max_bisections, "Bisection step limit"}},
                 run_fid_tradeoff});

  out.push_back({"experiment pc-profile",
                 "Principal-component magnitudes split by the tail flag",
                 {{"generator", "Generator JSON"}, {"model", "Model JSON"}},
                 {{"samples", ParamType::Int, 10000, "Number of samples"},
                  {"seed", ParamType::Seed, 0, "Sampling seed"},
                  {"k", ParamType::Int, nullptr, "Leading components to report (default min(30, d))"},
                  {"tau", ParamType::Double, 0.5, "Tail threshold factor"}},
                 run_pc_profile});
  return out;
}

}  // namespace

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> all = build_commands();
  return all;
}

const CommandSpec& find_command(const std::string& name) {
  for (const CommandSpec& c : commands())
    if (c.name == name) return c;
  throw latent::FormatError("unknown command '" + name + "'");
}

void execute(const CommandSpec& spec, json config, const json& inputs, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  RunOutput result = spec.run(config, inputs, out_dir);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest = {{"tool", "latentctl"},
                   {"version", kToolVersion},
                   {"command", spec.name},
                   {"config", config},
                   {"inputs", inputs},
                   {"outputs", result.files},
                   {"derived", result.derived}};
  latent::io::write_json(out_dir / "manifest.json", manifest);
  latent::io::write_json(out_dir / "timing.json",
                         {{"duration_seconds", seconds}, {"threads", latent::thread_limit()}});
}

void replay(const fs::path& manifest_path, const fs::path& out_dir) {
  const json manifest = latent::io::read_json(manifest_path);
  try {
    const CommandSpec& spec = find_command(manifest.at("command").get<std::string>());
    json config = manifest.at("config");
    for (const Param& p : spec.params)
      if (!config.contains(p.key))
        throw latent::FormatError("manifest config lacks field '" + p.key + "'");
    execute(spec, config, manifest.at("inputs"), out_dir);
  } catch (const json::exception& e) {
    throw latent::FormatError(manifest_path.string() + ": " + e.what());
  }
}

}  // namespace latentctl
