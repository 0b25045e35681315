#include "latent/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "latent/error.hpp"
#include "latent/io_util.hpp"
#include "latent/latent_spaces.hpp"
#include "latent/parallel.hpp"
#include "latent/rng.hpp"

namespace latent {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double fid_from_features(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return frechet_distance(fit_gaussian(a), fit_gaussian(b));
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return kNaN;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return kNaN;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

bool grid_contains(const std::vector<double>& grid, double t) {
  return std::any_of(grid.begin(), grid.end(),
                     [t](double x) { return std::abs(x - t) < 1e-12; });
}

nlohmann::json number_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

std::vector<Image> render_rows(const GeneratorBundle& bundle, const Eigen::MatrixXd& w) {
  std::vector<Image> images(static_cast<std::size_t>(w.rows()));
  parallel_for(images.size(), [&](std::size_t i) {
    images[i] = synthesize(bundle, LatentW{w.row(static_cast<Eigen::Index>(i)).transpose()});
  });
  return images;
}

Eigen::MatrixXd correct_rows(const Eigen::MatrixXd& w, const GaussianModel& model,
                             const CorrectionConfig& config) {
  Eigen::MatrixXd out(w.rows(), w.cols());
  parallel_for(static_cast<std::size_t>(w.rows()), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.row(r) = correct_latent(LatentW{w.row(r).transpose()}, model, config)
                     .values.transpose();
  });
  return out;
}

double mean_identity(const std::vector<Image>& originals, const std::vector<Image>& corrected,
                     const FeatureNet& net) {
  std::vector<double> sims(originals.size());
  parallel_for(originals.size(), [&](std::size_t i) {
    sims[i] = identity_similarity(originals[i], corrected[i], net);
  });
  return mean_of(sims);
}

std::string file_safe(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double latent_error(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
  require_dims(estimate.rows() == truth.rows() && estimate.cols() == truth.cols(),
               "latent_error: shape mismatch");
  return (estimate - truth).norm();
}

double fid_proxy(const std::vector<Image>& a, const std::vector<Image>& b,
                 const FeatureNet& net) {
  if (a.empty() || b.empty()) throw ArgumentError("fid_proxy: image sets must be nonempty");
  return fid_from_features(embed_batch(net, a), embed_batch(net, b));
}

double identity_similarity(const Image& a, const Image& b, const FeatureNet& net) {
  const Eigen::VectorXd fa = embed(net, a.pixels);
  const Eigen::VectorXd fb = embed(net, b.pixels);
  const double na = fa.norm();
  const double nb = fb.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(fa.dot(fb) / (na * nb), -1.0, 1.0);
}

double mean_pixel_std(const std::vector<Image>& images) {
  if (images.size() < 2) return 0.0;
  const Eigen::Index n = images.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (const Image& im : images) {
    require_dims(im.size() == n, "mean_pixel_std: image sizes differ");
    mean += im.pixels;
  }
  mean /= static_cast<double>(images.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(n);
  for (const Image& im : images) var += (im.pixels - mean).cwiseAbs2();
  var /= static_cast<double>(images.size() - 1);
  return var.cwiseSqrt().mean();
}

FeatureNet fid_feature_net(std::uint64_t seed, Eigen::Index input_size) {
  return make_feature_net(split_seed(seed, stream::kFeatures, 0), input_size);
}

FeatureNet identity_feature_net(std::uint64_t seed, Eigen::Index input_size) {
  return make_feature_net(split_seed(seed, stream::kFeatures, 1), input_size);
}

// ---------------------------------------------------------------------------

std::vector<double> default_t_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::string to_string(TargetSource source) {
  return source == TargetSource::Generated ? "generated" : "foreign";
}

TargetSource parse_target_source(const std::string& text) {
  if (text == "generated") return TargetSource::Generated;
  if (text == "foreign") return TargetSource::Foreign;
  throw ArgumentError("unknown target source '" + text + "' (expected generated or foreign)");
}

void InterpolationSettings::validate() const {
  if (conditions.empty()) throw ArgumentError("interpolation: no conditions");
  if (pairs < 1) throw ArgumentError("interpolation: pairs must be >= 1");
  for (double t : t_grid)
    if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("interpolation: t outside [0, 1]");
  if (!grid_contains(t_grid, 0.0) || !grid_contains(t_grid, 0.5) || !grid_contains(t_grid, 1.0))
    throw ArgumentError("interpolation: t grid must contain 0, 0.5 and 1");
  for (const Condition& c : conditions) c.config.validate();
}

nlohmann::json to_json(const InterpolationSettings& s) {
  nlohmann::json conds = nlohmann::json::array();
  for (const Condition& c : s.conditions)
    conds.push_back({{"label", c.label}, {"config", to_json(c.config)}});
  return {{"conditions", conds},
          {"pairs", s.pairs},
          {"t_grid", s.t_grid},
          {"seed", s.seed},
          {"oracle_start", s.oracle_start},
          {"targets", to_string(s.targets)},
          {"foreign_seed", s.foreign_seed}};
}

InterpolationSettings interpolation_settings_from_json(const nlohmann::json& doc) {
  try {
    InterpolationSettings s;
    for (const auto& c : doc.at("conditions"))
      s.conditions.push_back(
          {c.at("label").get<std::string>(), inversion_config_from_json(c.at("config"))});
    s.pairs = doc.value("pairs", s.pairs);
    s.t_grid = doc.value("t_grid", s.t_grid);
    s.seed = doc.value("seed", s.seed);
    s.oracle_start = doc.value("oracle_start", s.oracle_start);
    s.targets = parse_target_source(doc.value("targets", to_string(s.targets)));
    s.foreign_seed = doc.value("foreign_seed", s.foreign_seed);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("interpolation settings: ") + e.what());
  }
}

const ConditionSummary& ExperimentReport::condition(const std::string& label) const {
  for (const ConditionSummary& c : conditions)
    if (c.label == label) return c;
  throw ArgumentError("report has no condition '" + label + "'");
}

std::vector<ConditionSummary> summarize(const std::vector<Condition>& conditions,
                                        const std::vector<PairRecord>& records,
                                        std::size_t grid_size) {
  std::vector<ConditionSummary> out;
  for (const Condition& cond : conditions) {
    ConditionSummary s;
    s.label = cond.label;
    s.config = cond.config;
    std::vector<std::vector<double>> per_t(grid_size);
    std::vector<double> endpoints, latents, priors;
    for (const PairRecord& r : records) {
      if (r.condition != cond.label) continue;
      if (r.failed) {
        ++s.pairs_failed;
        continue;
      }
      ++s.pairs_ok;
      require_dims(r.curve.size() == grid_size, "summarize: curve length differs from grid");
      for (std::size_t i = 0; i < grid_size; ++i) per_t[i].push_back(r.curve[i]);
      for (const EndpointRecord& e : r.endpoints) {
        endpoints.push_back(e.image_error);
        priors.push_back(e.prior_energy);
        if (e.latent_error) latents.push_back(*e.latent_error);
      }
    }
    for (const auto& xs : per_t) {
      s.mean_error.push_back(mean_of(xs));
      s.std_error.push_back(sample_std(xs));
    }
    s.mean_endpoint_error = mean_of(endpoints);
    s.median_latent_error = median_of(latents);
    s.mean_prior_energy = mean_of(priors);
    out.push_back(std::move(s));
  }
  return out;
}

ExperimentReport interpolation_experiment(const GeneratorBundle& bundle,
                                          const GaussianModel& model,
                                          const InterpolationSettings& settings) {
  settings.validate();
  require_dims(model.dim == bundle.dims.latent_dim,
               "interpolation: model dimension does not match generator");
  const int s = bundle.dims.scales;
  const auto n_pairs = static_cast<std::size_t>(settings.pairs);

  const bool foreign = settings.targets == TargetSource::Foreign;
  const GeneratorBundle foreign_bundle =
      foreign ? init_generator(settings.foreign_seed, bundle.dims) : GeneratorBundle{};
  const GeneratorBundle& truth_bundle = foreign ? foreign_bundle : bundle;

  // Endpoint e of pair p owns rows [(2p + e) s, (2p + e + 1) s).
  const Eigen::MatrixXd true_rows =
      map_batch(truth_bundle, split_seed(settings.seed, stream::kPairs), 2 * n_pairs * s).w;
  auto true_latent = [&](std::size_t p, int e, bool plus) -> Eigen::MatrixXd {
    const auto first = static_cast<Eigen::Index>((2 * p + e) * s);
    return plus ? Eigen::MatrixXd(true_rows.middleRows(first, s))
                : Eigen::MatrixXd(true_rows.row(first));
  };
  auto as_stack = [s](const Eigen::MatrixXd& latent) {
    return latent.rows() == 1 ? broadcast_style(LatentW{latent.row(0).transpose()}, s)
                              : StyleStack{latent};
  };

  const std::size_t n_cond = settings.conditions.size();
  std::vector<PairRecord> records(n_cond * n_pairs);
  parallel_for(records.size(), [&](std::size_t task) {
    const std::size_t ci = task / n_pairs;
    const std::size_t p = task % n_pairs;
    const Condition& cond = settings.conditions[ci];
    const bool plus = cond.config.target_space == TargetSpace::WPlus;
    PairRecord& rec = records[task];
    rec.condition = cond.label;
    rec.pair = static_cast<int>(p);

    Eigen::MatrixXd truth[2];
    Eigen::MatrixXd estimate[2];
    try {
      for (int e = 0; e < 2; ++e) {
        truth[e] = true_latent(p, e, plus);
        const Image target = synthesize(truth_bundle, as_stack(truth[e]));
        InversionConfig config = cond.config;
        config.seed = split_seed(settings.seed, stream::kInversionNoise, 2 * p + e);
        std::optional<Eigen::MatrixXd> start;
        if (settings.oracle_start && !foreign) start = truth[e];
        const InversionResult result = invert(target, bundle, model, config, start);
        estimate[e] = result.latent;
        EndpointRecord& ep = rec.endpoints[e];
        ep.image_error = result.final_image_error;
        if (!foreign) ep.latent_error = latent_error(result.latent, truth[e]);
        ep.prior_energy = plus ? mahalanobis_sq_plus(model, StyleStack{result.latent})
                               : mahalanobis_sq(model, w_to_v(result.latent_w()));
      }
    } catch (const NumericalError& err) {
      rec.failed = true;
      rec.failure = err.what();
      return;
    }
    for (double t : settings.t_grid) {
      const Image est = synthesize(bundle, lerp(as_stack(estimate[0]), as_stack(estimate[1]), t));
      const Image ref =
          synthesize(truth_bundle, lerp(as_stack(truth[0]), as_stack(truth[1]), t));
      rec.curve.push_back(reconstruction_loss(est, ref, cond.config.loss).loss);
    }
  });

  ExperimentReport report;
  report.kind = "interpolation";
  report.t_grid = settings.t_grid;
  report.records = std::move(records);
  report.conditions = summarize(settings.conditions, report.records, settings.t_grid.size());
  return report;
}

std::vector<double> default_lambda_grid() { return {0.0, 1e-5, 1e-4, 1e-3}; }

std::string lambda_label(double lambda) { return "lambda=" + format_double(lambda); }

ExperimentReport lambda_sweep(const GeneratorBundle& bundle, const GaussianModel& model,
                              const InversionConfig& base, const std::vector<double>& grid,
                              InterpolationSettings settings) {
  if (grid.empty()) throw ArgumentError("lambda_sweep: empty grid");
  settings.conditions.clear();
  for (double lambda : grid) {
    if (!(lambda >= 0.0)) throw ArgumentError("lambda_sweep: lambda must be >= 0");
    InversionConfig config = base;
    config.prior_weight = lambda;
    settings.conditions.push_back({lambda_label(lambda), config});
  }
  ExperimentReport report = interpolation_experiment(bundle, model, settings);
  report.kind = "lambda-sweep";
  return report;
}

// ---------------------------------------------------------------------------

double PcProfile::flagged_fraction() const {
  const int total = flagged.count + unflagged.count;
  return total == 0 ? 0.0 : static_cast<double>(flagged.count) / total;
}

PcProfile pc_magnitude_profile(const Eigen::MatrixXd& latents_w, const GaussianModel& model,
                               int k, double tau) {
  require_dims(latents_w.cols() == model.dim, "pc_magnitude_profile: dimension mismatch");
  if (k < 1 || k > model.dim) throw ArgumentError("pc_magnitude_profile: need 1 <= k <= d");
  PcProfile out;
  out.k = k;
  out.threshold = compression_threshold(model, tau);

  const Eigen::Index n = latents_w.rows();
  Eigen::MatrixXd mags(n, k);
  std::vector<char> flags(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd pc =
        to_pc(w_to_v(LatentW{latents_w.row(r).transpose()}), model).cwiseAbs();
    flags[i] = pc.maxCoeff() > out.threshold;
    mags.row(r) = pc.head(k).transpose();
  });

  for (int flagged = 0; flagged < 2; ++flagged) {
    PcGroupStats& g = flagged ? out.flagged : out.unflagged;
    g.mean = Eigen::VectorXd::Zero(k);
    g.std = Eigen::VectorXd::Zero(k);
    for (Eigen::Index r = 0; r < n; ++r)
      if (flags[static_cast<std::size_t>(r)] == flagged) {
        ++g.count;
        g.mean += mags.row(r).transpose();
      }
    if (g.count == 0) continue;
    g.mean /= g.count;
    if (g.count < 2) continue;
    for (Eigen::Index r = 0; r < n; ++r)
      if (flags[static_cast<std::size_t>(r)] == flagged)
        g.std += (mags.row(r).transpose() - g.mean).cwiseAbs2();
    g.std = (g.std / (g.count - 1)).cwiseSqrt();
  }
  return out;
}

double predicted_flag_fraction(const GaussianModel& model, double tau) {
  const double threshold = compression_threshold(model, tau);
  double inside = 1.0;
  for (Eigen::Index i = 0; i < model.eigvals.size(); ++i) {
    const double sd = std::sqrt(model.eigvals(i));
    if (sd > 0.0) inside *= std::erf(threshold / (sd * std::sqrt(2.0)));
  }
  return 1.0 - inside;
}

nlohmann::json to_json(const PcProfile& p) {
  auto group = [](const PcGroupStats& g) {
    return nlohmann::json{{"count", g.count},
                          {"mean", std::vector<double>(g.mean.begin(), g.mean.end())},
                          {"std", std::vector<double>(g.std.begin(), g.std.end())}};
  };
  return {{"k", p.k},
          {"threshold", p.threshold},
          {"flagged_fraction", p.flagged_fraction()},
          {"flagged", group(p.flagged)},
          {"unflagged", group(p.unflagged)}};
}

// ---------------------------------------------------------------------------

void TradeoffSettings::validate() const {
  if (psi_values.empty()) throw ArgumentError("fid-tradeoff: no psi values");
  for (double psi : psi_values)
    if (!(psi >= 0.0 && psi <= 1.0)) throw ArgumentError("fid-tradeoff: psi outside [0, 1]");
  if (samples < 2) throw ArgumentError("fid-tradeoff: samples must be >= 2");
  if (!(match_tolerance > 0.0)) throw ArgumentError("fid-tradeoff: tolerance must be positive");
  if (!(tau_low > 0.0 && tau_high > tau_low))
    throw ArgumentError("fid-tradeoff: need 0 < tau_low < tau_high");
  if (max_bisections < 1) throw ArgumentError("fid-tradeoff: max_bisections must be >= 1");
}

nlohmann::json to_json(const TradeoffSettings& s) {
  return {{"psi_values", s.psi_values},   {"samples", s.samples},
          {"seed", s.seed},               {"match_tolerance", s.match_tolerance},
          {"tau_low", s.tau_low},         {"tau_high", s.tau_high},
          {"max_bisections", s.max_bisections}};
}

TradeoffSettings tradeoff_settings_from_json(const nlohmann::json& doc) {
  try {
    TradeoffSettings s;
    s.psi_values = doc.value("psi_values", s.psi_values);
    s.samples = doc.value("samples", s.samples);
    s.seed = doc.value("seed", s.seed);
    s.match_tolerance = doc.value("match_tolerance", s.match_tolerance);
    s.tau_low = doc.value("tau_low", s.tau_low);
    s.tau_high = doc.value("tau_high", s.tau_high);
    s.max_bisections = doc.value("max_bisections", s.max_bisections);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("fid-tradeoff settings: ") + e.what());
  }
}

TradeoffReport fid_tradeoff(const GeneratorBundle& bundle, const GaussianModel& model,
                            const TradeoffSettings& settings) {
  settings.validate();
  require_dims(model.dim == bundle.dims.latent_dim,
               "fid-tradeoff: model dimension does not match generator");
  const auto n = static_cast<std::size_t>(settings.samples);
  const Eigen::Index image_size = bundle.dims.image_size();
  const FeatureNet fid_net = fid_feature_net(settings.seed, image_size);
  const FeatureNet id_net = identity_feature_net(settings.seed, image_size);

  const Eigen::MatrixXd w = map_batch(bundle, split_seed(settings.seed, stream::kSamples), n).w;
  const Eigen::MatrixXd w_ref =
      map_batch(bundle, split_seed(settings.seed, stream::kReference), n).w;
  const std::vector<Image> originals = render_rows(bundle, w);
  const Eigen::MatrixXd ref_features = embed_batch(fid_net, render_rows(bundle, w_ref));

  TradeoffReport report;
  report.samples = settings.samples;
  report.fid_uncorrected = fid_from_features(ref_features, embed_batch(fid_net, originals));
  report.pixel_std_uncorrected = mean_pixel_std(originals);

  struct Evaluated {
    std::vector<Image> images;
    double fid = 0.0;
  };
  auto evaluate = [&](const CorrectionConfig& config) {
    Evaluated out;
    out.images = render_rows(bundle, correct_rows(w, model, config));
    out.fid = fid_from_features(ref_features, embed_batch(fid_net, out.images));
    return out;
  };
  auto compression = [](double tau) {
    return CorrectionConfig{CorrectionMethod::Compression, 1.0, tau};
  };

  for (double psi : settings.psi_values) {
    OperatingPoint pt;
    pt.psi = psi;
    const Evaluated trunc = evaluate({CorrectionMethod::Truncation, psi, 0.5});
    pt.fid_truncation = trunc.fid;
    const double target = trunc.fid;
    auto close = [&](double fid) {
      return std::abs(fid - target) <= settings.match_tolerance * target;
    };

    // fid falls as tau grows (weaker compression); bisect log(tau).
    double lo = std::log(settings.tau_low);
    double hi = std::log(settings.tau_high);
    Evaluated best = evaluate(compression(std::exp(hi)));
    double best_tau = std::exp(hi);
    if (!close(best.fid)) {
      for (int it = 0; it < settings.max_bisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        Evaluated cur = evaluate(compression(std::exp(mid)));
        if (std::abs(cur.fid - target) < std::abs(best.fid - target)) {
          best = cur;
          best_tau = std::exp(mid);
        }
        if (close(cur.fid)) break;
        if (cur.fid > target)
          lo = mid;
        else
          hi = mid;
      }
    }
    pt.tau = best_tau;
    pt.fid_compression = best.fid;
    pt.matched = close(best.fid);
    pt.identity_truncation = mean_identity(originals, trunc.images, id_net);
    pt.identity_compression = mean_identity(originals, best.images, id_net);
    pt.pixel_std_truncation = mean_pixel_std(trunc.images);
    pt.pixel_std_compression = mean_pixel_std(best.images);
    report.points.push_back(pt);
  }
  return report;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json conds = nlohmann::json::array();
  for (const ConditionSummary& c : r.conditions) {
    nlohmann::json mean = nlohmann::json::array();
    nlohmann::json sd = nlohmann::json::array();
    for (std::size_t i = 0; i < c.mean_error.size(); ++i) {
      mean.push_back(number_or_null(c.mean_error[i]));
      sd.push_back(number_or_null(c.std_error[i]));
    }
    conds.push_back({{"label", c.label},
                     {"config", to_json(c.config)},
                     {"pairs_ok", c.pairs_ok},
                     {"pairs_failed", c.pairs_failed},
                     {"mean_error", mean},
                     {"std_error", sd},
                     {"mean_endpoint_error", number_or_null(c.mean_endpoint_error)},
                     {"median_latent_error", number_or_null(c.median_latent_error)},
                     {"mean_prior_energy", number_or_null(c.mean_prior_energy)}});
  }
  nlohmann::json recs = nlohmann::json::array();
  for (const PairRecord& p : r.records) {
    nlohmann::json eps = nlohmann::json::array();
    for (const EndpointRecord& e : p.endpoints)
      eps.push_back({{"image_error", e.image_error},
                     {"latent_error", e.latent_error ? nlohmann::json(*e.latent_error)
                                                     : nlohmann::json(nullptr)},
                     {"prior_energy", e.prior_energy}});
    nlohmann::json rec = {{"condition", p.condition}, {"pair", p.pair}, {"failed", p.failed}};
    if (p.failed)
      rec["failure"] = p.failure;
    else {
      rec["endpoints"] = eps;
      rec["curve"] = p.curve;
    }
    recs.push_back(rec);
  }
  return {{"kind", r.kind}, {"t_grid", r.t_grid}, {"conditions", conds}, {"records", recs}};
}

nlohmann::json to_json(const TradeoffReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const OperatingPoint& p : r.points)
    pts.push_back({{"psi", p.psi},
                   {"tau", p.tau},
                   {"matched", p.matched},
                   {"fid_truncation", p.fid_truncation},
                   {"fid_compression", p.fid_compression},
                   {"identity_truncation", p.identity_truncation},
                   {"identity_compression", p.identity_compression},
                   {"pixel_std_truncation", p.pixel_std_truncation},
                   {"pixel_std_compression", p.pixel_std_compression}});
  return {{"kind", "fid-tradeoff"},
          {"samples", r.samples},
          {"fid_uncorrected", r.fid_uncorrected},
          {"pixel_std_uncorrected", r.pixel_std_uncorrected},
          {"points", pts}};
}

std::vector<std::filesystem::path> write_curve_csvs(const std::filesystem::path& directory,
                                                    const ExperimentReport& report) {
  std::vector<std::filesystem::path> written;
  for (const ConditionSummary& c : report.conditions) {
    std::string text = "t,mean_error,std_error,condition\n";
    for (std::size_t i = 0; i < report.t_grid.size(); ++i)
      text += format_double(report.t_grid[i]) + "," + format_double(c.mean_error[i]) + "," +
              format_double(c.std_error[i]) + "," + c.label + "\n";
    const auto path = directory / ("curve_" + file_safe(c.label) + ".csv");
    io::write_file(path, text);
    written.push_back(path);
  }
  return written;
}

}  // namespace latent
