#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "cli_support.hpp"
#include "latent/gaussian_model.hpp"
#include "latent/generator.hpp"
#include "latent/image_io.hpp"
#include "latent/inversion.hpp"
#include "latent/io_util.hpp"
#include "latent/latent_io.hpp"
#include "latent/latent_spaces.hpp"
#include "test_support.hpp"

using namespace latent;
using namespace latent::testing;
namespace fs = std::filesystem;

namespace {

const std::string kSmall =
    "--latent-dim 8 --hidden-width 64 --mapping-layers 2 --scales 3 --channels 6";

/// One generator, model and image batch shared by the tests.
struct Setup {
  fs::path gan, prior, gen;
  Setup() {
    gan = fresh_dir("gan");
    prior = fresh_dir("prior");
    gen = fresh_dir("gen");
    REQUIRE(run_latentctl("init-gan --seed 3 " + kSmall + " --out-dir " + quoted(gan)) == 0);
    REQUIRE(run_latentctl("fit-prior --generator " + quoted(gan / "generator.json") +
                          " --samples 3000 --out-dir " + quoted(prior)) == 0);
    REQUIRE(run_latentctl("generate --generator " + quoted(gan / "generator.json") +
                          " --count 4 --seed 2 --out-dir " + quoted(gen)) == 0);
  }
  std::string generator() const { return quoted(gan / "generator.json"); }
  std::string model() const { return quoted(prior / "model.json"); }
  std::string images() const { return quoted(gen / "images.imgf"); }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

void check_replays(const fs::path& run, const std::string& name) {
  for (int threads : {1, 8}) {
    const fs::path again = fresh_dir(name + "_replay" + std::to_string(threads));
    REQUIRE(run_latentctl("--threads " + std::to_string(threads) + " replay --manifest " +
                          quoted(run / "manifest.json") + " --out-dir " + quoted(again)) == 0);
    CHECK(differing_outputs(run, again).empty());
  }
}

int csv_rows(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line)) ++rows;
  return rows;
}

}  // namespace

TEST_CASE("init-gan writes a bundle that reloads identically") {
  const Setup& s = setup();
  const nlohmann::json doc = io::read_json(s.gan / "generator.json");
  const GeneratorBundle g = bundle_from_json(doc);
  CHECK(g.dims == small_dims());
  CHECK(bundle_to_json(g) == doc);
  const fs::path other = fresh_dir("gan_other");
  REQUIRE(run_latentctl("init-gan --seed 4 " + kSmall + " --out-dir " + quoted(other)) == 0);
  const GeneratorBundle h = bundle_from_json(io::read_json(other / "generator.json"));
  CHECK(synthesize(g, LatentW{Eigen::VectorXd::Ones(8)}) !=
        synthesize(h, LatentW{Eigen::VectorXd::Ones(8)}));
  check_replays(s.gan, "gan");
}

TEST_CASE("fit-prior satisfies the model invariants and is deterministic") {
  const Setup& s = setup();
  const GaussianModel m = model_from_json(io::read_json(s.prior / "model.json"));
  CHECK(check_invariants(m).empty());
  CHECK(m.sample_count == 3000);
  check_replays(s.prior, "prior");
  CHECK(run_latentctl("fit-prior --generator " + s.generator() + " --samples 1 --out-dir " +
                      quoted(fresh_dir("prior_bad"))) == 2);
}

TEST_CASE("generate writes latents and images") {
  const Setup& s = setup();
  const LatentBatch b = read_latents(s.gen / "latents.latv");
  CHECK(b.items.size() == 4);
  CHECK(b.scales == 1);
  CHECK(read_images_raw(s.gen / "images.imgf").size() == 4);
  check_replays(s.gen, "gen");
}

TEST_CASE("invert without prior matches the library no-prior path") {
  const Setup& s = setup();
  const fs::path out = fresh_dir("inv0");
  REQUIRE(run_latentctl("invert --generator " + s.generator() + " --model " + s.model() +
                        " --target " + s.images() +
                        " --target-index 1 --lambda 0 --iters 40 --out-dir " + quoted(out)) == 0);
  const InversionResult r = inversion_result_from_json(io::read_json(out / "result.json"));
  for (double p : r.prior_trace) CHECK(p == 0.0);

  const GeneratorBundle g = bundle_from_json(io::read_json(s.gan / "generator.json"));
  const GaussianModel m = model_from_json(io::read_json(s.prior / "model.json"));
  InversionConfig c = InversionConfig::defaults_for(TargetSpace::W);
  c.prior_weight = 0.0;
  c.iterations = 40;
  const InversionResult lib = invert(read_images_raw(s.gen / "images.imgf")[1], g, m, c);
  CHECK(lib.latent == r.latent);
  check_replays(out, "inv0");
}

TEST_CASE("invert in wplus emits an s x d latent") {
  const Setup& s = setup();
  const fs::path out = fresh_dir("invp");
  REQUIRE(run_latentctl("invert --generator " + s.generator() + " --model " + s.model() +
                        " --target " + s.images() + " --space wplus --iters 30 --out-dir " +
                        quoted(out)) == 0);
  const LatentBatch b = read_latents(out / "latent.latv");
  CHECK(b.scales == 3);
  CHECK(b.dim == 8);
  check_replays(out, "invp");
}

TEST_CASE("correct with psi one leaves the batch unchanged") {
  const Setup& s = setup();
  const fs::path out = fresh_dir("corr_t");
  REQUIRE(run_latentctl("correct --model " + s.model() + " --latents " +
                        quoted(s.gen / "latents.latv") +
                        " --method truncation --psi 1 --out-dir " + quoted(out)) == 0);
  CHECK(io::read_file(out / "latents.latv") == io::read_file(s.gen / "latents.latv"));
}

TEST_CASE("compression leaves an in-threshold batch unchanged within 4 ulp") {
  const Setup& s = setup();
  const GaussianModel m = model_from_json(io::read_json(s.prior / "model.json"));
  LatentBatch in{1, 8, {}};
  for (int i = 0; i < 5; ++i)
    in.items.push_back(v_to_w(LatentV{m.mean_v + 0.05 * m.max_sigma() *
                                                      random_vector(static_cast<std::uint64_t>(i), 8)})
                           .values.transpose());
  const fs::path dir = fresh_dir("corr_in");
  write_latents(dir / "in.latv", in);
  const fs::path out = fresh_dir("corr_c");
  REQUIRE(run_latentctl("correct --model " + s.model() + " --latents " +
                        quoted(dir / "in.latv") + " --tau 0.5 --out-dir " + quoted(out)) == 0);
  const LatentBatch back = read_latents(out / "latents.latv");
  REQUIRE(back.items.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (Eigen::Index k = 0; k < 8; ++k)
      CHECK(ulp_distance(back.items[i](0, k), in.items[i](0, k)) <= 4);
}

TEST_CASE("correct handles a batch of 1000 and records the threshold") {
  const Setup& s = setup();
  const fs::path big = fresh_dir("gen_big");
  REQUIRE(run_latentctl("generate --generator " + s.generator() + " --count 1000 --out-dir " +
                        quoted(big)) == 0);
  const fs::path out = fresh_dir("corr_big");
  REQUIRE(run_latentctl("correct --model " + s.model() + " --latents " +
                        quoted(big / "latents.latv") + " --out-dir " + quoted(out)) == 0);
  const nlohmann::json manifest = io::read_json(out / "manifest.json");
  const GaussianModel m = model_from_json(io::read_json(s.prior / "model.json"));
  CHECK(manifest["derived"]["threshold"].get<double>() == 0.5 * m.max_sigma());
  CHECK(manifest["derived"]["items"].get<int>() == 1000);
  CHECK(read_latents(out / "latents.latv").items.size() == 1000);
  check_replays(out, "corr_big");
}

TEST_CASE("interpolation emits one 11-row CSV per condition") {
  const Setup& s = setup();
  const fs::path out = fresh_dir("interp");
  REQUIRE(run_latentctl("experiment interpolation --generator " + s.generator() + " --model " +
                        s.model() + " --pairs 2 --iters 50 --out-dir " + quoted(out)) == 0);
  for (const char* label : {"w", "w-prior", "wplus", "wplus-prior"})
    CHECK(csv_rows(out / ("curve_" + std::string(label) + ".csv")) == 11);
  check_replays(out, "interp");
}

TEST_CASE("a single-lambda sweep equals the plain interpolation") {
  const Setup& s = setup();
  const fs::path sweep = fresh_dir("sweep");
  const fs::path plain = fresh_dir("plain");
  REQUIRE(run_latentctl("experiment lambda-sweep --generator " + s.generator() + " --model " +
                        s.model() + " --pairs 2 --iters 40 --lambdas 0.0001 --out-dir " +
                        quoted(sweep)) == 0);
  REQUIRE(run_latentctl("experiment interpolation --generator " + s.generator() + " --model " +
                        s.model() + " --pairs 2 --iters 40 --spaces wplus --lambda 0.0001" +
                        " --out-dir " + quoted(plain)) == 0);
  const nlohmann::json a = io::read_json(sweep / "report.json");
  const nlohmann::json b = io::read_json(plain / "report.json");
  nlohmann::json mean_b;
  for (const auto& c : b["conditions"])
    if (c["label"] == "wplus-prior") mean_b = c["mean_error"];
  REQUIRE(a["conditions"].size() == 1);
  CHECK(a["conditions"][0]["mean_error"] == mean_b);
  check_replays(sweep, "sweep");
}

TEST_CASE("fid-tradeoff emits the matched operating points") {
  const Setup& s = setup();
  const fs::path out = fresh_dir("tradeoff");
  REQUIRE(run_latentctl("experiment fid-tradeoff --generator " + s.generator() + " --model " +
                        s.model() + " --samples 256 --out-dir " + quoted(out)) == 0);
  const nlohmann::json r = io::read_json(out / "report.json");
  CHECK(r["points"].size() == 3);
  for (const auto& p : r["points"]) CHECK(p["tau"].get<double>() > 0.0);
  CHECK(csv_rows(out / "tradeoff.csv") == 3);
  check_replays(out, "tradeoff");
}

TEST_CASE("pc-profile writes the profile") {
  const Setup& s = setup();
  const fs::path out = fresh_dir("pc");
  REQUIRE(run_latentctl("experiment pc-profile --generator " + s.generator() + " --model " +
                        s.model() + " --samples 2000 --out-dir " + quoted(out)) == 0);
  const nlohmann::json p = io::read_json(out / "profile.json");
  CHECK(p["k"] == 8);
  check_replays(out, "pc");
}

TEST_CASE("exit codes") {
  const Setup& s = setup();
  const fs::path out = fresh_dir("codes");
  CHECK(run_latentctl("--help") == 0);
  CHECK(run_latentctl("no-such-command") == 2);
  CHECK(run_latentctl("init-gan") == 2);
  CHECK(run_latentctl("init-gan --seed nope --out-dir " + quoted(out)) == 2);
  CHECK(run_latentctl("invert --generator " + s.generator() + " --model " + quoted(out / "none.json") +
                      " --target " + s.images() + " --out-dir " + quoted(out)) == 2);
  io::write_file(out / "bad.json", "{ not json");
  CHECK(run_latentctl("invert --generator " + s.generator() + " --model " + quoted(out / "bad.json") +
                      " --target " + s.images() + " --out-dir " + quoted(out)) == 3);
  io::write_file(out / "cfg.json", "{\"unknown_key\": 1}");
  CHECK(run_latentctl("init-gan --config " + quoted(out / "cfg.json") + " --out-dir " +
                      quoted(out)) == 2);
  CHECK(run_latentctl("correct --model " + s.model() + " --latents " +
                      quoted(s.gen / "latents.latv") + " --tau -1 --out-dir " + quoted(out)) == 2);
  CHECK(run_latentctl("replay --manifest " + quoted(out / "bad.json") + " --out-dir " +
                      quoted(out)) == 3);
}
