// latentctl: command-line front end for the latent prior toolkit.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <latent/error.hpp>
#include <latent/parallel.hpp>

#include <deque>
#include <iostream>

#include "commands.hpp"
#include "params.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kBadArguments = 2, kBadFormat = 3, kNumerical = 4 };

}  // namespace

int main(int argc, char** argv) {
  using namespace latentctl;

  CLI::App app{"Gaussian latent prior toolkit for a toy style-based generator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker thread cap (outputs do not depend on it)")
      ->check(CLI::PositiveNumber);

  std::deque<Bound> bound;  // stable addresses for CLI11 bindings
  std::vector<std::pair<CLI::App*, Bound*>> leaves;
  CLI::App* experiment = app.add_subcommand("experiment", "Run an evaluation protocol");
  experiment->require_subcommand(1);
  experiment->fallthrough();
  for (const CommandSpec& spec : commands()) {
    const bool nested = spec.name.rfind("experiment ", 0) == 0;
    CLI::App* parent = nested ? experiment : &app;
    CLI::App* sub = parent->add_subcommand(nested ? spec.name.substr(11) : spec.name, spec.help);
    bound.emplace_back();
    bind_command(*sub, spec, bound.back());
    leaves.emplace_back(sub, &bound.back());
  }

  std::string manifest_path;
  std::string replay_out;
  CLI::App* replay_cmd =
      app.add_subcommand("replay", "Re-run a command from its manifest.json");
  replay_cmd->add_option("--manifest", manifest_path, "manifest.json of an earlier run")
      ->required();
  replay_cmd->add_option("--out-dir", replay_out, "Directory for the reproduced outputs")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    latent::set_thread_limit(threads);
    if (replay_cmd->parsed()) {
      replay(manifest_path, replay_out);
      return kOk;
    }
    for (auto& [sub, b] : leaves) {
      if (!sub->parsed()) continue;
      nlohmann::json inputs = nlohmann::json::object();
      for (const auto& [key, path] : b->inputs) inputs[key] = path;
      execute(*b->spec, resolve_config(*b), inputs, b->out_dir);
      return kOk;
    }
    return kBadArguments;
  } catch (const latent::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadArguments;
  } catch (const latent::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadArguments;
  } catch (const latent::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kBadFormat;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kBadFormat;
  } catch (const latent::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
