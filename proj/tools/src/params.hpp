#pragma once

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace latentctl {

enum class ParamType { Int, Seed, Double, Bool, String, DoubleList, StringList };

/// One configuration field. The flag is "--" + kebab-case(key); `fallback`
/// null means the command derives the default from other fields.
struct Param {
  std::string key;
  ParamType type;
  nlohmann::json fallback;
  std::string help;
  std::vector<std::string> aliases = {};
};

struct RunOutput {
  std::vector<std::string> files;  // relative to the output directory
  nlohmann::json derived = nlohmann::json::object();
};

using RunFn = std::function<RunOutput(nlohmann::json& config, const nlohmann::json& inputs,
                                      const std::filesystem::path& out_dir)>;

struct Input {
  std::string key;
  std::string help;
};

struct CommandSpec {
  std::string name;  // "invert", "experiment interpolation", ...
  std::string help;
  std::vector<Input> inputs;
  std::vector<Param> params;
  /// Fills derived defaults in place and returns the outputs.
  RunFn run;
};

/// Flag values captured by CLI11 before conversion.
struct Bound {
  const CommandSpec* spec = nullptr;
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> options;
  std::map<std::string, std::string> inputs;
  std::string config_path;
  std::string out_dir;
};

std::string kebab(const std::string& key);

/// Registers --<param> flags, input flags, --config and --out-dir on `app`.
void bind_command(CLI::App& app, const CommandSpec& spec, Bound& bound);

/// Defaults, then the --config document, then explicit flags.
nlohmann::json resolve_config(const Bound& bound);

/// Converts a flag string to the JSON value of the parameter type.
nlohmann::json parse_value(const Param& param, const std::string& text);

}  // namespace latentctl
