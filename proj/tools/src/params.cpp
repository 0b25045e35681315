#include "params.hpp"

#include <latent/error.hpp>
#include <latent/io_util.hpp>

#include <charconv>
#include <sstream>

namespace latentctl {
namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty())
    throw latent::ArgumentError("--" + kebab(key) + ": not a number: '" + text + "'");
  return v;
}

template <typename T>
T to_integer(const std::string& key, const std::string& text) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw latent::ArgumentError("--" + kebab(key) + ": not an integer: '" + text + "'");
  return v;
}

const Param* find_param(const CommandSpec& spec, const std::string& key) {
  for (const Param& p : spec.params)
    if (p.key == key) return &p;
  return nullptr;
}

}  // namespace

std::string kebab(const std::string& key) {
  std::string out = key;
  for (char& c : out)
    if (c == '_') c = '-';
  return out;
}

nlohmann::json parse_value(const Param& p, const std::string& text) {
  switch (p.type) {
    case ParamType::Int:
      return to_integer<long long>(p.key, text);
    case ParamType::Seed:
      return to_integer<std::uint64_t>(p.key, text);
    case ParamType::Double:
      return to_double(p.key, text);
    case ParamType::Bool:
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw latent::ArgumentError("--" + kebab(p.key) + ": expected true or false");
    case ParamType::String:
      return text;
    case ParamType::DoubleList: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& item : split_commas(text)) arr.push_back(to_double(p.key, item));
      return arr;
    }
    case ParamType::StringList: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& item : split_commas(text)) arr.push_back(item);
      return arr;
    }
  }
  return nullptr;
}

void bind_command(CLI::App& app, const CommandSpec& spec, Bound& bound) {
  bound.spec = &spec;
  for (const Input& in : spec.inputs)
    app.add_option("--" + kebab(in.key), bound.inputs[in.key], in.help)->required();
  for (const Param& p : spec.params) {
    std::string names = "--" + kebab(p.key);
    for (const auto& alias : p.aliases) names += ",--" + alias;
    std::string help = p.help;
    if (!p.fallback.is_null()) help += " (default " + p.fallback.dump() + ")";
    if (p.type == ParamType::Bool) {
      bound.options[p.key] = app.add_flag(names)->description(help);
    } else {
      bound.options[p.key] = app.add_option(names, bound.raw[p.key], help);
    }
  }
  app.add_option("--config", bound.config_path,
                 "JSON file with any subset of the fields; flags override it");
  app.add_option("--out-dir", bound.out_dir, "Directory for outputs and manifest.json")
      ->required();
}

nlohmann::json resolve_config(const Bound& bound) {
  const CommandSpec& spec = *bound.spec;
  nlohmann::json config = nlohmann::json::object();
  for (const Param& p : spec.params) config[p.key] = p.fallback;

  if (!bound.config_path.empty()) {
    const nlohmann::json doc = latent::io::read_json(bound.config_path);
    if (!doc.is_object()) throw latent::FormatError("--config: expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (!find_param(spec, key))
        throw latent::ArgumentError("--config: unknown field '" + key + "' for " + spec.name);
      config[key] = value;
    }
  }
  for (const Param& p : spec.params) {
    const CLI::Option* opt = bound.options.at(p.key);
    if (opt->count() == 0) continue;
    config[p.key] = p.type == ParamType::Bool ? nlohmann::json(true)
                                              : parse_value(p, bound.raw.at(p.key));
  }
  return config;
}

}  // namespace latentctl
