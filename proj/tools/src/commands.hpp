#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "params.hpp"

namespace latentctl {

inline constexpr const char* kToolVersion = "0.1.0";

/// Every command known to the tool, in help order.
const std::vector<CommandSpec>& commands();
const CommandSpec& find_command(const std::string& name);

/// Runs `spec` and writes its outputs, manifest.json and timing.json.
void execute(const CommandSpec& spec, nlohmann::json config, const nlohmann::json& inputs,
             const std::filesystem::path& out_dir);

/// Re-runs the command recorded in a manifest into `out_dir`.
void replay(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

}  // namespace latentctl
