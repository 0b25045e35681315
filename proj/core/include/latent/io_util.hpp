#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

// Byte-level helpers shared by the binary file formats. All multi-byte
// values are little-endian regardless of host order.
namespace latent::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

nlohmann::json read_json(const std::filesystem::path& path);
/// Writes `doc.dump(indent)` plus a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc,
                int indent = 2);

void append_u32(std::string& out, std::uint32_t v);
void append_f64(std::string& out, double v);
std::uint32_t read_u32(const std::string& in, std::size_t& pos);
double read_f64(const std::string& in, std::size_t& pos);

}  // namespace latent::io
