#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <vector>

namespace latent {

/// A batch of latents sharing one (scales x dim) shape. A batch of W latents
/// has scales = 1.
struct LatentBatch {
  int scales = 0;
  int dim = 0;
  std::vector<Eigen::MatrixXd> items;  // each scales x dim
};

/// Binary layout, little-endian:
///   bytes 0-3   magic "LATV"
///   bytes 4-7   u32 version (1)
///   bytes 8-11  u32 scales
///   bytes 12-15 u32 dim
///   then items * scales * dim f64 values, each item's rows contiguous.
/// The item count is implied by the payload size.
void write_latents_binary(const std::filesystem::path& path, const LatentBatch& batch);
LatentBatch read_latents_binary(const std::filesystem::path& path);

/// {"scales": s, "dim": d, "latents": [[[row], ...], ...]}
nlohmann::json latents_to_json(const LatentBatch& batch);
LatentBatch latents_from_json(const nlohmann::json& doc);

void write_latents_json(const std::filesystem::path& path, const LatentBatch& batch);
LatentBatch read_latents_json(const std::filesystem::path& path);

/// Dispatches on extension: ".json" uses JSON, anything else binary.
void write_latents(const std::filesystem::path& path, const LatentBatch& batch);
LatentBatch read_latents(const std::filesystem::path& path);

}  // namespace latent
