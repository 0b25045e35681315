#pragma once

#include <filesystem>
#include <vector>

#include "latent/types.hpp"

namespace latent {

/// Raw float image batch, little-endian:
///   "IMGF", u32 version (1), u32 count, u32 height, u32 width, u32 channels,
///   then count * height * width * channels f64 values (row-major, channels
///   fastest). Round-trips bit-exactly.
void write_images_raw(const std::filesystem::path& path, const std::vector<Image>& images);
std::vector<Image> read_images_raw(const std::filesystem::path& path);

/// Binary P6 PPM for inspection. Values are mapped affinely from the
/// empirical [min, max] over the whole batch onto 0..255, so one file of a
/// batch is comparable with another. Requires 3 channels.
void write_ppm_batch(const std::filesystem::path& directory, const std::string& stem,
                     const std::vector<Image>& images);

}  // namespace latent
