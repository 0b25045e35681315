#include "latent/image_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "latent/error.hpp"
#include "latent/io_util.hpp"

namespace latent {
namespace {
constexpr std::array<char, 4> kMagic = {'I', 'M', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_images_raw(const std::filesystem::path& path, const std::vector<Image>& images) {
  std::string out(kMagic.begin(), kMagic.end());
  io::append_u32(out, kVersion);
  io::append_u32(out, static_cast<std::uint32_t>(images.size()));
  const Image shape = images.empty() ? Image{} : images.front();
  io::append_u32(out, static_cast<std::uint32_t>(shape.height));
  io::append_u32(out, static_cast<std::uint32_t>(shape.width));
  io::append_u32(out, static_cast<std::uint32_t>(shape.channels));
  for (const Image& img : images) {
    require_dims(img.height == shape.height && img.width == shape.width &&
                     img.channels == shape.channels &&
                     img.size() == static_cast<Eigen::Index>(shape.height) *
                                       shape.width * shape.channels,
                 "write_images_raw: images differ in shape");
    for (Eigen::Index i = 0; i < img.size(); ++i) io::append_f64(out, img.pixels(i));
  }
  io::write_file(path, out);
}

std::vector<Image> read_images_raw(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  if (bytes.size() < 24 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    throw FormatError(path.string() + ": not an IMGF image file");
  std::size_t pos = 4;
  if (io::read_u32(bytes, pos) != kVersion)
    throw FormatError(path.string() + ": unsupported IMGF version");
  const std::uint32_t count = io::read_u32(bytes, pos);
  Image shape;
  shape.height = static_cast<int>(io::read_u32(bytes, pos));
  shape.width = static_cast<int>(io::read_u32(bytes, pos));
  shape.channels = static_cast<int>(io::read_u32(bytes, pos));
  const std::size_t per_image = static_cast<std::size_t>(shape.height) *
                                static_cast<std::size_t>(shape.width) *
                                static_cast<std::size_t>(shape.channels);
  if (bytes.size() - pos != per_image * count * 8)
    throw FormatError(path.string() + ": payload size does not match header");
  std::vector<Image> images(count, shape);
  for (Image& img : images) {
    img.pixels.resize(static_cast<Eigen::Index>(per_image));
    for (std::size_t i = 0; i < per_image; ++i)
      img.pixels(static_cast<Eigen::Index>(i)) = io::read_f64(bytes, pos);
  }
  return images;
}

void write_ppm_batch(const std::filesystem::path& directory, const std::string& stem,
                     const std::vector<Image>& images) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Image& img : images) {
    if (img.channels != 3) throw DimensionError("write_ppm_batch: need 3 channels");
    lo = std::min(lo, img.pixels.minCoeff());
    hi = std::max(hi, img.pixels.maxCoeff());
  }
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t n = 0; n < images.size(); ++n) {
    const Image& img = images[n];
    std::string out = "P6\n" + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n255\n";
    for (Eigen::Index i = 0; i < img.size(); ++i) {
      const double unit = (img.pixels(i) - lo) / span;
      out.push_back(static_cast<char>(
          static_cast<unsigned char>(std::lround(std::clamp(unit, 0.0, 1.0) * 255.0))));
    }
    char name[32];
    std::snprintf(name, sizeof(name), "_%04zu.ppm", n);
    io::write_file(directory / (stem + name), out);
  }
}

}  // namespace latent
