#include <doctest.h>

#include <filesystem>
#include <string>

#include "latent/error.hpp"
#include "latent/image_io.hpp"
#include "latent/io_util.hpp"
#include "latent/latent_io.hpp"
#include "test_support.hpp"

using namespace latent;
using namespace latent::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = LATENT_TEST_TMP;
  fs::create_directories(dir);
  return dir / name;
}

LatentBatch sample_batch(int scales, int dim, int items) {
  LatentBatch b{scales, dim, {}};
  for (int i = 0; i < items; ++i)
    b.items.push_back(random_matrix(static_cast<std::uint64_t>(50 + i), scales, dim));
  b.items.front()(0, 0) = -0.0;
  b.items.front()(0, 1) = 1e-310;
  return b;
}

bool same_bits(const LatentBatch& a, const LatentBatch& b) {
  if (a.scales != b.scales || a.dim != b.dim || a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i)
    for (Eigen::Index j = 0; j < a.items[i].size(); ++j)
      if (ulp_distance(a.items[i].data()[j], b.items[i].data()[j]) != 0 ||
          std::signbit(a.items[i].data()[j]) != std::signbit(b.items[i].data()[j]))
        return false;
  return true;
}

}  // namespace

TEST_CASE("binary latents round trip bit-exactly") {
  const LatentBatch b = sample_batch(4, 5, 3);
  const fs::path p = scratch("batch.latv");
  write_latents(p, b);
  CHECK(same_bits(read_latents(p), b));
  CHECK(fs::file_size(p) == 16u + 3u * 4u * 5u * 8u);
  const std::string bytes = io::read_file(p);
  CHECK(bytes.substr(0, 4) == "LATV");
}

TEST_CASE("JSON latents round trip bit-exactly") {
  const LatentBatch b = sample_batch(1, 6, 4);
  const fs::path p = scratch("batch.json");
  write_latents(p, b);
  CHECK(same_bits(read_latents(p), b));
  CHECK(same_bits(latents_from_json(latents_to_json(b)), b));
}

TEST_CASE("latent format errors") {
  const fs::path p = scratch("bad.latv");
  io::write_file(p, "NOPE0000");
  CHECK_THROWS_AS(read_latents(p), FormatError);

  std::string header = "LATV";
  io::append_u32(header, 1);
  io::append_u32(header, 2);
  io::append_u32(header, 3);
  io::append_f64(header, 1.0);  // 1 value where items of 6 are expected
  io::write_file(p, header);
  CHECK_THROWS_AS(read_latents(p), FormatError);

  std::string version = "LATV";
  io::append_u32(version, 9);
  io::append_u32(version, 1);
  io::append_u32(version, 1);
  io::write_file(p, version);
  CHECK_THROWS_AS(read_latents(p), FormatError);

  nlohmann::json doc = latents_to_json(sample_batch(2, 3, 1));
  doc["latents"][0][1] = {1.0};
  CHECK_THROWS_AS(latents_from_json(doc), FormatError);
  CHECK_THROWS_AS(read_latents(scratch("missing.latv")), FormatError);
}

TEST_CASE("raw images round trip bit-exactly") {
  std::vector<Image> images;
  for (int i = 0; i < 3; ++i)
    images.push_back({4, 5, 3, random_vector(static_cast<std::uint64_t>(70 + i), 60)});
  const fs::path p = scratch("images.imgf");
  write_images_raw(p, images);
  const std::vector<Image> back = read_images_raw(p);
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(back[i] == images[i]);

  std::string bytes = io::read_file(p);
  bytes.pop_back();
  io::write_file(p, bytes);
  CHECK_THROWS_AS(read_images_raw(p), FormatError);
}

TEST_CASE("PPM output spans the batch range") {
  Image a{2, 2, 3, Eigen::VectorXd::LinSpaced(12, -1.0, 1.0)};
  Image b{2, 2, 3, Eigen::VectorXd::Zero(12)};
  const fs::path dir = scratch("ppm");
  fs::create_directories(dir);
  write_ppm_batch(dir, "img", {a, b});
  const std::string first = io::read_file(dir / "img_0000.ppm");
  const std::string second = io::read_file(dir / "img_0001.ppm");
  const std::string header = "P6\n2 2\n255\n";
  REQUIRE(first.size() == header.size() + 12);
  CHECK(first.substr(0, header.size()) == header);
  CHECK(static_cast<unsigned char>(first[header.size()]) == 0);
  CHECK(static_cast<unsigned char>(first.back()) == 255);
  CHECK(static_cast<unsigned char>(second[header.size()]) == 128);
  Image gray{2, 2, 1, Eigen::VectorXd::Zero(4)};
  CHECK_THROWS_AS(write_ppm_batch(dir, "gray", {gray}), DimensionError);
}

TEST_CASE("read_json reports malformed text as a format error") {
  const fs::path p = scratch("broken.json");
  io::write_file(p, "{\"a\": ");
  CHECK_THROWS_AS(io::read_json(p), FormatError);
}
