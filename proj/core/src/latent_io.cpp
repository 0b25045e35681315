#include "latent/latent_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "latent/error.hpp"
#include "latent/io_util.hpp"

namespace latent {
namespace {

constexpr std::array<char, 4> kMagic = {'L', 'A', 'T', 'V'};
constexpr std::uint32_t kVersion = 1;

void validate(const LatentBatch& batch) {
  if (batch.scales < 1 || batch.dim < 1)
    throw DimensionError("latent batch: scales and dim must be positive");
  for (const auto& item : batch.items)
    require_dims(item.rows() == batch.scales && item.cols() == batch.dim,
                 "latent batch: item shape differs from batch shape");
}

}  // namespace

void write_latents_binary(const std::filesystem::path& path, const LatentBatch& batch) {
  validate(batch);
  std::string out(kMagic.begin(), kMagic.end());
  io::append_u32(out, kVersion);
  io::append_u32(out, static_cast<std::uint32_t>(batch.scales));
  io::append_u32(out, static_cast<std::uint32_t>(batch.dim));
  for (const auto& item : batch.items)
    for (Eigen::Index r = 0; r < item.rows(); ++r)
      for (Eigen::Index c = 0; c < item.cols(); ++c) io::append_f64(out, item(r, c));
  io::write_file(path, out);
}

LatentBatch read_latents_binary(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  if (bytes.size() < 16 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    throw FormatError(path.string() + ": not a LATV latent file");
  std::size_t pos = 4;
  const std::uint32_t version = io::read_u32(bytes, pos);
  if (version != kVersion)
    throw FormatError(path.string() + ": unsupported LATV version " +
                      std::to_string(version));
  LatentBatch batch;
  batch.scales = static_cast<int>(io::read_u32(bytes, pos));
  batch.dim = static_cast<int>(io::read_u32(bytes, pos));
  if (batch.scales < 1 || batch.dim < 1)
    throw FormatError(path.string() + ": zero scales or dim");
  const std::size_t item_bytes =
      static_cast<std::size_t>(batch.scales) * static_cast<std::size_t>(batch.dim) * 8;
  const std::size_t payload = bytes.size() - pos;
  if (payload % item_bytes != 0)
    throw FormatError(path.string() + ": payload is not a whole number of latents");
  const std::size_t count = payload / item_bytes;
  batch.items.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Eigen::MatrixXd item(batch.scales, batch.dim);
    for (Eigen::Index r = 0; r < item.rows(); ++r)
      for (Eigen::Index c = 0; c < item.cols(); ++c) item(r, c) = io::read_f64(bytes, pos);
    batch.items.push_back(std::move(item));
  }
  return batch;
}

nlohmann::json latents_to_json(const LatentBatch& batch) {
  validate(batch);
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : batch.items) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < item.rows(); ++r) {
      const Eigen::VectorXd row = item.row(r).transpose();
      rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    items.push_back(std::move(rows));
  }
  return {{"scales", batch.scales}, {"dim", batch.dim}, {"latents", std::move(items)}};
}

LatentBatch latents_from_json(const nlohmann::json& doc) {
  try {
    LatentBatch batch;
    batch.scales = doc.at("scales").get<int>();
    batch.dim = doc.at("dim").get<int>();
    if (batch.scales < 1 || batch.dim < 1)
      throw FormatError("latent json: scales and dim must be positive");
    for (const auto& rows : doc.at("latents")) {
      if (static_cast<int>(rows.size()) != batch.scales)
        throw FormatError("latent json: item has wrong number of rows");
      Eigen::MatrixXd item(batch.scales, batch.dim);
      for (int r = 0; r < batch.scales; ++r) {
        const auto row = rows[static_cast<std::size_t>(r)].get<std::vector<double>>();
        if (static_cast<int>(row.size()) != batch.dim)
          throw FormatError("latent json: row has wrong length");
        for (int c = 0; c < batch.dim; ++c) item(r, c) = row[static_cast<std::size_t>(c)];
      }
      batch.items.push_back(std::move(item));
    }
    return batch;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("latent json: ") + e.what());
  }
}

void write_latents_json(const std::filesystem::path& path, const LatentBatch& batch) {
  io::write_file(path, latents_to_json(batch).dump(1) + "\n");
}

LatentBatch read_latents_json(const std::filesystem::path& path) {
  return latents_from_json(io::read_json(path));
}

void write_latents(const std::filesystem::path& path, const LatentBatch& batch) {
  if (path.extension() == ".json") write_latents_json(path, batch);
  else write_latents_binary(path, batch);
}

LatentBatch read_latents(const std::filesystem::path& path) {
  if (path.extension() == ".json") return read_latents_json(path);
  return read_latents_binary(path);
}

}  // namespace latent
