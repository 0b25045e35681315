#include "latent/rng.hpp"

namespace latent {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(mix64(base) + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

Rng make_rng(std::uint64_t seed) { return Rng(seed); }

void fill_normal(Rng& rng, std::span<double> out, double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  for (double& x : out) x = dist(rng);
}

}  // namespace latent
