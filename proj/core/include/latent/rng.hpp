#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace latent {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based seed splitting. Child streams are addressed by an index, so a
/// task's randomness depends only on (base, index) and never on scheduling.
///
///   split_seed(base, i) = mix64(mix64(base) + (i + 1) * 0x9E3779B97F4A7C15)
std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// Two-level split, e.g. (command seed, stream tag) then (task index).
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t stream,
                                std::uint64_t index) noexcept {
  return split_seed(split_seed(base, stream), index);
}

Rng make_rng(std::uint64_t seed);

void fill_normal(Rng& rng, std::span<double> out, double mean = 0.0,
                 double stddev = 1.0);

/// Named stream tags used when one command seed fans out to several roles.
namespace stream {
inline constexpr std::uint64_t kWeights = 1;
inline constexpr std::uint64_t kLatentZ = 2;
inline constexpr std::uint64_t kInversionNoise = 3;
inline constexpr std::uint64_t kPairs = 4;
inline constexpr std::uint64_t kFeatures = 5;
inline constexpr std::uint64_t kReference = 6;
inline constexpr std::uint64_t kSamples = 7;
}  // namespace stream

}  // namespace latent
