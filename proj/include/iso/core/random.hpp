#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace iso {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a parent seed and an index.
/// Adding new indices never perturbs the seeds of existing ones.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Fixed stream tags so that different consumers of one seed never collide.
namespace stream {
inline constexpr std::uint64_t kConnectivity = 0x636f6e6eULL;
inline constexpr std::uint64_t kTransition = 0x7472616eULL;
inline constexpr std::uint64_t kInitial = 0x696e6974ULL;
inline constexpr std::uint64_t kReward = 0x72657764ULL;
inline constexpr std::uint64_t kTrajectory = 0x7472616aULL;
inline constexpr std::uint64_t kShuffle = 0x73687566ULL;
}  // namespace stream

inline Rng make_rng(std::uint64_t seed, std::uint64_t tag) { return Rng(derive_seed(seed, tag)); }

/// Uniform real in [0, 1) using the top 53 bits.
double uniform01(Rng& rng);

/// Draws an index from an (unnormalized, non-negative) weight vector.
std::size_t sample_index(std::span<const double> weights, Rng& rng);

/// A uniform point on the (n-1)-simplex: symmetric Dirichlet with concentration 1.
std::vector<double> sample_simplex(std::size_t n, Rng& rng);

/// Standard normal variate (Box-Muller; no hidden state across calls).
double standard_normal(Rng& rng);

}  // namespace iso
