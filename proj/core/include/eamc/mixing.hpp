#pragma once

#include <cstdint>

namespace eamc {

// Stateless 64-bit mixing used for all seed derivation in the project.
//
//   state  <- state + 0x9E3779B97F4A7C15
//   z      <- state
//   z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output <- z ^ (z >> 31)
//
// These constants are frozen: changing them changes every trajectory.

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// One step of the additive mixing sequence; advances `state`.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += kGoldenGamma;
  return mix64(state);
}

/// Domain-separation tags for seeds derived from a campaign master seed.
enum class SeedTag : std::uint64_t {
  couplings = 0x636f75706c696e67ULL,  // "coupling"
  initial_spins = 0x7370696e73696e69ULL,
  chain_stream = 0x636861696e727367ULL,
  swap_stream = 0x7377617070696e67ULL,
  slab_stream = 0x736c616273747265ULL,
  keyed_stream = 0x6b65796564737472ULL,
};

/// Derives an independent 64-bit seed from (master, tag, index).
constexpr std::uint64_t derive_seed(std::uint64_t master, SeedTag tag,
                                    std::uint64_t index) noexcept {
  std::uint64_t x = mix64(master + kGoldenGamma);
  x = mix64(x ^ static_cast<std::uint64_t>(tag));
  x = mix64(x + kGoldenGamma * (index + 1));
  return x;
}

}  // namespace eamc
