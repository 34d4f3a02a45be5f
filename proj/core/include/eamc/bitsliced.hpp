#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "eamc/acceptance.hpp"
#include "eamc/sample.hpp"
#include "eamc/spin_config.hpp"
#include "eamc/sweep.hpp"

namespace eamc {

/// Couplings of W samples transposed into words: lane w of word i along axis
/// a is the +a coupling bit of site i in sample w.
class PackedCouplings {
 public:
  /// All samples must share a geometry and have no field; 1 <= W <= 64.
  static PackedCouplings pack(std::span<const Sample> samples);

  const LatticeGeometry& geometry() const noexcept { return geometry_; }
  std::size_t width() const noexcept { return width_; }
  std::span<const std::uint64_t> words(Axis axis) const noexcept {
    return words_[static_cast<std::size_t>(axis)];
  }

 private:
  PackedCouplings(LatticeGeometry geometry, std::size_t width);

  LatticeGeometry geometry_;
  std::size_t width_;
  std::array<std::vector<std::uint64_t>, 3> words_;
};

/// Per-lane attempt/accept counts by satisfied-bond count n_sat = 0..6.
struct LaneFlipStats {
  std::array<std::array<std::uint64_t, 64>, 7> attempts{};
  std::array<std::array<std::uint64_t, 64>, 7> accepts{};

  void merge(const LaneFlipStats& other) noexcept;
  /// Energy change x4 of lane `lane` implied by the accepted flips.
  std::int64_t energy_change_quarters(std::size_t lane) const noexcept;
  /// Collapses one lane into the scalar FlipStats layout.
  FlipStats lane(std::size_t lane) const noexcept;
};

/// One checkerboard Metropolis sweep over W packed samples. For each site
/// word: six XORs give per-lane satisfied-bond masks, a full-adder network
/// reduces them to a 3-bit n_sat per lane, and a single shared random number
/// is compared against the table to build the flip mask. Lane w follows the
/// scalar engine on sample w exactly when both consume the same randoms.
///
/// `stats` may be null to skip counting.
void metropolis_sweep_bitsliced(const PackedCouplings& couplings, SpinConfiguration& config,
                                const AcceptanceTable& table, SweepRandom rng,
                                LaneFlipStats* stats = nullptr);

}  // namespace eamc
