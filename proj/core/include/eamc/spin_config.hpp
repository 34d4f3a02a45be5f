#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eamc/geometry.hpp"

namespace eamc {

/// Bit-packed spins sigma = (1+S)/2 for W independent samples sharing one
/// geometry. Word i holds site i; lane w of that word belongs to sample w.
/// Lanes >= W are kept zero.
class SpinConfiguration {
 public:
  static constexpr std::size_t max_width = 64;

  explicit SpinConfiguration(LatticeGeometry geometry, std::size_t width = 1);

  /// Uniformly random spins in every lane.
  static SpinConfiguration random(const LatticeGeometry& geometry, std::size_t width,
                                  std::uint64_t seed);
  /// Every spin up (sigma = 1) in every lane.
  static SpinConfiguration all_up(const LatticeGeometry& geometry, std::size_t width = 1);

  /// Packs W arrays of +/-1 spins, lane order = input order.
  static SpinConfiguration pack(const LatticeGeometry& geometry,
                                std::span<const std::vector<std::int8_t>> lanes);
  /// The +/-1 spins of one lane.
  std::vector<std::int8_t> unpack(std::size_t lane) const;

  const LatticeGeometry& geometry() const noexcept { return geometry_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return words_.size(); }
  std::uint64_t lane_mask() const noexcept {
    return width_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width_) - 1);
  }

  std::span<std::uint64_t> words() noexcept { return words_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  int bit(std::size_t site, std::size_t lane = 0) const noexcept {
    return static_cast<int>((words_[site] >> lane) & 1U);
  }
  int spin(std::size_t site, std::size_t lane = 0) const noexcept {
    return 2 * bit(site, lane) - 1;
  }
  void set_bit(std::size_t site, std::size_t lane, int value) noexcept {
    const std::uint64_t m = std::uint64_t{1} << lane;
    words_[site] = value ? (words_[site] | m) : (words_[site] & ~m);
  }
  void flip(std::size_t site, std::size_t lane = 0) noexcept {
    words_[site] ^= std::uint64_t{1} << lane;
  }

  /// Copies one lane into a scalar (W=1) configuration.
  SpinConfiguration extract_lane(std::size_t lane) const;
  /// Overwrites lane `lane` with the scalar configuration `scalar`.
  void insert_lane(std::size_t lane, const SpinConfiguration& scalar);

  bool operator==(const SpinConfiguration&) const = default;

 private:
  LatticeGeometry geometry_;
  std::size_t width_;
  std::vector<std::uint64_t> words_;
};

}  // namespace eamc
