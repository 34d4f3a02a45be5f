#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "eamc/geometry.hpp"

namespace eamc {

/// Field magnitude h >= 0, quantized to multiples of 1/4 so that every
/// energy change 4*n_sat - 12 +/- 2h is an exact table key.
class FieldStrength {
 public:
  static constexpr std::int32_t denominator = 4;

  constexpr FieldStrength() = default;
  static FieldStrength from_quarters(std::int32_t quarters);
  /// Rejects values that are negative or not a multiple of 1/4.
  static FieldStrength from_value(double h);

  constexpr std::int32_t quarters() const noexcept { return quarters_; }
  constexpr double value() const noexcept {
    return static_cast<double>(quarters_) / denominator;
  }
  constexpr bool is_zero() const noexcept { return quarters_ == 0; }

  bool operator==(const FieldStrength&) const = default;

 private:
  std::int32_t quarters_ = 0;
};

/// One realization of the quenched disorder: three coupling bits per site
/// (bonds towards +x, +y, +z; j=1 means J=+1) and an optional field bit
/// (b=1 means h_i=+h). Four bits per site, stored one nibble per byte.
///
/// For an extent of 2 the +d and -d neighbours coincide; both bonds are stored
/// and counted, so every site always has six bond terms.
class Sample {
 public:
  static constexpr std::uint8_t field_bit_mask = 0x8;

  Sample(LatticeGeometry geometry, std::vector<std::uint8_t> site_bits,
         FieldStrength field = {}, std::uint64_t sample_id = 0,
         std::uint64_t coupling_seed = 0);

  /// Draws equiprobable +/-1 couplings (and equiprobable field signs when
  /// h > 0) from the mixing sequence seeded with `coupling_seed`.
  static Sample generate(const LatticeGeometry& geometry, std::uint64_t sample_id,
                         std::uint64_t coupling_seed, FieldStrength field = {});

  /// All couplings set to `j` (0 or 1); mostly for tests.
  static Sample uniform(const LatticeGeometry& geometry, int j, FieldStrength field = {});

  const LatticeGeometry& geometry() const noexcept { return geometry_; }
  FieldStrength field() const noexcept { return field_; }
  bool has_field() const noexcept { return !field_.is_zero(); }
  std::uint64_t id() const noexcept { return id_; }
  std::uint64_t coupling_seed() const noexcept { return seed_; }

  /// Coupling bit of the bond from `site` towards +axis.
  int coupling(std::size_t site, Axis axis) const noexcept {
    return (bits_[site] >> static_cast<int>(axis)) & 1;
  }
  /// Coupling bit of the bond from `site` along any of the six directions.
  int coupling(std::size_t site, Direction d) const noexcept {
    if (is_positive(d)) return coupling(site, axis_of(d));
    return coupling(geometry_.neighbor(site, d), axis_of(d));
  }
  int field_bit(std::size_t site) const noexcept { return (bits_[site] >> 3) & 1; }
  /// Site bits: bits 0..2 couplings (+x,+y,+z), bit 3 field.
  std::uint8_t site_bits(std::size_t site) const noexcept { return bits_[site]; }
  std::span<const std::uint8_t> site_bits() const noexcept { return bits_; }

  void write(std::ostream& out) const;
  static Sample read(std::istream& in);

  bool operator==(const Sample&) const = default;

 private:
  LatticeGeometry geometry_;
  std::vector<std::uint8_t> bits_;
  FieldStrength field_;
  std::uint64_t id_ = 0;
  std::uint64_t seed_ = 0;
};

}  // namespace eamc
