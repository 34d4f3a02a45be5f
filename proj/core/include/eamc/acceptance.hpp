#pragma once

#include <array>
#include <cstdint>

#include "eamc/sample.hpp"

namespace eamc {

/// A 32-bit fixed-point acceptance probability. A draw r is accepted when
/// `always` is set or r < value; value 0 never accepts.
struct Threshold {
  std::uint32_t value = 0;
  bool always = false;

  constexpr bool accepts(std::uint32_t r) const noexcept { return always || r < value; }
  bool operator==(const Threshold&) const = default;
};

/// floor(2^32 * p) for p in [0, 1); p >= 1 yields the always-accept flag.
Threshold fixed_point_threshold(long double p) noexcept;

/// Metropolis table for one inverse temperature, indexed by the number of
/// satisfied bonds n_sat (0..6) and whether the site's field term h_i*S_i is
/// positive. dE = 4*n_sat - 12 + 2*h_i*S_i.
class AcceptanceTable {
 public:
  static constexpr int key_count = 14;

  /// beta may be +infinity (zero temperature). Negative or NaN beta throws.
  explicit AcceptanceTable(double beta, FieldStrength field = {});

  double beta() const noexcept { return beta_; }
  FieldStrength field() const noexcept { return field_; }

  static constexpr int key(int n_sat, bool field_aligned) noexcept {
    return 2 * n_sat + (field_aligned ? 1 : 0);
  }
  /// Energy change for a key, times 4.
  std::int64_t delta_e_quarters(int key) const noexcept;
  double delta_e(int key) const noexcept { return static_cast<double>(delta_e_quarters(key)) / 4.0; }

  const Threshold& entry(int key) const noexcept { return entries_[static_cast<std::size_t>(key)]; }
  const Threshold& entry(int n_sat, bool field_aligned) const noexcept {
    return entry(key(n_sat, field_aligned));
  }
  /// Keys that can occur for this field: 7 without a field, 14 with one.
  bool reachable(int key) const noexcept { return !field_.is_zero() || (key & 1) == 0; }

 private:
  double beta_;
  FieldStrength field_;
  std::array<Threshold, key_count> entries_{};
};

/// Heat-bath table: probability that sigma_i becomes 1, indexed by the number
/// m of neighbours with J_ij*S_j = +1 and the field bit, since the local field
/// is h_loc = 2m - 6 + h_i and p = 1 / (1 + exp(-2 beta h_loc)).
class HeatBathTable {
 public:
  static constexpr int key_count = 14;

  explicit HeatBathTable(double beta, FieldStrength field = {});

  double beta() const noexcept { return beta_; }
  FieldStrength field() const noexcept { return field_; }

  static constexpr int key(int m, int field_bit) noexcept { return 2 * m + field_bit; }
  const Threshold& entry(int key) const noexcept { return entries_[static_cast<std::size_t>(key)]; }
  /// Local field for a key.
  double local_field(int key) const noexcept;
  /// Exact (unquantized) probability of sigma=1 for a key.
  double probability(int key) const noexcept;

 private:
  double beta_;
  FieldStrength field_;
  std::array<Threshold, key_count> entries_{};
};

}  // namespace eamc
