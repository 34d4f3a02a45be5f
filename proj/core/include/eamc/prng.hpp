#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>

#include "eamc/mixing.hpp"

namespace eamc {

/// Parisi-Rapuano lagged generator on a 62-word wheel.
///
/// With cursor c and indices taken mod 62, one output is
///
///   t        = wheel[c-24] + wheel[c-55]   (mod 2^32)
///   r        = t ^ wheel[c-61]
///   wheel[c] = t,  c = c+1
///
/// so each output reads three wheel words. Seeding fills the wheel with 62
/// consecutive outputs of splitmix64(seed), truncated to the low 32 bits.
class ParisiRapuano {
 public:
  static constexpr std::size_t wheel_size = 62;
  static constexpr std::size_t lag_a = 24;
  static constexpr std::size_t lag_b = 55;
  static constexpr std::size_t lag_c = 61;
  using Wheel = std::array<std::uint32_t, wheel_size>;

  explicit ParisiRapuano(std::uint64_t seed);

  /// Restores a generator from a saved wheel; rejects an all-zero wheel or a
  /// cursor outside the wheel.
  static ParisiRapuano from_state(const Wheel& wheel, std::size_t cursor);

  std::uint32_t next() noexcept {
    const std::size_t a = cursor_ >= lag_a ? cursor_ - lag_a : cursor_ + wheel_size - lag_a;
    const std::size_t b = cursor_ >= lag_b ? cursor_ - lag_b : cursor_ + wheel_size - lag_b;
    const std::size_t c = cursor_ >= lag_c ? cursor_ - lag_c : cursor_ + wheel_size - lag_c;
    const std::uint32_t t = wheel_[a] + wheel_[b];
    const std::uint32_t r = t ^ wheel_[c];
    wheel_[cursor_] = t;
    cursor_ = cursor_ + 1 == wheel_size ? 0 : cursor_ + 1;
    return r;
  }
  std::uint32_t operator()() noexcept { return next(); }

  const Wheel& wheel() const noexcept { return wheel_; }
  std::size_t cursor() const noexcept { return cursor_; }

  /// 62 x 4 bytes little-endian followed by a one-byte cursor.
  void write(std::ostream& out) const;
  static ParisiRapuano read(std::istream& in);
  static constexpr std::size_t serialized_size = wheel_size * 4 + 1;

  bool operator==(const ParisiRapuano&) const = default;

 private:
  ParisiRapuano() = default;

  Wheel wheel_{};
  std::size_t cursor_ = 0;
};

/// Fills `wheel` from splitmix64(seed). If every word comes out zero the
/// sequence is re-mixed with a perturbed seed until it does not. Returns the
/// number of re-mix rounds taken.
int seed_wheel(ParisiRapuano::Wheel& wheel, std::uint64_t seed) noexcept;

/// The re-mix rule on its own: replaces an all-zero wheel with a fresh fill
/// and returns true if it did so.
bool remix_if_degenerate(ParisiRapuano::Wheel& wheel, std::uint64_t seed) noexcept;

/// Stateless per-site random numbers: the value depends only on
/// (seed, site, sweep, phase), so any worker evaluating a site gets the same
/// number.
class SiteKeyedStream {
 public:
  constexpr SiteKeyedStream() = default;
  constexpr explicit SiteKeyedStream(std::uint64_t seed) noexcept : seed_(seed) {}

  constexpr std::uint32_t operator()(std::uint64_t site, std::uint64_t sweep,
                                     int phase) const noexcept {
    std::uint64_t x = mix64(seed_ + kGoldenGamma);
    x = mix64(x ^ (site * 0xD1B54A32D192ED03ULL + 1));
    x = mix64(x ^ (sweep * 0xAEF17502108EF2D9ULL + 1));
    x = mix64(x ^ static_cast<std::uint64_t>(phase + 1));
    return static_cast<std::uint32_t>(x >> 32);
  }

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  bool operator==(const SiteKeyedStream&) const = default;

 private:
  std::uint64_t seed_ = 0;
};

inline std::uint32_t site_random(const SiteKeyedStream& stream, std::uint64_t site,
                                 std::uint64_t sweep, int phase) noexcept {
  return stream(site, sweep, phase);
}

}  // namespace eamc
