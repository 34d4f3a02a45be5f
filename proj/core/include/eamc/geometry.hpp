#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace eamc {

enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };

/// Six lattice directions. The first three are the "positive" directions
/// along which couplings are stored.
enum class Direction : std::uint8_t { xp = 0, yp = 1, zp = 2, xm = 3, ym = 4, zm = 5 };

struct Coord {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t z = 0;
  bool operator==(const Coord&) const = default;
};

/// Periodic three-dimensional lattice. Sites are numbered lexicographically,
/// idx = x + Lx*y + Lx*Ly*z. Every extent must be even and >= 2 so that the
/// checkerboard colouring tiles the torus.
class LatticeGeometry {
 public:
  explicit LatticeGeometry(std::size_t side);
  LatticeGeometry(std::size_t lx, std::size_t ly, std::size_t lz);

  std::size_t lx() const noexcept { return extent_[0]; }
  std::size_t ly() const noexcept { return extent_[1]; }
  std::size_t lz() const noexcept { return extent_[2]; }
  std::size_t extent(Axis a) const noexcept { return extent_[static_cast<int>(a)]; }
  std::size_t size() const noexcept { return extent_[0] * extent_[1] * extent_[2]; }
  std::size_t plane_size() const noexcept { return extent_[0] * extent_[1]; }

  bool is_cubic() const noexcept {
    return extent_[0] == extent_[1] && extent_[1] == extent_[2];
  }
  /// Side length of a cubic lattice. Throws InvalidArgument otherwise.
  std::size_t side() const;

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + extent_[0] * (y + extent_[1] * z);
  }
  std::size_t index(const Coord& c) const noexcept { return index(c.x, c.y, c.z); }
  Coord coord(std::size_t site) const noexcept;

  int parity(std::size_t site) const noexcept {
    const Coord c = coord(site);
    return static_cast<int>((c.x + c.y + c.z) & 1U);
  }

  std::size_t neighbor(std::size_t site, Direction d) const noexcept;

  bool operator==(const LatticeGeometry&) const = default;

 private:
  std::array<std::size_t, 3> extent_;
};

inline constexpr Axis axis_of(Direction d) noexcept {
  return static_cast<Axis>(static_cast<int>(d) % 3);
}
inline constexpr bool is_positive(Direction d) noexcept {
  return static_cast<int>(d) < 3;
}

}  // namespace eamc
