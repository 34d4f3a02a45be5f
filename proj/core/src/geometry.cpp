#include "eamc/geometry.hpp"

#include <string>

#include "eamc/error.hpp"

namespace eamc {

namespace {

void check_extent(std::size_t n, const char* name) {
  if (n < 2 || (n % 2) != 0) {
    throw InvalidArgument(std::string("lattice extent ") + name +
                          " must be even and >= 2, got " + std::to_string(n));
  }
  if (n > (1U << 15)) {
    throw InvalidArgument(std::string("lattice extent ") + name + " too large");
  }
}

}  // namespace

LatticeGeometry::LatticeGeometry(std::size_t side) : LatticeGeometry(side, side, side) {}

LatticeGeometry::LatticeGeometry(std::size_t lx, std::size_t ly, std::size_t lz)
    : extent_{lx, ly, lz} {
  check_extent(lx, "Lx");
  check_extent(ly, "Ly");
  check_extent(lz, "Lz");
  if (size() >= (std::size_t{1} << 32)) {
    throw InvalidArgument("lattice has too many sites (must be < 2^32)");
  }
}

std::size_t LatticeGeometry::side() const {
  if (!is_cubic()) throw InvalidArgument("lattice is not cubic");
  return extent_[0];
}

Coord LatticeGeometry::coord(std::size_t site) const noexcept {
  const std::size_t plane = plane_size();
  Coord c;
  c.z = site / plane;
  const std::size_t rem = site - c.z * plane;
  c.y = rem / extent_[0];
  c.x = rem - c.y * extent_[0];
  return c;
}

std::size_t LatticeGeometry::neighbor(std::size_t site, Direction d) const noexcept {
  Coord c = coord(site);
  const auto step = [](std::size_t v, std::size_t n, bool up) {
    return up ? (v + 1 == n ? 0 : v + 1) : (v == 0 ? n - 1 : v - 1);
  };
  const bool up = is_positive(d);
  switch (axis_of(d)) {
    case Axis::x: c.x = step(c.x, extent_[0], up); break;
    case Axis::y: c.y = step(c.y, extent_[1], up); break;
    case Axis::z: c.z = step(c.z, extent_[2], up); break;
  }
  return index(c);
}

}  // namespace eamc
