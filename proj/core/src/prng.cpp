#include "eamc/prng.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "eamc/binary_io.hpp"
#include "eamc/error.hpp"

namespace eamc {

namespace {

bool all_zero(const ParisiRapuano::Wheel& w) {
  return std::all_of(w.begin(), w.end(), [](std::uint32_t v) { return v == 0; });
}

void fill(ParisiRapuano::Wheel& wheel, std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& w : wheel) w = static_cast<std::uint32_t>(splitmix64(state));
}

}  // namespace

bool remix_if_degenerate(ParisiRapuano::Wheel& wheel, std::uint64_t seed) noexcept {
  if (!all_zero(wheel)) return false;
  fill(wheel, mix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL));
  return true;
}

int seed_wheel(ParisiRapuano::Wheel& wheel, std::uint64_t seed) noexcept {
  fill(wheel, seed);
  int rounds = 0;
  while (remix_if_degenerate(wheel, seed + static_cast<std::uint64_t>(rounds))) ++rounds;
  return rounds;
}

ParisiRapuano::ParisiRapuano(std::uint64_t seed) { seed_wheel(wheel_, seed); }

ParisiRapuano ParisiRapuano::from_state(const Wheel& wheel, std::size_t cursor) {
  if (cursor >= wheel_size) throw InvalidArgument("generator cursor out of range");
  if (all_zero(wheel)) throw InvalidArgument("generator wheel is all zero");
  ParisiRapuano g;
  g.wheel_ = wheel;
  g.cursor_ = cursor;
  return g;
}

void ParisiRapuano::write(std::ostream& out) const {
  BinaryWriter w(out);
  for (auto v : wheel_) w.u32(v);
  w.u8(static_cast<std::uint8_t>(cursor_));
}

ParisiRapuano ParisiRapuano::read(std::istream& in) {
  BinaryReader r(in);
  Wheel wheel{};
  for (auto& v : wheel) v = r.u32();
  const std::size_t cursor = r.u8();
  return from_state(wheel, cursor);
}

}  // namespace eamc
