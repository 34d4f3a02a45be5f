#include "eamc/spin_config.hpp"

#include <string>

#include "eamc/error.hpp"
#include "eamc/mixing.hpp"

namespace eamc {

SpinConfiguration::SpinConfiguration(LatticeGeometry geometry, std::size_t width)
    : geometry_(geometry), width_(width), words_(geometry.size(), 0) {
  if (width == 0 || width > max_width) {
    throw InvalidArgument("configuration width must be in [1, 64], got " +
                          std::to_string(width));
  }
}

SpinConfiguration SpinConfiguration::random(const LatticeGeometry& geometry,
                                            std::size_t width, std::uint64_t seed) {
  SpinConfiguration c(geometry, width);
  std::uint64_t state = seed;
  const std::uint64_t mask = c.lane_mask();
  for (auto& w : c.words_) w = splitmix64(state) & mask;
  return c;
}

SpinConfiguration SpinConfiguration::all_up(const LatticeGeometry& geometry,
                                            std::size_t width) {
  SpinConfiguration c(geometry, width);
  for (auto& w : c.words_) w = c.lane_mask();
  return c;
}

SpinConfiguration SpinConfiguration::pack(const LatticeGeometry& geometry,
                                          std::span<const std::vector<std::int8_t>> lanes) {
  if (lanes.empty() || lanes.size() > max_width) {
    throw InvalidArgument("pack needs between 1 and 64 lanes, got " +
                          std::to_string(lanes.size()));
  }
  SpinConfiguration c(geometry, lanes.size());
  for (std::size_t lane = 0; lane < lanes.size(); ++lane) {
    const auto& spins = lanes[lane];
    if (spins.size() != geometry.size()) {
      throw InvalidArgument("lane " + std::to_string(lane) + " has wrong site count");
    }
    for (std::size_t s = 0; s < spins.size(); ++s) {
      if (spins[s] != 1 && spins[s] != -1) {
        throw InvalidArgument("spins must be +1 or -1");
      }
      if (spins[s] > 0) c.words_[s] |= std::uint64_t{1} << lane;
    }
  }
  return c;
}

std::vector<std::int8_t> SpinConfiguration::unpack(std::size_t lane) const {
  if (lane >= width_) throw InvalidArgument("lane out of range");
  std::vector<std::int8_t> out(words_.size());
  for (std::size_t s = 0; s < words_.size(); ++s) {
    out[s] = static_cast<std::int8_t>(spin(s, lane));
  }
  return out;
}

SpinConfiguration SpinConfiguration::extract_lane(std::size_t lane) const {
  if (lane >= width_) throw InvalidArgument("lane out of range");
  SpinConfiguration c(geometry_, 1);
  for (std::size_t s = 0; s < words_.size(); ++s) c.words_[s] = (words_[s] >> lane) & 1U;
  return c;
}

void SpinConfiguration::insert_lane(std::size_t lane, const SpinConfiguration& scalar) {
  if (lane >= width_) throw InvalidArgument("lane out of range");
  if (!(scalar.geometry_ == geometry_)) throw InvalidArgument("geometry mismatch");
  for (std::size_t s = 0; s < words_.size(); ++s) set_bit(s, lane, scalar.bit(s, 0));
}

}  // namespace eamc
