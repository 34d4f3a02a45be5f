#include "eamc/sample.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "eamc/binary_io.hpp"
#include "eamc/error.hpp"
#include "eamc/mixing.hpp"

namespace eamc {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'A', 'S', 'G'};
constexpr std::uint16_t kVersion = 1;

}  // namespace

FieldStrength FieldStrength::from_quarters(std::int32_t quarters) {
  if (quarters < 0) throw InvalidArgument("field magnitude must be >= 0");
  FieldStrength f;
  f.quarters_ = quarters;
  return f;
}

FieldStrength FieldStrength::from_value(double h) {
  if (!(h >= 0.0) || !std::isfinite(h)) {
    throw InvalidArgument("field magnitude must be finite and >= 0");
  }
  const double scaled = h * denominator;
  const double rounded = std::round(scaled);
  if (scaled != rounded || rounded > 1e6) {
    throw InvalidArgument("field magnitude must be a multiple of 0.25, got " +
                          std::to_string(h));
  }
  return from_quarters(static_cast<std::int32_t>(rounded));
}

Sample::Sample(LatticeGeometry geometry, std::vector<std::uint8_t> site_bits,
               FieldStrength field, std::uint64_t sample_id, std::uint64_t coupling_seed)
    : geometry_(geometry),
      bits_(std::move(site_bits)),
      field_(field),
      id_(sample_id),
      seed_(coupling_seed) {
  if (bits_.size() != geometry_.size()) {
    throw InvalidArgument("site bit count does not match geometry");
  }
  const std::uint8_t allowed = field_.is_zero() ? 0x7 : 0xF;
  for (auto& b : bits_) {
    if ((b & ~allowed) != 0) {
      throw InvalidArgument(field_.is_zero() ? "field bits present but h = 0"
                                             : "site bits use reserved positions");
    }
  }
}

Sample Sample::generate(const LatticeGeometry& geometry, std::uint64_t sample_id,
                        std::uint64_t coupling_seed, FieldStrength field) {
  std::vector<std::uint8_t> bits(geometry.size(), 0);
  std::uint64_t state = coupling_seed;
  std::uint64_t buffer = 0;
  int left = 0;
  const auto next_bit = [&]() {
    if (left == 0) {
      buffer = splitmix64(state);
      left = 64;
    }
    const auto b = static_cast<std::uint8_t>(buffer & 1U);
    buffer >>= 1;
    --left;
    return b;
  };
  for (auto& b : bits) {
    for (int axis = 0; axis < 3; ++axis) b |= static_cast<std::uint8_t>(next_bit() << axis);
  }
  if (!field.is_zero()) {
    for (auto& b : bits) b |= static_cast<std::uint8_t>(next_bit() << 3);
  }
  return Sample(geometry, std::move(bits), field, sample_id, coupling_seed);
}

Sample Sample::uniform(const LatticeGeometry& geometry, int j, FieldStrength field) {
  const std::uint8_t v = j ? 0x7 : 0x0;
  return Sample(geometry, std::vector<std::uint8_t>(geometry.size(), v), field);
}

void Sample::write(std::ostream& out) const {
  BinaryWriter w(out);
  w.bytes(kMagic);
  w.u16(kVersion);
  w.u16(static_cast<std::uint16_t>(geometry_.lx()));
  w.u16(static_cast<std::uint16_t>(geometry_.ly()));
  w.u16(static_cast<std::uint16_t>(geometry_.lz()));
  w.i32(field_.quarters());
  w.u32(static_cast<std::uint32_t>(FieldStrength::denominator));
  w.u64(id_);
  w.u64(seed_);

  const std::size_t n = geometry_.size();
  std::vector<std::uint8_t> packed((3 * n + 7) / 8, 0);
  for (std::size_t s = 0; s < n; ++s) {
    for (int a = 0; a < 3; ++a) {
      const std::size_t k = 3 * s + static_cast<std::size_t>(a);
      packed[k / 8] |= static_cast<std::uint8_t>(((bits_[s] >> a) & 1U) << (k % 8));
    }
  }
  w.bytes(packed);
  if (has_field()) {
    std::vector<std::uint8_t> fb((n + 7) / 8, 0);
    for (std::size_t s = 0; s < n; ++s) {
      fb[s / 8] |= static_cast<std::uint8_t>(field_bit(s) << (s % 8));
    }
    w.bytes(fb);
  }
  if (!out) throw Error("failed writing sample");
}

Sample Sample::read(std::istream& in) {
  BinaryReader r(in);
  std::array<char, 4> magic{};
  r.bytes(std::span<char>(magic));
  if (magic != kMagic) throw InvalidArgument("not a sample file (bad magic)");
  const auto version = r.u16();
  if (version != kVersion) {
    throw InvalidArgument("unsupported sample version " + std::to_string(version));
  }
  const std::size_t lx = r.u16();
  const std::size_t ly = r.u16();
  const std::size_t lz = r.u16();
  const std::int32_t num = r.i32();
  const std::uint32_t den = r.u32();
  const std::uint64_t id = r.u64();
  const std::uint64_t seed = r.u64();
  if (den == 0 || num < 0) throw InvalidArgument("invalid field fraction");
  const double h = static_cast<double>(num) / static_cast<double>(den);
  const FieldStrength field = FieldStrength::from_value(h);

  const LatticeGeometry geom(lx, ly, lz);
  const std::size_t n = geom.size();
  std::vector<std::uint8_t> packed((3 * n + 7) / 8);
  r.bytes(std::span<std::uint8_t>(packed));
  std::vector<std::uint8_t> bits(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    for (int a = 0; a < 3; ++a) {
      const std::size_t k = 3 * s + static_cast<std::size_t>(a);
      bits[s] |= static_cast<std::uint8_t>(((packed[k / 8] >> (k % 8)) & 1U) << a);
    }
  }
  if (!field.is_zero()) {
    std::vector<std::uint8_t> fb((n + 7) / 8);
    r.bytes(std::span<std::uint8_t>(fb));
    for (std::size_t s = 0; s < n; ++s) {
      bits[s] |= static_cast<std::uint8_t>(((fb[s / 8] >> (s % 8)) & 1U) << 3);
    }
  }
  return Sample(geom, std::move(bits), field, id, seed);
}

}  // namespace eamc
