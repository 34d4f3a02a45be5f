#include "eamc/bitsliced.hpp"

#include <string>

#include "eamc/error.hpp"
#include "kernels.hpp"

namespace eamc {

PackedCouplings::PackedCouplings(LatticeGeometry geometry, std::size_t width)
    : geometry_(geometry), width_(width) {
  for (auto& w : words_) w.assign(geometry.size(), 0);
}

PackedCouplings PackedCouplings::pack(std::span<const Sample> samples) {
  if (samples.empty() || samples.size() > SpinConfiguration::max_width) {
    throw InvalidArgument("bit-sliced packing needs 1..64 samples, got " +
                          std::to_string(samples.size()));
  }
  PackedCouplings p(samples.front().geometry(), samples.size());
  for (std::size_t lane = 0; lane < samples.size(); ++lane) {
    const Sample& s = samples[lane];
    if (!(s.geometry() == p.geometry_)) throw InvalidArgument("samples differ in geometry");
    if (s.has_field()) throw InvalidArgument("bit-sliced engine supports h = 0 only");
    for (std::size_t i = 0; i < p.geometry_.size(); ++i) {
      const std::uint8_t b = s.site_bits(i);
      for (int a = 0; a < 3; ++a) {
        p.words_[static_cast<std::size_t>(a)][i] |=
            static_cast<std::uint64_t>((b >> a) & 1U) << lane;
      }
    }
  }
  return p;
}

void LaneFlipStats::merge(const LaneFlipStats& other) noexcept {
  for (std::size_t n = 0; n < 7; ++n) {
    for (std::size_t l = 0; l < 64; ++l) {
      attempts[n][l] += other.attempts[n][l];
      accepts[n][l] += other.accepts[n][l];
    }
  }
}

std::int64_t LaneFlipStats::energy_change_quarters(std::size_t lane) const noexcept {
  std::int64_t q = 0;
  for (std::size_t n = 0; n < 7; ++n) {
    q += static_cast<std::int64_t>(accepts[n][lane]) * 4 * (4 * static_cast<std::int64_t>(n) - 12);
  }
  return q;
}

FlipStats LaneFlipStats::lane(std::size_t lane) const noexcept {
  FlipStats f;
  for (std::size_t n = 0; n < 7; ++n) {
    auto& bin = f.bins[static_cast<std::size_t>(AcceptanceTable::key(static_cast<int>(n), false))];
    bin.attempts = attempts[n][lane];
    bin.accepts = accepts[n][lane];
  }
  f.energy_change_quarters = energy_change_quarters(lane);
  return f;
}

namespace {

// Bit-sliced counter: plane k holds bit k of 64 independent per-lane counts.
class VerticalCounter {
 public:
  static constexpr int planes = 32;

  void add(std::uint64_t mask) noexcept {
    for (int k = 0; k < planes && mask != 0; ++k) {
      const std::uint64_t carry = planes_[k] & mask;
      planes_[k] ^= mask;
      mask = carry;
    }
  }

  void flush(std::array<std::uint64_t, 64>& totals) noexcept {
    for (int k = 0; k < planes; ++k) {
      std::uint64_t p = planes_[k];
      while (p != 0) {
        const int lane = __builtin_ctzll(p);
        totals[static_cast<std::size_t>(lane)] += std::uint64_t{1} << k;
        p &= p - 1;
      }
      planes_[k] = 0;
    }
  }

 private:
  std::uint64_t planes_[planes] = {};
};

struct FullAdder {
  std::uint64_t sum;
  std::uint64_t carry;
};

inline FullAdder full_add(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  const std::uint64_t ab = a ^ b;
  return {ab ^ c, (a & b) | (ab & c)};
}

template <class Draw>
void bitsliced_phase(const PackedCouplings& pc, std::uint64_t* spins, int phase,
                     const AcceptanceTable& table, Draw&& draw, std::uint64_t lane_mask,
                     VerticalCounter* att, VerticalCounter* acc) {
  const auto& g = pc.geometry();
  const std::size_t lx = g.lx();
  const std::size_t ly = g.ly();
  const std::size_t lz = g.lz();
  const std::size_t plane = g.plane_size();
  const std::uint64_t* jx = pc.words(Axis::x).data();
  const std::uint64_t* jy = pc.words(Axis::y).data();
  const std::uint64_t* jz = pc.words(Axis::z).data();
  const Threshold t4 = table.entry(4, false);
  const Threshold t5 = table.entry(5, false);
  const Threshold t6 = table.entry(6, false);
  // Entries for n_sat <= 3 have dE <= 0 and are always accepted.

  for (std::size_t z = 0; z < lz; ++z) {
    const std::size_t zp = (z + 1 == lz ? 0 : z + 1) * plane;
    const std::size_t zm = (z == 0 ? lz - 1 : z - 1) * plane;
    const std::size_t zo = z * plane;
    for (std::size_t y = 0; y < ly; ++y) {
      const std::size_t yp = (y + 1 == ly ? 0 : y + 1) * lx;
      const std::size_t ym = (y == 0 ? ly - 1 : y - 1) * lx;
      const std::size_t yo = y * lx;
      const std::size_t x0 = (y + z + static_cast<std::size_t>(phase)) & 1U;
      for (std::size_t x = x0; x < lx; x += 2) {
        const std::size_t xp = x + 1 == lx ? 0 : x + 1;
        const std::size_t xm = x == 0 ? lx - 1 : x - 1;
        const std::size_t i = x + yo + zo;
        const std::uint64_t s = spins[i];

        const std::uint64_t u0 = s ^ spins[xp + yo + zo] ^ jx[i];
        const std::uint64_t u1 = s ^ spins[x + yp + zo] ^ jy[i];
        const std::uint64_t u2 = s ^ spins[x + yo + zp] ^ jz[i];
        const std::uint64_t u3 = s ^ spins[xm + yo + zo] ^ jx[xm + yo + zo];
        const std::uint64_t u4 = s ^ spins[x + ym + zo] ^ jy[x + ym + zo];
        const std::uint64_t u5 = s ^ spins[x + yo + zm] ^ jz[x + yo + zm];

        // n_sat = b0 + 2*b1 + 4*b2 per lane.
        const FullAdder f0 = full_add(u0, u1, u2);
        const FullAdder f1 = full_add(u3, u4, u5);
        const std::uint64_t b0 = f0.sum ^ f1.sum;
        const FullAdder f2 = full_add(f0.carry, f1.carry, f0.sum & f1.sum);
        const std::uint64_t b1 = f2.sum;
        const std::uint64_t b2 = f2.carry;

        const std::uint64_t eq4 = b2 & ~b1 & ~b0;
        const std::uint64_t eq5 = b2 & ~b1 & b0;
        const std::uint64_t eq6 = b2 & b1 & ~b0;
        const std::uint64_t le3 = ~b2;

        const std::uint32_t r = draw(i, phase);
        const std::uint64_t a4 = t4.accepts(r) ? ~std::uint64_t{0} : 0;
        const std::uint64_t a5 = t5.accepts(r) ? ~std::uint64_t{0} : 0;
        const std::uint64_t a6 = t6.accepts(r) ? ~std::uint64_t{0} : 0;
        const std::uint64_t flip = (le3 | (eq4 & a4) | (eq5 & a5) | (eq6 & a6)) & lane_mask;
        spins[i] = s ^ flip;

        if (att != nullptr) {
          const std::uint64_t nb0 = ~b0 & lane_mask;
          const std::uint64_t nb1 = ~b1;
          const std::uint64_t nb2 = ~b2;
          const std::uint64_t eq[7] = {nb0 & nb1 & nb2, b0 & nb1 & nb2, nb0 & b1 & nb2,
                                       b0 & b1 & nb2,   eq4,           eq5,
                                       eq6};
          for (int n = 0; n < 7; ++n) {
            const std::uint64_t m = eq[n] & lane_mask;
            att[n].add(m);
            acc[n].add(m & flip);
          }
        }
      }
    }
  }
}

}  // namespace

void metropolis_sweep_bitsliced(const PackedCouplings& couplings, SpinConfiguration& config,
                                const AcceptanceTable& table, SweepRandom rng,
                                LaneFlipStats* stats) {
  if (!(couplings.geometry() == config.geometry())) {
    throw InvalidArgument("configuration geometry does not match packed couplings");
  }
  if (couplings.width() != config.width()) {
    throw InvalidArgument("configuration width does not match packed couplings");
  }
  if (!table.field().is_zero()) {
    throw InvalidArgument("bit-sliced engine supports h = 0 only");
  }
  const std::uint64_t mask = config.lane_mask();
  std::uint64_t* spins = config.words().data();
  VerticalCounter att[7];
  VerticalCounter acc[7];
  const bool counting = stats != nullptr;
  detail::with_draw(rng, [&](auto draw) {
    for (int phase = 0; phase < 2; ++phase) {
      bitsliced_phase(couplings, spins, phase, table, draw, mask,
                      counting ? att : nullptr, counting ? acc : nullptr);
      if (counting) {
        for (std::size_t n = 0; n < 7; ++n) {
          att[n].flush(stats->attempts[n]);
          acc[n].flush(stats->accepts[n]);
        }
      }
    }
  });
}

}  // namespace eamc
