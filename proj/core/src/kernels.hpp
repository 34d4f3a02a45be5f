#pragma once

// Site-update kernels shared by the monolithic and slab-partitioned sweeps.
// Spins live in planes of Lx*Ly words; `planes(z)` must return the plane for
// z in [z_begin-1, z_end], where the caller resolves periodic wrap or ghost
// planes.

#include <cstdint>

#include "eamc/acceptance.hpp"
#include "eamc/prng.hpp"
#include "eamc/sample.hpp"
#include "eamc/sweep.hpp"

namespace eamc::detail {

struct SequentialDraw {
  ParisiRapuano* generator;
  std::uint32_t operator()(std::size_t, int) const noexcept { return generator->next(); }
};

struct KeyedDraw {
  SiteKeyedStream stream;
  std::uint64_t sweep;
  std::uint32_t operator()(std::size_t site, int phase) const noexcept {
    return stream(site, sweep, phase);
  }
};

template <class F>
decltype(auto) with_draw(const SweepRandom& rng, F&& f) {
  if (rng.is_sequential()) return f(SequentialDraw{rng.generator()});
  return f(KeyedDraw{rng.stream(), rng.sweep()});
}

/// Neighbour data gathered for one site.
struct SiteContext {
  int spin;
  int nb[6];     // +x, +y, +z, -x, -y, -z neighbour spin bits
  int bond[6];   // coupling bits of the six bonds
  int field_bit;
  std::size_t site;
};

template <class Planes, class Visit>
void for_each_site(const Sample& sample, Planes&& planes, std::size_t z_begin,
                   std::size_t z_end, int phase, Visit&& visit) {
  const auto& g = sample.geometry();
  const std::size_t lx = g.lx();
  const std::size_t ly = g.ly();
  const std::size_t lz = g.lz();
  const std::size_t plane = g.plane_size();
  const auto bits = sample.site_bits();
  for (std::size_t z = z_begin; z < z_end; ++z) {
    std::uint64_t* cur = planes(static_cast<std::ptrdiff_t>(z));
    const std::uint64_t* up = planes(static_cast<std::ptrdiff_t>(z) + 1);
    const std::uint64_t* dn = planes(static_cast<std::ptrdiff_t>(z) - 1);
    const std::size_t zm = z == 0 ? lz - 1 : z - 1;
    for (std::size_t y = 0; y < ly; ++y) {
      const std::size_t yp = y + 1 == ly ? 0 : y + 1;
      const std::size_t ym = y == 0 ? ly - 1 : y - 1;
      const std::size_t x0 = (y + z + static_cast<std::size_t>(phase)) & 1U;
      for (std::size_t x = x0; x < lx; x += 2) {
        const std::size_t xp = x + 1 == lx ? 0 : x + 1;
        const std::size_t xm = x == 0 ? lx - 1 : x - 1;
        const std::size_t xy = x + lx * y;
        const std::size_t site = xy + plane * z;
        const std::uint8_t b = bits[site];
        SiteContext c;
        c.site = site;
        c.spin = static_cast<int>(cur[xy] & 1U);
        c.nb[0] = static_cast<int>(cur[xp + lx * y] & 1U);
        c.nb[1] = static_cast<int>(cur[x + lx * yp] & 1U);
        c.nb[2] = static_cast<int>(up[xy] & 1U);
        c.nb[3] = static_cast<int>(cur[xm + lx * y] & 1U);
        c.nb[4] = static_cast<int>(cur[x + lx * ym] & 1U);
        c.nb[5] = static_cast<int>(dn[xy] & 1U);
        c.bond[0] = b & 1;
        c.bond[1] = (b >> 1) & 1;
        c.bond[2] = (b >> 2) & 1;
        c.bond[3] = bits[xm + lx * y + plane * z] & 1;
        c.bond[4] = (bits[x + lx * ym + plane * z] >> 1) & 1;
        c.bond[5] = (bits[xy + plane * zm] >> 2) & 1;
        c.field_bit = (b >> 3) & 1;
        visit(c, cur[xy]);
      }
    }
  }
}

template <class Planes, class Draw>
void metropolis_phase(const Sample& sample, Planes&& planes, std::size_t z_begin,
                      std::size_t z_end, int phase, const AcceptanceTable& table,
                      Draw&& draw, FlipStats& stats) {
  const bool field = sample.has_field();
  for_each_site(sample, planes, z_begin, z_end, phase,
                [&](const SiteContext& c, std::uint64_t& word) {
                  int n_sat = 0;
                  for (int k = 0; k < 6; ++k) n_sat += c.spin ^ c.nb[k] ^ c.bond[k];
                  const bool aligned = field && c.field_bit == c.spin;
                  const int key = AcceptanceTable::key(n_sat, aligned);
                  const std::uint32_t r = draw(c.site, phase);
                  auto& bin = stats.bins[static_cast<std::size_t>(key)];
                  ++bin.attempts;
                  if (table.entry(key).accepts(r)) {
                    ++bin.accepts;
                    word ^= 1U;
                    stats.energy_change_quarters += table.delta_e_quarters(key);
                  }
                });
}

template <class Planes, class Draw>
std::int64_t heatbath_phase(const Sample& sample, Planes&& planes, std::size_t z_begin,
                            std::size_t z_end, int phase, const HeatBathTable& table,
                            Draw&& draw) {
  const bool field = sample.has_field();
  const std::int64_t hq = sample.field().quarters();
  std::int64_t change = 0;
  for_each_site(sample, planes, z_begin, z_end, phase,
                [&](const SiteContext& c, std::uint64_t& word) {
                  int m = 0;
                  for (int k = 0; k < 6; ++k) m += 1 - (c.nb[k] ^ c.bond[k]);
                  const int fb = field ? c.field_bit : 0;
                  const std::uint32_t r = draw(c.site, phase);
                  const int next = table.entry(HeatBathTable::key(m, fb)).accepts(r) ? 1 : 0;
                  if (next != c.spin) {
                    const int n_sat = c.spin ? m : 6 - m;
                    std::int64_t dq = 4 * (4 * n_sat - 12);
                    if (field) dq += (c.field_bit == c.spin) ? 2 * hq : -2 * hq;
                    change += dq;
                    word ^= 1U;
                  }
                });
  return change;
}

}  // namespace eamc::detail
