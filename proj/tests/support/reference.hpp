#pragma once

// Straight-line reference implementations used as test oracles. They work on
// plain +/-1 arrays and explicit coordinates and share no code with the
// library beyond its public types.

#include <cmath>
#include <cstdint>
#include <vector>

#include "eamc/sample.hpp"
#include "eamc/spin_config.hpp"

namespace ref {

struct Lattice {
  std::size_t lx, ly, lz;
  std::size_t n() const { return lx * ly * lz; }
  std::size_t idx(std::size_t x, std::size_t y, std::size_t z) const {
    return (x % lx) + lx * ((y % ly) + ly * (z % lz));
  }
};

inline Lattice lattice_of(const eamc::Sample& s) {
  return {s.geometry().lx(), s.geometry().ly(), s.geometry().lz()};
}

// J as +/-1 per site and axis (the +axis bond of that site).
inline std::vector<int> couplings(const eamc::Sample& s) {
  std::vector<int> j(3 * s.geometry().size());
  for (std::size_t i = 0; i < s.geometry().size(); ++i) {
    const auto bits = s.site_bits(i);
    for (int a = 0; a < 3; ++a) j[3 * i + a] = ((bits >> a) & 1) ? 1 : -1;
  }
  return j;
}

inline std::vector<int> fields(const eamc::Sample& s) {
  std::vector<int> h(s.geometry().size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = ((s.site_bits(i) >> 3) & 1) ? 1 : -1;
  return h;
}

inline std::vector<int> spins(const eamc::SpinConfiguration& c, std::size_t lane = 0) {
  std::vector<int> s(c.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = ((c.words()[i] >> lane) & 1U) ? 1 : -1;
  return s;
}

// H = -sum_{x,y,z} sum_a J S S_{+a} - h sum_i h_i S_i, triple loop.
inline double energy(const Lattice& L, const std::vector<int>& j, const std::vector<int>& hsign,
                     double h, const std::vector<int>& s) {
  double e = 0.0;
  for (std::size_t z = 0; z < L.lz; ++z) {
    for (std::size_t y = 0; y < L.ly; ++y) {
      for (std::size_t x = 0; x < L.lx; ++x) {
        const std::size_t i = L.idx(x, y, z);
        e -= j[3 * i + 0] * s[i] * s[L.idx(x + 1, y, z)];
        e -= j[3 * i + 1] * s[i] * s[L.idx(x, y + 1, z)];
        e -= j[3 * i + 2] * s[i] * s[L.idx(x, y, z + 1)];
        e -= h * hsign[i] * s[i];
      }
    }
  }
  return e;
}

inline double energy(const eamc::Sample& sample, const eamc::SpinConfiguration& c,
                     std::size_t lane = 0) {
  return energy(lattice_of(sample), couplings(sample), fields(sample), sample.field().value(),
                spins(c, lane));
}

// Local field sum_j J_ij S_j over the six bonds of site (x, y, z).
inline int local_sum(const Lattice& L, const std::vector<int>& j, const std::vector<int>& s,
                     std::size_t x, std::size_t y, std::size_t z) {
  const std::size_t i = L.idx(x, y, z);
  const std::size_t xm = L.idx(x + L.lx - 1, y, z);
  const std::size_t ym = L.idx(x, y + L.ly - 1, z);
  const std::size_t zm = L.idx(x, y, z + L.lz - 1);
  return j[3 * i + 0] * s[L.idx(x + 1, y, z)] + j[3 * i + 1] * s[L.idx(x, y + 1, z)] +
         j[3 * i + 2] * s[L.idx(x, y, z + 1)] + j[3 * xm + 0] * s[xm] + j[3 * ym + 1] * s[ym] +
         j[3 * zm + 2] * s[zm];
}

// Parisi-Rapuano written against the recurrence on an unbounded history:
// x[n] = x[n-24] + x[n-55] (mod 2^32), output x[n] ^ x[n-61].
class LaggedFibonacci {
 public:
  explicit LaggedFibonacci(std::uint64_t seed) {
    std::uint64_t state = seed;
    for (int k = 0; k < 62; ++k) {
      state += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = state;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      z ^= z >> 31;
      history_.push_back(static_cast<std::uint32_t>(z));
    }
  }
  std::uint32_t next() {
    const std::size_t n = history_.size();
    const std::uint32_t x = history_[n - 24] + history_[n - 55];
    const std::uint32_t out = x ^ history_[n - 61];
    history_.push_back(x);
    return out;
  }

 private:
  std::vector<std::uint32_t> history_;
};

// C4(r) straight from the definition: average over sites and the three axes
// of q_i q_{i + r e_a}, for r = 0 .. min(L)/2.
inline std::vector<double> c4(const Lattice& L, const std::vector<int>& q) {
  const std::size_t lmin = std::min({L.lx, L.ly, L.lz});
  std::vector<double> out;
  for (std::size_t r = 0; r <= lmin / 2; ++r) {
    long double acc = 0.0L;
    for (std::size_t z = 0; z < L.lz; ++z)
      for (std::size_t y = 0; y < L.ly; ++y)
        for (std::size_t x = 0; x < L.lx; ++x) {
          const int qi = q[L.idx(x, y, z)];
          acc += qi * q[L.idx(x + r, y, z)];
          acc += qi * q[L.idx(x, y + r, z)];
          acc += qi * q[L.idx(x, y, z + r)];
        }
    out.push_back(static_cast<double>(acc / (3.0L * static_cast<long double>(L.n()))));
  }
  return out;
}

inline double xi(const std::vector<double>& c) {
  long double num = 0.0L, den = 0.0L;
  for (std::size_t r = 1; r < c.size(); ++r) {
    const long double v = c[r] > 0.0 ? c[r] : 0.0;
    num += static_cast<long double>(r) * v;
    den += v;
  }
  return den > 0.0L ? static_cast<double>(num / den) : 0.0;
}

}  // namespace ref
