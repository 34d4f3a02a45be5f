#include "eamc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "eamc/error.hpp"

namespace eamc {

namespace {

void require_pair(const SpinConfiguration& a, const SpinConfiguration& b, std::size_t lane) {
  if (!(a.geometry() == b.geometry())) throw InvalidArgument("configurations differ in geometry");
  if (lane >= a.width() || lane >= b.width()) throw InvalidArgument("lane out of range");
}

}  // namespace

double overlap(const SpinConfiguration& a, const SpinConfiguration& b, std::size_t lane) {
  require_pair(a, b, lane);
  std::int64_t sum = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    sum += (((wa[i] ^ wb[i]) >> lane) & 1U) ? -1 : 1;
  }
  return static_cast<double>(sum) / static_cast<double>(wa.size());
}

std::vector<std::int8_t> overlap_field(const SpinConfiguration& a, const SpinConfiguration& b,
                                       std::size_t lane) {
  require_pair(a, b, lane);
  std::vector<std::int8_t> q(a.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = (((a.words()[i] ^ b.words()[i]) >> lane) & 1U) ? -1 : 1;
  }
  return q;
}

double xi_estimate(std::span<const double> c4) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t r = 1; r < c4.size(); ++r) {
    const double c = std::max(c4[r], 0.0);
    num += static_cast<double>(r) * c;
    den += c;
  }
  return den > 0.0 ? num / den : 0.0;
}

CorrelationProfile correlation_from_field(const LatticeGeometry& g, std::span<const std::int8_t> q) {
  if (q.size() != g.size()) throw InvalidArgument("overlap field has wrong size");
  const std::size_t r_max = std::min({g.lx(), g.ly(), g.lz()}) / 2;
  CorrelationProfile p;
  p.c4.assign(r_max + 1, 0.0);
  const std::size_t lx = g.lx();
  const std::size_t ly = g.ly();
  const std::size_t lz = g.lz();
  for (std::size_t r = 0; r <= r_max; ++r) {
    std::int64_t sum = 0;
    for (std::size_t z = 0; z < lz; ++z) {
      const std::size_t zr = (z + r) % lz;
      for (std::size_t y = 0; y < ly; ++y) {
        const std::size_t yr = (y + r) % ly;
        for (std::size_t x = 0; x < lx; ++x) {
          const std::size_t xr = (x + r) % lx;
          const int qi = q[g.index(x, y, z)];
          sum += qi * (q[g.index(xr, y, z)] + q[g.index(x, yr, z)] + q[g.index(x, y, zr)]);
        }
      }
    }
    p.c4[r] = static_cast<double>(sum) / (3.0 * static_cast<double>(g.size()));
  }
  p.xi = xi_estimate(p.c4);
  return p;
}

CorrelationProfile correlation_and_xi(const SpinConfiguration& a, const SpinConfiguration& b,
                                      std::size_t lane, std::uint64_t t) {
  const auto q = overlap_field(a, b, lane);
  CorrelationProfile p = correlation_from_field(a.geometry(), q);
  p.t = t;
  return p;
}

void write_c4_csv(std::ostream& out, const CorrelationProfile& profile, std::uint64_t sample_id,
                  double temperature, bool header) {
  if (header) out << "sample_id,T,t,r,c4\n";
  for (std::size_t r = 0; r < profile.c4.size(); ++r) {
    out << sample_id << ',' << temperature << ',' << profile.t << ',' << r << ','
        << profile.c4[r] << '\n';
  }
}

Guard guard_nonequilibrium(double xi, std::size_t side) {
  if (std::isnan(xi) || xi < 0.0) throw InvalidArgument("coherence length must be >= 0");
  return 7.0 * xi > static_cast<double>(side) ? Guard::warning : Guard::ok;
}

const char* to_string(Guard g) noexcept { return g == Guard::ok ? "ok" : "warning"; }

double predicted_dynamic_exponent(double temperature) {
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be > 0");
  return dynamic_exponent_at_tc * critical_temperature / temperature;
}

XiFit xi_growth_fit(std::span<const XiPoint> series, double temperature) {
  if (series.size() < 10) {
    throw InvalidArgument("xi growth fit needs at least 10 points, got " +
                          std::to_string(series.size()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : series) {
    if (p.guard != Guard::ok) {
      throw InvalidArgument("xi growth fit refused: series contains guard warnings");
    }
    if (!(p.t > 0.0) || !(p.xi > 0.0)) {
      throw InvalidArgument("xi growth fit needs positive t and xi");
    }
    const double x = std::log(p.t);
    const double y = std::log(p.xi);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const auto n = static_cast<double>(series.size());
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw InvalidArgument("xi growth fit needs distinct times");
  XiFit f;
  f.inverse_z = (n * sxy - sx * sy) / denom;
  f.log_amplitude = (sy - f.inverse_z * sx) / n;
  f.z = f.inverse_z != 0.0 ? 1.0 / f.inverse_z : std::numeric_limits<double>::infinity();
  f.predicted_z = predicted_dynamic_exponent(temperature);
  f.points = series.size();
  return f;
}

}  // namespace eamc
