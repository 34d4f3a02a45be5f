#include "eamc/energy.hpp"

#include <string>

#include "eamc/error.hpp"

namespace eamc {

void require_same_geometry(const Sample& sample, const SpinConfiguration& config) {
  if (!(sample.geometry() == config.geometry())) {
    throw InvalidArgument("configuration geometry does not match sample geometry");
  }
}

std::int64_t energy_quarters(const Sample& sample, const SpinConfiguration& config,
                             std::size_t lane) {
  require_same_geometry(sample, config);
  if (lane >= config.width()) throw InvalidArgument("lane out of range");
  const auto& g = sample.geometry();
  std::int64_t bond_sum = 0;  // sum of J_ij S_i S_j
  std::int64_t field_sum = 0; // sum of sign(h_i) S_i
  for (std::size_t s = 0; s < g.size(); ++s) {
    const int si = config.bit(s, lane);
    for (int a = 0; a < 3; ++a) {
      const auto d = static_cast<Direction>(a);
      const int sj = config.bit(g.neighbor(s, d), lane);
      const int satisfied = si ^ sj ^ sample.coupling(s, static_cast<Axis>(a));
      bond_sum += satisfied ? 1 : -1;
    }
    if (sample.has_field()) field_sum += (sample.field_bit(s) == si) ? 1 : -1;
  }
  return -4 * bond_sum - static_cast<std::int64_t>(sample.field().quarters()) * field_sum;
}

double energy(const Sample& sample, const SpinConfiguration& config, std::size_t lane) {
  return static_cast<double>(energy_quarters(sample, config, lane)) / 4.0;
}

LocalDelta local_delta_e(const Sample& sample, const SpinConfiguration& config,
                         std::size_t site, std::size_t lane) {
  require_same_geometry(sample, config);
  const auto& g = sample.geometry();
  if (site >= g.size()) throw InvalidArgument("site index out of range");
  const int si = config.bit(site, lane);
  int n_sat = 0;
  for (int d = 0; d < 6; ++d) {
    const auto dir = static_cast<Direction>(d);
    n_sat += si ^ config.bit(g.neighbor(site, dir), lane) ^ sample.coupling(site, dir);
  }
  LocalDelta out;
  out.n_sat = n_sat;
  out.delta_e = 4.0 * n_sat - 12.0;
  if (sample.has_field()) {
    const double hs = (sample.field_bit(site) == si) ? sample.field().value()
                                                     : -sample.field().value();
    out.delta_e += 2.0 * hs;
  }
  return out;
}

}  // namespace eamc
