#pragma once

#include <cstddef>
#include <cstdint>

#include "eamc/sample.hpp"
#include "eamc/spin_config.hpp"

namespace eamc {

/// H = -sum_bonds J_ij S_i S_j - sum_i h_i S_i in units of J, for one lane.
/// Each of the 3N stored bonds is counted once.
double energy(const Sample& sample, const SpinConfiguration& config, std::size_t lane = 0);

/// Same as energy() scaled by 4. Always an exact integer because h is a
/// multiple of 1/4.
std::int64_t energy_quarters(const Sample& sample, const SpinConfiguration& config,
                             std::size_t lane = 0);

struct LocalDelta {
  int n_sat = 0;         // neighbours with sigma_i ^ sigma_j ^ j_ij == 1
  double delta_e = 0.0;  // energy change if site i is flipped
};

/// Energy change of flipping `site`: 4*n_sat - 12 + 2*h_i*S_i.
LocalDelta local_delta_e(const Sample& sample, const SpinConfiguration& config,
                         std::size_t site, std::size_t lane = 0);

/// Throws InvalidArgument unless sample and configuration share a geometry.
void require_same_geometry(const Sample& sample, const SpinConfiguration& config);

}  // namespace eamc
