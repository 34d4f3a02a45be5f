#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "eamc/sample.hpp"

namespace eamc {

/// A general Ising system for exact enumeration: H = -sum J S_i S_j - sum h_i S_i.
/// State bit k set means spin k is up.
struct BondGraph {
  struct Bond {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double coupling = 0.0;
  };

  std::size_t spins = 0;
  std::vector<Bond> bonds;
  std::vector<double> field;  // empty or one entry per spin

  /// The 3N bonds of a lattice sample (doubled bonds kept) and its fields.
  static BondGraph from_sample(const Sample& sample);
  double energy(std::uint64_t state) const;
};

inline constexpr std::size_t max_enumeration_spins = 24;
inline constexpr std::size_t max_overlap_spins = 12;

/// Exact thermal averages at one temperature.
struct ExactThermo {
  double temperature = 0.0;
  double mean_energy = 0.0;
  double mean_energy_sq = 0.0;
  double mean_magnetization = 0.0;      // <(1/N) sum S_i>
  double mean_abs_magnetization = 0.0;  // <|(1/N) sum S_i|>
  double log_partition = 0.0;

  double energy_variance() const noexcept { return mean_energy_sq - mean_energy * mean_energy; }
};

/// Sums over all 2^N states; N must not exceed max_enumeration_spins.
std::vector<ExactThermo> exact_enumeration(const BondGraph& graph, std::span<const double> temperatures);
std::vector<ExactThermo> exact_enumeration(const Sample& sample, std::span<const double> temperatures);

/// <f(state)> under the Boltzmann weight at temperature T.
double exact_expectation(const BondGraph& graph, double temperature,
                         const std::function<double(std::uint64_t)>& observable);

/// Distribution of Q = sum_i q_i over independent replica pairs; entry
/// Q + N for Q in [-N, N] (2N+1 bins, odd-offset bins stay zero). N must not
/// exceed max_overlap_spins.
std::vector<double> exact_overlap_distribution(const BondGraph& graph, double temperature);

}  // namespace eamc
