#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eamc/acceptance.hpp"
#include "eamc/prng.hpp"
#include "eamc/sample.hpp"
#include "eamc/spin_config.hpp"

namespace eamc {

enum class RngMode : std::uint8_t { parisi_rapuano = 0, site_keyed = 1 };
enum class EngineKind : std::uint8_t { metropolis = 0, heatbath = 1, bitsliced = 2 };

/// Sites visited in one sweep: every parity-0 site in lexicographic order,
/// then every parity-1 site. A sweep is one Monte Carlo step.
struct SweepPlan {
  RngMode rng = RngMode::parisi_rapuano;
  EngineKind engine = EngineKind::metropolis;

  static std::vector<std::size_t> visit_order(const LatticeGeometry& geometry);
};

struct FlipBin {
  std::uint64_t attempts = 0;
  std::uint64_t accepts = 0;
  bool operator==(const FlipBin&) const = default;
};

/// Per-key attempt/accept counters of a Metropolis run plus the accumulated
/// energy change (x4, exact).
struct FlipStats {
  std::array<FlipBin, AcceptanceTable::key_count> bins{};
  std::int64_t energy_change_quarters = 0;

  void merge(const FlipStats& other) noexcept;
  std::uint64_t attempts() const noexcept;
  std::uint64_t accepts() const noexcept;
  bool operator==(const FlipStats&) const = default;
};

/// Source of the one random number each site update consumes: either the
/// next value of a Parisi-Rapuano stream (visiting order) or the site-keyed
/// value for (site, sweep, phase).
class SweepRandom {
 public:
  static SweepRandom sequential(ParisiRapuano& generator) noexcept {
    SweepRandom r;
    r.generator_ = &generator;
    return r;
  }
  static SweepRandom keyed(const SiteKeyedStream& stream, std::uint64_t sweep) noexcept {
    SweepRandom r;
    r.stream_ = stream;
    r.sweep_ = sweep;
    return r;
  }

  bool is_sequential() const noexcept { return generator_ != nullptr; }
  ParisiRapuano* generator() const noexcept { return generator_; }
  const SiteKeyedStream& stream() const noexcept { return stream_; }
  std::uint64_t sweep() const noexcept { return sweep_; }

 private:
  SweepRandom() = default;

  ParisiRapuano* generator_ = nullptr;
  SiteKeyedStream stream_;
  std::uint64_t sweep_ = 0;
};

/// One checkerboard Metropolis sweep of a W=1 configuration. Sites with
/// dE <= 0 flip unconditionally but still consume their random number.
FlipStats metropolis_sweep_scalar(const Sample& sample, SpinConfiguration& config,
                                  const AcceptanceTable& table, SweepRandom rng);

/// As above, but rejects a table built for a different beta than the caller
/// declares.
FlipStats metropolis_sweep_scalar(const Sample& sample, SpinConfiguration& config,
                                  const AcceptanceTable& table, SweepRandom rng,
                                  double declared_beta);

/// One checkerboard heat-bath sweep; returns the energy change x4.
std::int64_t heatbath_sweep_scalar(const Sample& sample, SpinConfiguration& config,
                                   const HeatBathTable& table, SweepRandom rng);

/// CSV rows "beta,delta_e,attempts,accepts" for every reachable key.
void write_flip_stats_csv(std::ostream& out, const AcceptanceTable& table,
                          const FlipStats& stats, bool header);

}  // namespace eamc
