#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eamc/acceptance.hpp"
#include "eamc/partition.hpp"
#include "eamc/prng.hpp"
#include "eamc/sample.hpp"
#include "eamc/spin_config.hpp"
#include "eamc/sweep.hpp"

namespace eamc {

/// Randomness owned by one replica chain. In Parisi-Rapuano mode there is one
/// generator per slab (a single one for unpartitioned runs).
struct ChainRng {
  RngMode mode = RngMode::parisi_rapuano;
  std::vector<ParisiRapuano> streams;
  SiteKeyedStream keyed;

  static ChainRng parisi_rapuano(std::uint64_t seed, std::size_t slabs = 1);
  static ChainRng site_keyed(std::uint64_t seed);

  void write(std::ostream& out) const;
  static ChainRng read(std::istream& in);
  bool operator==(const ChainRng&) const = default;
};

/// Prebuilt tables for one temperature.
struct SlotTables {
  SlotTables(double temperature, FieldStrength field);

  double temperature;
  AcceptanceTable metropolis;
  HeatBathTable heatbath;
};

struct EngineSpec {
  EngineKind kind = EngineKind::metropolis;
  std::size_t partitions = 1;
};

/// Advances one scalar chain by `sweeps` sweeps starting at sweep number
/// `first_sweep`. Returns the energy change x4. Flip statistics are
/// accumulated into `stats` when non-null (Metropolis only).
std::int64_t advance_chain(const Sample& sample, SpinConfiguration& config, ChainRng& rng,
                           std::uint64_t first_sweep, std::uint64_t sweeps,
                           const SlotTables& tables, const EngineSpec& engine,
                           FlipStats* stats = nullptr);

/// Inverse temperature with T = 0 mapped to +infinity.
double inverse_temperature(double temperature);

}  // namespace eamc
