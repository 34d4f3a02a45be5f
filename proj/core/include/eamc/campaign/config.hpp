#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eamc/geometry.hpp"
#include "eamc/sample.hpp"
#include "eamc/sweep.hpp"
#include "eamc/tempering.hpp"

namespace eamc::campaign {

struct TuneSpec {
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t count = 0;
  double target = TemperatureLadder::default_target;
  std::size_t iterations = 30;
  std::uint64_t blocks = 2000;
  bool operator==(const TuneSpec&) const = default;
};

/// Everything needed to reproduce a run. Parsed from a YAML document whose
/// sections are lattice, samples, temperatures, engine, rng, run and oracle;
/// unknown keys are rejected.
struct CampaignConfig {
  // lattice
  std::size_t side = 8;
  std::vector<std::size_t> extents;  // optional [Lx, Ly, Lz], overrides side
  double field = 0.0;
  // samples
  std::size_t samples = 1;
  std::optional<std::uint64_t> coupling_seed;
  // temperatures
  std::vector<double> temperatures{1.0};
  std::optional<TuneSpec> tune;
  std::uint32_t n_pt = TemperatureLadder::default_n_pt;
  // engine
  EngineKind engine = EngineKind::metropolis;
  std::size_t partitions = 1;
  // rng
  RngMode rng_mode = RngMode::parisi_rapuano;
  std::uint64_t seed = 1;
  // run
  std::uint64_t sweeps = 1000;
  std::uint64_t measure_every = 0;  // 0 = logarithmic grid t = 2^k
  std::uint64_t checkpoint_interval = 0;  // 0 = final checkpoint only
  std::string output = "eamc-out";
  std::size_t workers = 1;
  // oracle
  std::uint64_t oracle_sweeps = 1000000;
  std::uint64_t oracle_thermalization = 1000;
  std::size_t oracle_batches = 100;

  LatticeGeometry geometry() const;
  FieldStrength field_strength() const { return FieldStrength::from_value(field); }

  bool operator==(const CampaignConfig&) const = default;
};

/// Parses YAML text; throws ConfigError naming the offending key.
CampaignConfig parse_config(const std::string& text);
CampaignConfig load_config(const std::string& path);
std::string serialize_config(const CampaignConfig& config);

/// Semantic checks (ranges, strict temperature ordering, engine
/// compatibility); throws ConfigError.
void validate(const CampaignConfig& config);

/// FNV-1a over the serialized config with output and workers cleared.
std::uint64_t config_hash(const CampaignConfig& config);

const char* to_string(EngineKind kind) noexcept;
const char* to_string(RngMode mode) noexcept;

}  // namespace eamc::campaign
