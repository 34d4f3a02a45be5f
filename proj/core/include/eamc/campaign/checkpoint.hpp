#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eamc/bitsliced.hpp"
#include "eamc/campaign/config.hpp"
#include "eamc/engine.hpp"
#include "eamc/tempering.hpp"

namespace eamc::campaign {

/// Scalar-engine state of one sample: two independent replica sets (the
/// overlap needs two real replicas per temperature), their swap generators
/// and per-slot flip statistics.
struct SampleState {
  std::vector<ReplicaSet> sets;
  std::vector<ParisiRapuano> swap_rngs;
  std::vector<FlipStats> slot_stats;

  bool operator==(const SampleState&) const = default;
};

/// Bit-sliced state: all samples share two W-wide configurations.
struct PackedState {
  std::vector<SpinConfiguration> configs;
  std::vector<ChainRng> rngs;
  LaneFlipStats stats;

  bool operator==(const PackedState& o) const {
    return configs == o.configs && rngs == o.rngs && stats.attempts == o.stats.attempts &&
           stats.accepts == o.stats.accepts;
  }
};

/// Byte lengths of the append-only output files at checkpoint time. Resume
/// truncates each file back to these lengths.
struct OutputOffsets {
  std::uint64_t measurements = 0;
  std::uint64_t c4 = 0;
  std::uint64_t trace = 0;
  bool operator==(const OutputOffsets&) const = default;
};

struct Checkpoint {
  static constexpr std::uint32_t version = 1;

  std::string config_text;
  std::uint64_t config_hash = 0;
  std::uint64_t sweep = 0;
  std::vector<double> temperatures;  // resolved (possibly tuned) ladder
  OutputOffsets offsets;
  std::vector<SampleState> samples;
  std::optional<PackedState> packed;
};

struct CheckpointHeader {
  std::uint32_t version = 0;
  std::uint64_t config_hash = 0;
  std::uint64_t sweep = 0;
  std::vector<double> temperatures;
  OutputOffsets offsets;
  std::string config_text;
};

/// Samples of a campaign, regenerated deterministically from the config.
std::vector<Sample> make_samples(const CampaignConfig& config);

/// Writes to `path + ".tmp"` then renames over `path`, so a crash leaves the
/// previous checkpoint intact.
void write_checkpoint(const std::string& path, const Checkpoint& checkpoint);

CheckpointHeader read_checkpoint_header(const std::string& path);

/// Full restore. Throws Error on a bad magic, version or hash mismatch.
Checkpoint read_checkpoint(const std::string& path, const std::vector<Sample>& samples);

}  // namespace eamc::campaign
