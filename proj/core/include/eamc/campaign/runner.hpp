#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "eamc/campaign/config.hpp"

namespace eamc::campaign {

/// Command-line overrides applied on top of a config.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> output;
  /// Stops right after sweep `halt_after` without writing a checkpoint, as a
  /// crash would. Used to exercise resume.
  std::optional<std::uint64_t> halt_after;
};

struct RunSummary {
  std::uint64_t sweeps_done = 0;
  std::uint64_t records = 0;
  bool completed = false;
  std::string output_dir;
  std::vector<double> temperatures;
};

/// File names inside the output directory.
inline constexpr const char* measurements_file = "measurements.jsonl";
inline constexpr const char* c4_file = "c4.csv";
inline constexpr const char* trace_file = "pt_trace.jsonl";
inline constexpr const char* flip_stats_file = "flip_stats.csv";
inline constexpr const char* checkpoint_file = "checkpoint.bin";
inline constexpr const char* config_file = "config.yaml";

CampaignConfig apply_overrides(CampaignConfig config, const RunOptions& options);

/// Runs a campaign from scratch, truncating any previous outputs.
RunSummary run_campaign(const CampaignConfig& config, const RunOptions& options = {});

/// Continues from a checkpoint. When `expected` is given its hash must match
/// the checkpointed config (ConfigError otherwise). Output files are cut back
/// to the lengths recorded in the checkpoint before appending.
RunSummary resume_campaign(const std::string& checkpoint_path, const RunOptions& options = {},
                           const std::optional<CampaignConfig>& expected = std::nullopt);

/// True when a measurement is taken after sweep t (t >= 1).
bool is_measurement_time(std::uint64_t t, std::uint64_t total, std::uint64_t every) noexcept;

}  // namespace eamc::campaign
