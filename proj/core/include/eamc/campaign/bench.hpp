#pragma once

#include <cstdint>
#include <iosfwd>

#include "eamc/perf_model.hpp"
#include "eamc/sweep.hpp"

namespace eamc::campaign {

struct BenchSpec {
  EngineKind engine = EngineKind::bitsliced;
  std::size_t side = 64;
  std::size_t width = 64;  // bit-sliced lanes; scalar engines use 1
  double seconds = 2.0;
  double warmup_seconds = 0.25;
  double temperature = 1.0;
  std::uint64_t seed = 1;
};

struct BenchReport {
  BenchSpec spec;
  perf::ThroughputReport throughput;
  /// The lattice has the 64^3 size used by the published reference rows.
  bool comparable_to_reference = false;
};

/// Side length of the published comparison lattice.
inline constexpr std::size_t reference_side = 64;

/// Timed hot loop. Warmup sweeps are excluded from the measurement; the
/// warmup rate is used to reject durations too short for 10 timed sweeps.
BenchReport run_bench(const BenchSpec& spec);

/// Human-readable report followed by the reference rows.
void write_bench_report(std::ostream& out, const BenchReport& report);

}  // namespace eamc::campaign
