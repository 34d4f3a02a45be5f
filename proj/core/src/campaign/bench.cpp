#include "eamc/campaign/bench.hpp"

#include <chrono>
#include <iomanip>
#include <optional>
#include <ostream>

#include "eamc/bitsliced.hpp"
#include "eamc/campaign/config.hpp"
#include "eamc/error.hpp"
#include "eamc/mixing.hpp"

namespace eamc::campaign {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

BenchReport run_bench(const BenchSpec& spec) {
  if (!(spec.seconds > 0.0) || spec.warmup_seconds < 0.0) {
    throw InvalidArgument("bench duration must be positive");
  }
  if (spec.engine != EngineKind::bitsliced && spec.width != 1) {
    throw InvalidArgument("scalar engines run a single lane (width 1)");
  }
  if (spec.width < 1 || spec.width > 64) throw InvalidArgument("width must be in [1, 64]");

  const LatticeGeometry geometry(spec.side);
  std::vector<Sample> samples;
  for (std::size_t w = 0; w < spec.width; ++w) {
    samples.push_back(Sample::generate(geometry, w, derive_seed(spec.seed, SeedTag::couplings, w)));
  }
  SpinConfiguration config = SpinConfiguration::random(
      geometry, spec.width, derive_seed(spec.seed, SeedTag::initial_spins, 0));
  ParisiRapuano rng(derive_seed(spec.seed, SeedTag::chain_stream, 0));
  const AcceptanceTable metro(1.0 / spec.temperature);
  const HeatBathTable heat(1.0 / spec.temperature);
  std::optional<PackedCouplings> packed;
  if (spec.engine == EngineKind::bitsliced) packed.emplace(PackedCouplings::pack(samples));

  const auto sweep = [&] {
    const SweepRandom r = SweepRandom::sequential(rng);
    switch (spec.engine) {
      case EngineKind::bitsliced: metropolis_sweep_bitsliced(*packed, config, metro, r); break;
      case EngineKind::metropolis: metropolis_sweep_scalar(samples[0], config, metro, r); break;
      case EngineKind::heatbath: heatbath_sweep_scalar(samples[0], config, heat, r); break;
    }
  };

  // Warmup: at least one sweep, also used to estimate the sweep rate.
  const auto warm_start = Clock::now();
  std::uint64_t warm = 0;
  do {
    sweep();
    ++warm;
  } while (seconds_since(warm_start) < spec.warmup_seconds);
  const double per_sweep = seconds_since(warm_start) / static_cast<double>(warm);
  if (spec.seconds < 10.0 * per_sweep) {
    throw InvalidArgument("bench duration " + std::to_string(spec.seconds) +
                          " s is too short for 10 sweeps (about " +
                          std::to_string(per_sweep) + " s per sweep)");
  }

  const auto start = Clock::now();
  std::uint64_t sweeps = 0;
  double elapsed = 0.0;
  do {
    sweep();
    ++sweeps;
    elapsed = seconds_since(start);
  } while (elapsed < spec.seconds || sweeps < 10);

  BenchReport report;
  report.spec = spec;
  report.throughput = perf::measure_throughput(elapsed, sweeps, geometry.size(), spec.width);
  report.comparable_to_reference = spec.side == reference_side;
  return report;
}

void write_bench_report(std::ostream& out, const BenchReport& r) {
  const auto& t = r.throughput;
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::fixed << std::setprecision(3);
  out << "engine: " << to_string(r.spec.engine) << "\n";
  out << "lattice: " << r.spec.side << "^3, lanes W = " << r.spec.width << "\n";
  out << "timed sweeps: " << t.sweeps << " in " << t.wall_seconds << " s\n";
  out << "SUT: " << t.sut_ps() << " ps/flip\n";
  out << "GUT: " << t.gut_ps() << " ps/flip\n";
  out << "comparable to reference table (64^3): " << (r.comparable_to_reference ? "yes" : "no")
      << "\n";
  out << "reference systems (64^3 lattice):\n";
  out << "  " << std::left << std::setw(28) << "system" << std::right << std::setw(6) << "year"
      << std::setw(12) << "SUT ps" << std::setw(10) << "watts" << std::setw(12) << "nJ/flip"
      << "\n";
  for (const auto& ref : perf::reference_systems()) {
    out << "  " << std::left << std::setw(28) << ref.name << std::right << std::setw(6)
        << ref.year << std::setw(12) << ref.sut_ps << std::setw(10) << ref.watts << std::setw(12)
        << ref.energy_nj << "\n";
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace eamc::campaign
