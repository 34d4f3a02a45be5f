#include "eamc/engine.hpp"

#include <cmath>
#include <limits>

#include "eamc/binary_io.hpp"
#include "eamc/error.hpp"

namespace eamc {

double inverse_temperature(double temperature) {
  if (std::isnan(temperature) || temperature < 0.0) {
    throw InvalidArgument("temperature must be >= 0");
  }
  if (temperature == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / temperature;
}

ChainRng ChainRng::parisi_rapuano(std::uint64_t seed, std::size_t slabs) {
  ChainRng r;
  r.mode = RngMode::parisi_rapuano;
  r.streams = slabs == 1 ? std::vector<ParisiRapuano>{ParisiRapuano(seed)}
                         : slab_streams(seed, slabs);
  return r;
}

ChainRng ChainRng::site_keyed(std::uint64_t seed) {
  ChainRng r;
  r.mode = RngMode::site_keyed;
  r.keyed = SiteKeyedStream(seed);
  return r;
}

void ChainRng::write(std::ostream& out) const {
  BinaryWriter w(out);
  w.u8(static_cast<std::uint8_t>(mode));
  w.u64(keyed.seed());
  w.u32(static_cast<std::uint32_t>(streams.size()));
  for (const auto& s : streams) s.write(out);
}

ChainRng ChainRng::read(std::istream& in) {
  BinaryReader r(in);
  ChainRng c;
  const auto mode = r.u8();
  if (mode > 1) throw Error("invalid RNG mode in stream");
  c.mode = static_cast<RngMode>(mode);
  c.keyed = SiteKeyedStream(r.u64());
  const auto n = r.u32();
  if (n > 4096) throw Error("implausible generator count in stream");
  for (std::uint32_t i = 0; i < n; ++i) c.streams.push_back(ParisiRapuano::read(in));
  return c;
}

SlotTables::SlotTables(double t, FieldStrength field)
    : temperature(t),
      metropolis(inverse_temperature(t), field),
      heatbath(inverse_temperature(t), field) {}

std::int64_t advance_chain(const Sample& sample, SpinConfiguration& config, ChainRng& rng,
                           std::uint64_t first_sweep, std::uint64_t sweeps,
                           const SlotTables& tables, const EngineSpec& engine,
                           FlipStats* stats) {
  if (rng.mode == RngMode::parisi_rapuano && rng.streams.size() != engine.partitions) {
    throw InvalidArgument("chain generator count does not match partition count");
  }
  std::int64_t change = 0;
  switch (engine.kind) {
    case EngineKind::metropolis: {
      FlipStats local;
      if (engine.partitions > 1) {
        const SlabLayout layout = SlabLayout::make(sample.geometry(), engine.partitions);
        const PartitionRandom pr = rng.mode == RngMode::site_keyed
                                       ? PartitionRandom::site_keyed(rng.keyed)
                                       : PartitionRandom::per_slab(rng.streams);
        local = partitioned_sweeps(sample, config, layout, tables.metropolis, pr, first_sweep,
                                   sweeps)
                    .stats;
      } else {
        for (std::uint64_t n = 0; n < sweeps; ++n) {
          const SweepRandom sr = rng.mode == RngMode::site_keyed
                                     ? SweepRandom::keyed(rng.keyed, first_sweep + n)
                                     : SweepRandom::sequential(rng.streams.front());
          local.merge(metropolis_sweep_scalar(sample, config, tables.metropolis, sr));
        }
      }
      change = local.energy_change_quarters;
      if (stats != nullptr) stats->merge(local);
      break;
    }
    case EngineKind::heatbath: {
      if (engine.partitions != 1) throw InvalidArgument("heat-bath runs are not partitioned");
      for (std::uint64_t n = 0; n < sweeps; ++n) {
        const SweepRandom sr = rng.mode == RngMode::site_keyed
                                   ? SweepRandom::keyed(rng.keyed, first_sweep + n)
                                   : SweepRandom::sequential(rng.streams.front());
        change += heatbath_sweep_scalar(sample, config, tables.heatbath, sr);
      }
      break;
    }
    case EngineKind::bitsliced:
      throw InvalidArgument("bit-sliced engine works on packed samples, not scalar chains");
  }
  return change;
}

}  // namespace eamc
