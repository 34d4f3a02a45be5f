#include "eamc/sweep.hpp"

#include <ostream>

#include "eamc/energy.hpp"
#include "eamc/error.hpp"
#include "kernels.hpp"

namespace eamc {

std::vector<std::size_t> SweepPlan::visit_order(const LatticeGeometry& geometry) {
  std::vector<std::size_t> order;
  order.reserve(geometry.size());
  for (int phase = 0; phase < 2; ++phase) {
    for (std::size_t s = 0; s < geometry.size(); ++s) {
      if (geometry.parity(s) == phase) order.push_back(s);
    }
  }
  return order;
}

void FlipStats::merge(const FlipStats& other) noexcept {
  for (std::size_t k = 0; k < bins.size(); ++k) {
    bins[k].attempts += other.bins[k].attempts;
    bins[k].accepts += other.bins[k].accepts;
  }
  energy_change_quarters += other.energy_change_quarters;
}

std::uint64_t FlipStats::attempts() const noexcept {
  std::uint64_t n = 0;
  for (const auto& b : bins) n += b.attempts;
  return n;
}

std::uint64_t FlipStats::accepts() const noexcept {
  std::uint64_t n = 0;
  for (const auto& b : bins) n += b.accepts;
  return n;
}

namespace {

void require_scalar(const Sample& sample, const SpinConfiguration& config) {
  require_same_geometry(sample, config);
  if (config.width() != 1) throw InvalidArgument("scalar engines need a W=1 configuration");
}

auto wrapped_planes(SpinConfiguration& config) {
  const auto& g = config.geometry();
  const auto lz = static_cast<std::ptrdiff_t>(g.lz());
  const std::size_t plane = g.plane_size();
  std::uint64_t* base = config.words().data();
  return [=](std::ptrdiff_t z) {
    if (z < 0) z += lz;
    if (z >= lz) z -= lz;
    return base + static_cast<std::size_t>(z) * plane;
  };
}

}  // namespace

FlipStats metropolis_sweep_scalar(const Sample& sample, SpinConfiguration& config,
                                  const AcceptanceTable& table, SweepRandom rng) {
  require_scalar(sample, config);
  if (!(table.field() == sample.field())) {
    throw InvalidArgument("acceptance table field does not match sample field");
  }
  FlipStats stats;
  auto planes = wrapped_planes(config);
  const std::size_t lz = sample.geometry().lz();
  detail::with_draw(rng, [&](auto draw) {
    for (int phase = 0; phase < 2; ++phase) {
      detail::metropolis_phase(sample, planes, 0, lz, phase, table, draw, stats);
    }
  });
  return stats;
}

FlipStats metropolis_sweep_scalar(const Sample& sample, SpinConfiguration& config,
                                  const AcceptanceTable& table, SweepRandom rng,
                                  double declared_beta) {
  if (table.beta() != declared_beta) {
    throw InvalidArgument("acceptance table beta does not match the declared temperature");
  }
  return metropolis_sweep_scalar(sample, config, table, rng);
}

std::int64_t heatbath_sweep_scalar(const Sample& sample, SpinConfiguration& config,
                                   const HeatBathTable& table, SweepRandom rng) {
  require_scalar(sample, config);
  if (!(table.field() == sample.field())) {
    throw InvalidArgument("heat-bath table field does not match sample field");
  }
  auto planes = wrapped_planes(config);
  const std::size_t lz = sample.geometry().lz();
  std::int64_t change = 0;
  detail::with_draw(rng, [&](auto draw) {
    for (int phase = 0; phase < 2; ++phase) {
      change += detail::heatbath_phase(sample, planes, 0, lz, phase, table, draw);
    }
  });
  return change;
}

void write_flip_stats_csv(std::ostream& out, const AcceptanceTable& table,
                          const FlipStats& stats, bool header) {
  if (header) out << "beta,delta_e,attempts,accepts\n";
  for (int k = 0; k < AcceptanceTable::key_count; ++k) {
    if (!table.reachable(k)) continue;
    const auto& bin = stats.bins[static_cast<std::size_t>(k)];
    out << table.beta() << ',' << table.delta_e(k) << ',' << bin.attempts << ','
        << bin.accepts << '\n';
  }
}

}  // namespace eamc
