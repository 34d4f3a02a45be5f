#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eamc/engine.hpp"
#include "eamc/prng.hpp"
#include "eamc/sample.hpp"
#include "eamc/spin_config.hpp"

namespace eamc {

/// Temperatures T_1 < ... < T_NT plus the swap cadence. A single temperature
/// is a plain constant-T run.
class TemperatureLadder {
 public:
  static constexpr std::uint32_t default_n_pt = 10;
  static constexpr double default_target = 0.10;

  explicit TemperatureLadder(std::vector<double> temperatures,
                             std::uint32_t n_pt = default_n_pt,
                             double target_acceptance = default_target);

  /// Geometric spacing between t_min and t_max.
  static TemperatureLadder geometric(double t_min, double t_max, std::size_t count,
                                     std::uint32_t n_pt = default_n_pt,
                                     double target_acceptance = default_target);

  /// Non-decreasing temperatures allowed (equal neighbours); used for
  /// diagnosing the swap machinery.
  static TemperatureLadder diagnostic(std::vector<double> temperatures,
                                      std::uint32_t n_pt = default_n_pt);

  std::size_t size() const noexcept { return temps_.size(); }
  double temperature(std::size_t slot) const noexcept { return temps_[slot]; }
  const std::vector<double>& temperatures() const noexcept { return temps_; }
  std::uint32_t n_pt() const noexcept { return n_pt_; }
  double target_acceptance() const noexcept { return target_; }

 private:
  TemperatureLadder() = default;

  std::vector<double> temps_;
  std::uint32_t n_pt_ = default_n_pt;
  double target_ = default_target;
};

struct PairStats {
  std::uint64_t attempts = 0;
  std::uint64_t accepts = 0;
  double rate() const noexcept {
    return attempts == 0 ? 0.0 : static_cast<double>(accepts) / static_cast<double>(attempts);
  }
  bool operator==(const PairStats&) const = default;
};

/// N_T replicas of one sample. `replica_at(slot)` says which configuration
/// currently sits at a temperature slot; swaps permute these labels and never
/// move spin memory. Energies are cached x4 as exact integers.
class ReplicaSet {
 public:
  ReplicaSet(const Sample& sample, std::vector<SpinConfiguration> configs,
             std::vector<ChainRng> rngs);

  std::size_t size() const noexcept { return configs_.size(); }
  std::size_t replica_at(std::size_t slot) const noexcept { return replica_at_[slot]; }
  std::size_t slot_of(std::size_t replica) const noexcept { return slot_of_[replica]; }
  const std::vector<std::size_t>& permutation() const noexcept { return replica_at_; }

  SpinConfiguration& config(std::size_t replica) noexcept { return configs_[replica]; }
  const SpinConfiguration& config(std::size_t replica) const noexcept { return configs_[replica]; }
  ChainRng& rng(std::size_t replica) noexcept { return rngs_[replica]; }
  const ChainRng& rng(std::size_t replica) const noexcept { return rngs_[replica]; }

  std::int64_t energy_quarters(std::size_t replica) const noexcept { return energies_[replica]; }
  double energy(std::size_t replica) const noexcept {
    return static_cast<double>(energies_[replica]) / 4.0;
  }
  void add_energy(std::size_t replica, std::int64_t delta_quarters) noexcept {
    energies_[replica] += delta_quarters;
  }
  /// Recomputes every cached energy; throws InvariantViolation if any cache
  /// had drifted.
  void verify_energies(const Sample& sample);
  void recompute_energies(const Sample& sample);

  const std::vector<PairStats>& pair_stats() const noexcept { return pair_stats_; }
  void reset_pair_stats();

  std::uint64_t sweeps() const noexcept { return sweeps_; }
  std::uint64_t blocks() const noexcept { return blocks_; }
  std::uint64_t swap_passes() const noexcept { return passes_; }

  /// Throws InvariantViolation unless the slot/replica maps are inverse
  /// permutations.
  void check_permutation() const;

  void write(std::ostream& out) const;
  static ReplicaSet read(std::istream& in, const Sample& sample);

  /// Exchanges the occupants of slots a and a+1.
  void exchange(std::size_t slot) noexcept;
  void record_pair(std::size_t slot, bool accepted) noexcept;
  void note_sweeps(std::uint64_t n) noexcept { sweeps_ += n; }
  void note_block() noexcept { ++blocks_; }
  void note_pass() noexcept { ++passes_; }

  bool operator==(const ReplicaSet&) const = default;

 private:

  std::vector<SpinConfiguration> configs_;
  std::vector<ChainRng> rngs_;
  std::vector<std::size_t> replica_at_;
  std::vector<std::size_t> slot_of_;
  std::vector<std::int64_t> energies_;
  std::vector<PairStats> pair_stats_;
  std::uint64_t sweeps_ = 0;
  std::uint64_t blocks_ = 0;
  std::uint64_t passes_ = 0;
};

/// Result of one swap pass: one bit per adjacent pair (slot a, a+1).
struct SwapOutcome {
  std::uint64_t pass = 0;
  std::vector<std::size_t> permutation;
  std::vector<bool> accepted;
};

/// Metropolis probability of exchanging the configurations at two slots,
/// min(1, exp[(E_a - E_b)(1/T_a - 1/T_b)]).
double swap_probability(double e_low, double e_high, double t_low, double t_high);

/// For a = 0 .. NT-2 in ascending order, attempts to swap the occupants of
/// slots a and a+1, consuming one random per pair.
SwapOutcome swap_pass(ReplicaSet& replicas, const TemperatureLadder& ladder,
                      ParisiRapuano& rng);

/// Swap pass driven by bare energies (slot order); returns the new slot
/// order. Used to check that swap decisions depend only on energies.
std::vector<std::size_t> swap_pass_energies(std::vector<double> energies_by_replica,
                                            std::vector<std::size_t> replica_at,
                                            const TemperatureLadder& ladder,
                                            ParisiRapuano& rng);

/// Number of blocks between full energy recomputations.
inline constexpr std::uint64_t energy_recompute_interval = 10000;

struct PtBlockOptions {
  std::size_t workers = 1;
  /// Collected per temperature slot when non-null (size NT).
  std::vector<FlipStats>* slot_stats = nullptr;
};

/// n_pt sweeps of every replica at its current temperature, then one swap
/// pass (skipped when NT = 1). `tables[slot]` must match the ladder.
SwapOutcome pt_block(const Sample& sample, ReplicaSet& replicas, const TemperatureLadder& ladder,
                     const std::vector<SlotTables>& tables, const EngineSpec& engine,
                     ParisiRapuano& swap_rng, const PtBlockOptions& options = {});

/// n sweeps of every replica (no swap pass). Used when measurement times do
/// not fall on block boundaries.
void pt_sweeps(const Sample& sample, ReplicaSet& replicas, const std::vector<SlotTables>& tables,
               const EngineSpec& engine, std::uint64_t sweeps, const PtBlockOptions& options = {});

struct TuneBudget {
  std::size_t max_iterations = 30;
  std::uint64_t thermalization_blocks = 200;
  std::uint64_t measurement_blocks = 2000;
};

struct TuneResult {
  TemperatureLadder ladder;
  std::vector<double> acceptances;
  bool converged = false;
  bool over_target = false;  // every pair above 2*target
  std::size_t iterations = 0;
};

/// Starts from geometric spacing between the bounds and moves interior
/// temperatures until every pair acceptance lies in [target/2, 2*target] or
/// the budget runs out (best ladder returned, converged = false).
TuneResult tune_ladder(const Sample& sample, double t_min, double t_max, std::size_t count,
                       double target, const TuneBudget& budget, std::uint64_t seed,
                       std::uint32_t n_pt = TemperatureLadder::default_n_pt);

/// One JSON object per pass: {"pass":..,"perm":[..],"accepted":[0/1..]}.
void write_pt_trace(std::ostream& out, const SwapOutcome& outcome, std::int64_t sample_id = -1,
                    std::int64_t set = -1);

}  // namespace eamc
