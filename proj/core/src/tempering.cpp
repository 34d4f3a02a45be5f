#include "eamc/tempering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "eamc/acceptance.hpp"
#include "eamc/binary_io.hpp"
#include "eamc/energy.hpp"
#include "eamc/error.hpp"
#include "eamc/mixing.hpp"

namespace eamc {

TemperatureLadder::TemperatureLadder(std::vector<double> temperatures, std::uint32_t n_pt,
                                     double target_acceptance)
    : temps_(std::move(temperatures)), n_pt_(n_pt), target_(target_acceptance) {
  if (temps_.empty()) throw InvalidArgument("temperature ladder is empty");
  for (std::size_t i = 0; i < temps_.size(); ++i) {
    if (!(temps_[i] >= 0.0) || !std::isfinite(temps_[i])) {
      throw InvalidArgument("temperatures must be finite and >= 0");
    }
    if (i > 0 && !(temps_[i] > temps_[i - 1])) {
      throw InvalidArgument("temperatures must be strictly increasing (slot " +
                            std::to_string(i) + ")");
    }
  }
  if (n_pt_ == 0) throw InvalidArgument("n_pt must be >= 1");
  if (!(target_ > 0.0 && target_ < 1.0)) throw InvalidArgument("target acceptance must be in (0,1)");
}

TemperatureLadder TemperatureLadder::geometric(double t_min, double t_max, std::size_t count,
                                               std::uint32_t n_pt, double target) {
  if (!(t_min > 0.0) || !(t_max > t_min)) throw InvalidArgument("need 0 < T_min < T_max");
  if (count < 2) throw InvalidArgument("geometric ladder needs at least two temperatures");
  std::vector<double> t(count);
  const double ratio = std::pow(t_max / t_min, 1.0 / static_cast<double>(count - 1));
  for (std::size_t i = 0; i < count; ++i) t[i] = t_min * std::pow(ratio, static_cast<double>(i));
  t.front() = t_min;
  t.back() = t_max;
  return TemperatureLadder(std::move(t), n_pt, target);
}

TemperatureLadder TemperatureLadder::diagnostic(std::vector<double> temperatures,
                                                std::uint32_t n_pt) {
  if (temperatures.empty()) throw InvalidArgument("temperature ladder is empty");
  for (std::size_t i = 1; i < temperatures.size(); ++i) {
    if (temperatures[i] < temperatures[i - 1]) {
      throw InvalidArgument("diagnostic ladder must be non-decreasing");
    }
  }
  TemperatureLadder l;
  l.temps_ = std::move(temperatures);
  l.n_pt_ = n_pt;
  return l;
}

ReplicaSet::ReplicaSet(const Sample& sample, std::vector<SpinConfiguration> configs,
                       std::vector<ChainRng> rngs)
    : configs_(std::move(configs)), rngs_(std::move(rngs)) {
  if (configs_.empty()) throw InvalidArgument("replica set is empty");
  if (rngs_.size() != configs_.size()) {
    throw InvalidArgument("need one generator per replica");
  }
  for (const auto& c : configs_) {
    require_same_geometry(sample, c);
    if (c.width() != 1) throw InvalidArgument("replicas must be W=1 configurations");
  }
  replica_at_.resize(configs_.size());
  std::iota(replica_at_.begin(), replica_at_.end(), std::size_t{0});
  slot_of_ = replica_at_;
  pair_stats_.assign(configs_.size() > 1 ? configs_.size() - 1 : 0, PairStats{});
  recompute_energies(sample);
}

void ReplicaSet::recompute_energies(const Sample& sample) {
  energies_.resize(configs_.size());
  for (std::size_t r = 0; r < configs_.size(); ++r) energies_[r] = eamc::energy_quarters(sample, configs_[r]);
}

void ReplicaSet::verify_energies(const Sample& sample) {
  for (std::size_t r = 0; r < configs_.size(); ++r) {
    const std::int64_t exact = eamc::energy_quarters(sample, configs_[r]);
    if (exact != energies_[r]) {
      throw InvariantViolation("cached energy of replica " + std::to_string(r) +
                               " drifted: cached " + std::to_string(energies_[r]) +
                               "/4, actual " + std::to_string(exact) + "/4");
    }
  }
}

void ReplicaSet::reset_pair_stats() {
  std::fill(pair_stats_.begin(), pair_stats_.end(), PairStats{});
}

void ReplicaSet::exchange(std::size_t slot) noexcept {
  std::swap(replica_at_[slot], replica_at_[slot + 1]);
  slot_of_[replica_at_[slot]] = slot;
  slot_of_[replica_at_[slot + 1]] = slot + 1;
}

void ReplicaSet::record_pair(std::size_t slot, bool accepted) noexcept {
  ++pair_stats_[slot].attempts;
  if (accepted) ++pair_stats_[slot].accepts;
}

void ReplicaSet::check_permutation() const {
  const std::size_t n = configs_.size();
  if (replica_at_.size() != n || slot_of_.size() != n) {
    throw InvariantViolation("permutation size mismatch");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t r = replica_at_[s];
    if (r >= n || seen[r] || slot_of_[r] != s) {
      throw InvariantViolation("replica permutation is corrupted at slot " + std::to_string(s));
    }
    seen[r] = true;
  }
}

void ReplicaSet::write(std::ostream& out) const {
  BinaryWriter w(out);
  w.u32(static_cast<std::uint32_t>(configs_.size()));
  w.u64(sweeps_);
  w.u64(blocks_);
  w.u64(passes_);
  for (std::size_t r = 0; r < configs_.size(); ++r) {
    w.u32(static_cast<std::uint32_t>(replica_at_[r]));
    w.i64(energies_[r]);
    for (auto word : configs_[r].words()) w.u64(word);
    rngs_[r].write(out);
  }
  for (const auto& p : pair_stats_) {
    w.u64(p.attempts);
    w.u64(p.accepts);
  }
}

ReplicaSet ReplicaSet::read(std::istream& in, const Sample& sample) {
  BinaryReader r(in);
  const std::size_t n = r.u32();
  if (n == 0 || n > 4096) throw Error("implausible replica count in stream");
  const std::uint64_t sweeps = r.u64();
  const std::uint64_t blocks = r.u64();
  const std::uint64_t passes = r.u64();
  std::vector<std::size_t> replica_at(n);
  std::vector<std::int64_t> energies(n);
  std::vector<SpinConfiguration> configs;
  std::vector<ChainRng> rngs;
  for (std::size_t i = 0; i < n; ++i) {
    replica_at[i] = r.u32();
    energies[i] = r.i64();
    SpinConfiguration c(sample.geometry(), 1);
    for (auto& word : c.words()) {
      word = r.u64();
      if (word > 1) throw Error("corrupt spin word in stream");
    }
    configs.push_back(std::move(c));
    rngs.push_back(ChainRng::read(in));
  }
  ReplicaSet set(sample, std::move(configs), std::move(rngs));
  set.replica_at_ = std::move(replica_at);
  for (std::size_t s = 0; s < n; ++s) {
    if (set.replica_at_[s] >= n) throw Error("corrupt permutation in stream");
    set.slot_of_[set.replica_at_[s]] = s;
  }
  set.check_permutation();
  set.energies_ = std::move(energies);
  set.verify_energies(sample);
  for (auto& p : set.pair_stats_) {
    p.attempts = r.u64();
    p.accepts = r.u64();
  }
  set.sweeps_ = sweeps;
  set.blocks_ = blocks;
  set.passes_ = passes;
  return set;
}

double swap_probability(double e_low, double e_high, double t_low, double t_high) {
  const double exponent =
      (e_low - e_high) * (inverse_temperature(t_low) - inverse_temperature(t_high));
  if (std::isnan(exponent) || exponent >= 0.0) return 1.0;
  return std::exp(exponent);
}

namespace {

bool swap_accepted(double e_low, double e_high, double t_low, double t_high,
                   std::uint32_t r) {
  return fixed_point_threshold(swap_probability(e_low, e_high, t_low, t_high)).accepts(r);
}

}  // namespace

SwapOutcome swap_pass(ReplicaSet& replicas, const TemperatureLadder& ladder, ParisiRapuano& rng) {
  if (ladder.size() != replicas.size()) {
    throw InvalidArgument("ladder has " + std::to_string(ladder.size()) +
                          " temperatures but the replica set has " +
                          std::to_string(replicas.size()) + " replicas");
  }
  SwapOutcome out;
  out.accepted.assign(replicas.size() > 0 ? replicas.size() - 1 : 0, false);
  for (std::size_t a = 0; a + 1 < replicas.size(); ++a) {
    const double e_low = replicas.energy(replicas.replica_at(a));
    const double e_high = replicas.energy(replicas.replica_at(a + 1));
    const std::uint32_t r = rng.next();
    const bool ok = swap_accepted(e_low, e_high, ladder.temperature(a),
                                  ladder.temperature(a + 1), r);
    replicas.record_pair(a, ok);
    if (ok) replicas.exchange(a);
    out.accepted[a] = ok;
  }
  out.pass = replicas.swap_passes();
  replicas.note_pass();
  out.permutation = replicas.permutation();
  return out;
}

std::vector<std::size_t> swap_pass_energies(std::vector<double> energies,
                                            std::vector<std::size_t> replica_at,
                                            const TemperatureLadder& ladder,
                                            ParisiRapuano& rng) {
  for (std::size_t a = 0; a + 1 < replica_at.size(); ++a) {
    const std::uint32_t r = rng.next();
    if (swap_accepted(energies[replica_at[a]], energies[replica_at[a + 1]],
                      ladder.temperature(a), ladder.temperature(a + 1), r)) {
      std::swap(replica_at[a], replica_at[a + 1]);
    }
  }
  return replica_at;
}

void pt_sweeps(const Sample& sample, ReplicaSet& replicas, const std::vector<SlotTables>& tables,
               const EngineSpec& engine, std::uint64_t sweeps, const PtBlockOptions& options) {
  if (tables.size() != replicas.size()) {
    throw InvalidArgument("need one table set per temperature slot");
  }
  if (options.slot_stats != nullptr && options.slot_stats->size() != replicas.size()) {
    throw InvalidArgument("slot statistics must have one entry per slot");
  }
  const std::uint64_t first = replicas.sweeps();
  const auto advance = [&](std::size_t replica) {
    const std::size_t slot = replicas.slot_of(replica);
    FlipStats* stats = options.slot_stats ? &(*options.slot_stats)[slot] : nullptr;
    const std::int64_t de = advance_chain(sample, replicas.config(replica), replicas.rng(replica),
                                          first, sweeps, tables[slot], engine, stats);
    replicas.add_energy(replica, de);
  };
  const std::size_t n = replicas.size();
  const std::size_t workers = std::min(std::max<std::size_t>(options.workers, 1), n);
  if (workers == 1) {
    for (std::size_t r = 0; r < n; ++r) advance(r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = w; r < n; r += workers) advance(r);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  replicas.note_sweeps(sweeps);
}

SwapOutcome pt_block(const Sample& sample, ReplicaSet& replicas, const TemperatureLadder& ladder,
                     const std::vector<SlotTables>& tables, const EngineSpec& engine,
                     ParisiRapuano& swap_rng, const PtBlockOptions& options) {
  if (ladder.size() != replicas.size()) {
    throw InvalidArgument("ladder and replica set sizes differ");
  }
  for (std::size_t s = 0; s < tables.size(); ++s) {
    if (tables[s].temperature != ladder.temperature(s)) {
      throw InvalidArgument("tables do not match the ladder at slot " + std::to_string(s));
    }
  }
  pt_sweeps(sample, replicas, tables, engine, ladder.n_pt(), options);
  replicas.note_block();
  if (replicas.blocks() % energy_recompute_interval == 0) replicas.verify_energies(sample);
  if (replicas.size() < 2) {
    SwapOutcome none;
    none.pass = replicas.swap_passes();
    none.permutation = replicas.permutation();
    return none;
  }
  return swap_pass(replicas, ladder, swap_rng);
}

namespace {

std::vector<SlotTables> make_tables(const TemperatureLadder& ladder, FieldStrength field) {
  std::vector<SlotTables> t;
  t.reserve(ladder.size());
  for (double temp : ladder.temperatures()) t.emplace_back(temp, field);
  return t;
}

double ladder_score(const std::vector<double>& acc, double target) {
  double worst = 0.0;
  for (double a : acc) worst = std::max(worst, std::abs(std::log(std::max(a, 1e-6) / target)));
  return worst;
}

// Moves interior inverse temperatures so that each gap carries the same
// "cost" sqrt(-ln a), where a is the measured pair acceptance. Endpoints stay.
std::vector<double> equalize(const std::vector<double>& temps, const std::vector<double>& acc) {
  const std::size_t n = temps.size();
  std::vector<double> beta(n);
  for (std::size_t i = 0; i < n; ++i) beta[i] = 1.0 / temps[i];
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = std::clamp(acc[i], 1e-4, 0.999);
    cum[i + 1] = cum[i] + std::sqrt(-std::log(a));
  }
  const double total = cum.back();
  std::vector<double> out = temps;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double want = total * static_cast<double>(k) / static_cast<double>(n - 1);
    std::size_t i = 0;
    while (i + 2 < n && cum[i + 1] < want) ++i;
    const double span = cum[i + 1] - cum[i];
    const double f = span > 0 ? (want - cum[i]) / span : 0.5;
    const double b = beta[i] + f * (beta[i + 1] - beta[i]);
    // Damped update keeps the iteration from oscillating on noisy estimates.
    out[k] = 0.5 * temps[k] + 0.5 / b;
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (!(out[k] > out[k - 1])) out[k] = std::nextafter(out[k - 1], out.back());
  }
  return out;
}

}  // namespace

TuneResult tune_ladder(const Sample& sample, double t_min, double t_max, std::size_t count,
                       double target, const TuneBudget& budget, std::uint64_t seed,
                       std::uint32_t n_pt) {
  if (!(t_min < t_max)) throw InvalidArgument("tuning bounds need T_min < T_max");
  if (count < 2) throw InvalidArgument("tuning needs at least two temperatures");
  if (!(target > 0.0 && target < 0.5)) throw InvalidArgument("target acceptance must be in (0, 0.5)");

  TemperatureLadder ladder = TemperatureLadder::geometric(t_min, t_max, count, n_pt, target);
  std::vector<SpinConfiguration> configs;
  std::vector<ChainRng> rngs;
  for (std::size_t r = 0; r < count; ++r) {
    configs.push_back(SpinConfiguration::random(sample.geometry(), 1,
                                                derive_seed(seed, SeedTag::initial_spins, r)));
    rngs.push_back(ChainRng::parisi_rapuano(derive_seed(seed, SeedTag::chain_stream, r)));
  }
  ReplicaSet replicas(sample, std::move(configs), std::move(rngs));
  ParisiRapuano swap_rng(derive_seed(seed, SeedTag::swap_stream, 0));
  const EngineSpec engine{EngineKind::metropolis, 1};

  TuneResult best{ladder, {}, false, false, 0};
  double best_score = std::numeric_limits<double>::infinity();
  const double lo = target / 2.0;
  const double hi = target * 2.0;

  for (std::size_t it = 1; it <= budget.max_iterations; ++it) {
    const auto tables = make_tables(ladder, sample.field());
    const std::uint64_t therm = it == 1 ? budget.thermalization_blocks
                                        : budget.thermalization_blocks / 4;
    for (std::uint64_t b = 0; b < therm; ++b) {
      pt_block(sample, replicas, ladder, tables, engine, swap_rng);
    }
    replicas.reset_pair_stats();
    for (std::uint64_t b = 0; b < budget.measurement_blocks; ++b) {
      pt_block(sample, replicas, ladder, tables, engine, swap_rng);
    }
    std::vector<double> acc;
    for (const auto& p : replicas.pair_stats()) acc.push_back(p.rate());

    const double score = ladder_score(acc, target);
    const bool in_band = std::all_of(acc.begin(), acc.end(),
                                     [&](double a) { return a >= lo && a <= hi; });
    const bool over = std::all_of(acc.begin(), acc.end(), [&](double a) { return a > hi; });
    if (score < best_score || in_band) {
      best_score = score;
      best = TuneResult{ladder, acc, in_band, over, it};
    }
    best.iterations = it;
    if (in_band) break;
    if (count == 2) {
      best.over_target = over;
      break;  // no interior temperatures to move
    }
    ladder = TemperatureLadder(equalize(ladder.temperatures(), acc), n_pt, target);
  }
  return best;
}

void write_pt_trace(std::ostream& out, const SwapOutcome& outcome, std::int64_t sample_id,
                    std::int64_t set) {
  out << '{';
  if (sample_id >= 0) out << "\"sample_id\":" << sample_id << ',';
  if (set >= 0) out << "\"set\":" << set << ',';
  out << "\"pass\":" << outcome.pass << ",\"perm\":[";
  for (std::size_t i = 0; i < outcome.permutation.size(); ++i) {
    if (i) out << ',';
    out << outcome.permutation[i];
  }
  out << "],\"accepted\":[";
  for (std::size_t i = 0; i < outcome.accepted.size(); ++i) {
    if (i) out << ',';
    out << (outcome.accepted[i] ? 1 : 0);
  }
  out << "]}\n";
}

}  // namespace eamc
