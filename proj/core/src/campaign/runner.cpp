#include "eamc/campaign/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <filesystem>
#include <fstream>
#include <thread>

#include "eamc/campaign/checkpoint.hpp"
#include "eamc/energy.hpp"
#include "eamc/error.hpp"
#include "eamc/mixing.hpp"
#include "eamc/observables.hpp"

namespace eamc::campaign {

namespace fs = std::filesystem;

bool is_measurement_time(std::uint64_t t, std::uint64_t total, std::uint64_t every) noexcept {
  if (t == 0) return false;
  if (t == total) return true;
  return every == 0 ? std::has_single_bit(t) : t % every == 0;
}

CampaignConfig apply_overrides(CampaignConfig config, const RunOptions& options) {
  if (options.seed) config.seed = *options.seed;
  if (options.workers) config.workers = *options.workers;
  if (options.output) config.output = *options.output;
  validate(config);
  return config;
}

namespace {

std::uint64_t next_measurement(std::uint64_t t, std::uint64_t total, std::uint64_t every) {
  if (every == 0) return std::min(total, t == 0 ? std::uint64_t{1} : std::bit_floor(t) * 2);
  return std::min(total, (t / every + 1) * every);
}

template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& f) {
  workers = std::min(std::max<std::size_t>(workers, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) f(i);
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

class Campaign {
 public:
  Campaign(CampaignConfig config, std::vector<Sample> samples, std::vector<double> temps)
      : config_(std::move(config)),
        samples_(std::move(samples)),
        ladder_(temps, config_.n_pt),
        dir_(config_.output) {
    for (double t : ladder_.temperatures()) tables_.emplace_back(t, config_.field_strength());
    if (config_.engine == EngineKind::bitsliced) {
      couplings_.emplace(PackedCouplings::pack(samples_));
    }
  }

  void fresh_state() {
    const std::size_t nt = ladder_.size();
    const auto geometry = config_.geometry();
    if (couplings_) {
      PackedState p;
      for (std::size_t k = 0; k < 2; ++k) {
        p.configs.push_back(SpinConfiguration::random(
            geometry, samples_.size(), derive_seed(config_.seed, SeedTag::initial_spins, k)));
        p.rngs.push_back(make_rng(k));
      }
      packed_ = std::move(p);
      return;
    }
    for (std::size_t s = 0; s < samples_.size(); ++s) {
      SampleState st;
      for (std::size_t k = 0; k < 2; ++k) {
        std::vector<SpinConfiguration> configs;
        std::vector<ChainRng> rngs;
        for (std::size_t r = 0; r < nt; ++r) {
          const std::uint64_t idx = (2 * s + k) * nt + r;
          configs.push_back(SpinConfiguration::random(
              geometry, 1, derive_seed(config_.seed, SeedTag::initial_spins, idx)));
          rngs.push_back(make_rng(idx));
        }
        st.sets.emplace_back(samples_[s], std::move(configs), std::move(rngs));
        st.swap_rngs.emplace_back(derive_seed(config_.seed, SeedTag::swap_stream, 2 * s + k));
      }
      st.slot_stats.assign(nt, FlipStats{});
      states_.push_back(std::move(st));
    }
  }

  void restore(Checkpoint cp) {
    sweep_ = cp.sweep;
    states_ = std::move(cp.samples);
    packed_ = std::move(cp.packed);
    offsets_ = cp.offsets;
  }

  void open_outputs(bool fresh) {
    fs::create_directories(dir_);
    const auto open = [&](std::ofstream& f, const char* name, std::uint64_t keep) {
      const fs::path p = dir_ / name;
      if (fresh) {
        f.open(p, std::ios::binary | std::ios::trunc);
      } else {
        if (!fs::exists(p)) throw Error("missing output file '" + p.string() + "' for resume");
        if (fs::file_size(p) < keep) throw Error("output file '" + p.string() + "' is shorter than the checkpoint records");
        fs::resize_file(p, keep);
        f.open(p, std::ios::binary | std::ios::app);
      }
      if (!f) throw Error("cannot open output file '" + p.string() + "'");
    };
    open(measurements_, measurements_file, offsets_.measurements);
    open(c4_, c4_file, offsets_.c4);
    open(trace_, trace_file, offsets_.trace);
    if (fresh) {
      c4_ << "sample_id,T,t,r,c4\n";
      std::ofstream cfg(dir_ / config_file, std::ios::trunc);
      cfg << serialize_config(config_);
    }
  }

  RunSummary run(std::optional<std::uint64_t> halt_after) {
    const std::uint64_t total = config_.sweeps;
    const std::uint64_t every = config_.measure_every;
    const std::uint64_t n_pt = ladder_.n_pt();
    while (sweep_ < total) {
      std::uint64_t next = std::min(total, next_measurement(sweep_, total, every));
      next = std::min(next, (sweep_ / n_pt + 1) * n_pt);
      if (config_.checkpoint_interval > 0) {
        next = std::min(next, (sweep_ / config_.checkpoint_interval + 1) * config_.checkpoint_interval);
      }
      if (halt_after && *halt_after > sweep_) next = std::min(next, *halt_after);

      advance(next - sweep_);
      sweep_ = next;
      if (sweep_ % n_pt == 0) end_block();
      if (is_measurement_time(sweep_, total, every)) measure();
      if (halt_after && sweep_ == *halt_after && sweep_ < total) {
        flush();
        return summary(false);
      }
      if (sweep_ == total ||
          (config_.checkpoint_interval > 0 && sweep_ % config_.checkpoint_interval == 0)) {
        checkpoint();
      }
    }
    write_flip_stats();
    return summary(true);
  }

  void checkpoint() {
    flush();
    // Location-independent: the stored config never names an output directory.
    CampaignConfig stored = config_;
    stored.output = ".";
    stored.workers = 1;
    Checkpoint cp;
    cp.config_text = serialize_config(stored);
    cp.config_hash = config_hash(config_);
    cp.sweep = sweep_;
    cp.temperatures = ladder_.temperatures();
    cp.offsets = {static_cast<std::uint64_t>(measurements_.tellp()),
                  static_cast<std::uint64_t>(c4_.tellp()),
                  static_cast<std::uint64_t>(trace_.tellp())};
    cp.samples = states_;
    cp.packed = packed_;
    write_checkpoint((dir_ / checkpoint_file).string(), cp);
  }

 private:
  ChainRng make_rng(std::uint64_t idx) const {
    if (config_.rng_mode == RngMode::site_keyed) {
      return ChainRng::site_keyed(derive_seed(config_.seed, SeedTag::keyed_stream, idx));
    }
    return ChainRng::parisi_rapuano(derive_seed(config_.seed, SeedTag::chain_stream, idx),
                                    config_.partitions);
  }

  void advance(std::uint64_t sweeps) {
    if (packed_) {
      const AcceptanceTable& table = tables_.front().metropolis;
      parallel_for(2, config_.workers, [&](std::size_t k) {
        LaneFlipStats local;
        ChainRng& rng = packed_->rngs[k];
        for (std::uint64_t i = 0; i < sweeps; ++i) {
          const SweepRandom r = rng.mode == RngMode::site_keyed
                                    ? SweepRandom::keyed(rng.keyed, sweep_ + i)
                                    : SweepRandom::sequential(rng.streams.front());
          metropolis_sweep_bitsliced(*couplings_, packed_->configs[k], table, r, &local);
        }
        lane_stats_[k] = local;
      });
      packed_->stats.merge(lane_stats_[0]);
      packed_->stats.merge(lane_stats_[1]);
      return;
    }
    const EngineSpec engine{config_.engine, config_.partitions};
    const std::size_t jobs = 2 * states_.size();
    std::vector<std::vector<FlipStats>> stats(jobs, std::vector<FlipStats>(ladder_.size()));
    parallel_for(jobs, config_.workers, [&](std::size_t j) {
      auto& st = states_[j / 2];
      PtBlockOptions opts;
      opts.slot_stats = &stats[j];
      pt_sweeps(samples_[j / 2], st.sets[j % 2], tables_, engine, sweeps, opts);
    });
    for (std::size_t j = 0; j < jobs; ++j) {
      for (std::size_t s = 0; s < ladder_.size(); ++s) states_[j / 2].slot_stats[s].merge(stats[j][s]);
    }
  }

  void end_block() {
    for (std::size_t s = 0; s < states_.size(); ++s) {
      auto& st = states_[s];
      for (std::size_t k = 0; k < st.sets.size(); ++k) {
        ReplicaSet& set = st.sets[k];
        set.note_block();
        if (set.blocks() % energy_recompute_interval == 0) set.verify_energies(samples_[s]);
        if (set.size() > 1) {
          const SwapOutcome out = swap_pass(set, ladder_, st.swap_rngs[k]);
          write_pt_trace(trace_, out, static_cast<std::int64_t>(s), static_cast<std::int64_t>(k));
        }
      }
    }
  }

  void record(std::uint64_t sample_id, std::size_t replica, double temperature, double energy,
              double q, const CorrelationProfile& profile) {
    const Guard guard = guard_nonequilibrium(profile.xi, side());
    nlohmann::ordered_json j;
    j["sample_id"] = sample_id;
    j["replica"] = replica;
    j["T"] = temperature;
    j["t"] = sweep_;
    j["E"] = energy;
    j["q"] = q;
    j["xi"] = profile.xi;
    j["guard"] = to_string(guard);
    measurements_ << j.dump() << '\n';
    ++records_;
  }

  std::size_t side() const {
    const auto g = config_.geometry();
    return std::min({g.lx(), g.ly(), g.lz()});
  }

  void measure() {
    if (packed_) {
      const double temp = ladder_.temperature(0);
      for (std::size_t w = 0; w < samples_.size(); ++w) {
        const auto& a = packed_->configs[0];
        const auto& b = packed_->configs[1];
        const double q = overlap(a, b, w);
        const CorrelationProfile profile = correlation_and_xi(a, b, w, sweep_);
        for (std::size_t k = 0; k < 2; ++k) {
          const double e = static_cast<double>(energy_quarters(samples_[w], packed_->configs[k], w)) / 4.0;
          record(w, k, temp, e, q, profile);
        }
        write_c4_csv(c4_, profile, w, temp, false);
      }
      return;
    }
    for (std::size_t s = 0; s < states_.size(); ++s) {
      const auto& st = states_[s];
      for (std::size_t slot = 0; slot < ladder_.size(); ++slot) {
        const std::size_t r0 = st.sets[0].replica_at(slot);
        const std::size_t r1 = st.sets[1].replica_at(slot);
        const auto& a = st.sets[0].config(r0);
        const auto& b = st.sets[1].config(r1);
        const double q = overlap(a, b);
        const CorrelationProfile profile = correlation_and_xi(a, b, 0, sweep_);
        const double temp = ladder_.temperature(slot);
        record(s, 0, temp, st.sets[0].energy(r0), q, profile);
        record(s, 1, temp, st.sets[1].energy(r1), q, profile);
        write_c4_csv(c4_, profile, s, temp, false);
      }
    }
  }

  void write_flip_stats() {
    std::ofstream out(dir_ / flip_stats_file, std::ios::trunc);
    out << "sample_id,T,beta,delta_e,attempts,accepts\n";
    const auto rows = [&](std::uint64_t id, std::size_t slot, const FlipStats& st) {
      const AcceptanceTable& table = tables_[slot].metropolis;
      for (int key = 0; key < AcceptanceTable::key_count; ++key) {
        if (!table.reachable(key)) continue;
        const auto& bin = st.bins[static_cast<std::size_t>(key)];
        out << id << ',' << ladder_.temperature(slot) << ',' << table.beta() << ','
            << table.delta_e(key) << ',' << bin.attempts << ',' << bin.accepts << '\n';
      }
    };
    if (packed_) {
      for (std::size_t w = 0; w < samples_.size(); ++w) rows(w, 0, packed_->stats.lane(w));
    } else {
      for (std::size_t s = 0; s < states_.size(); ++s) {
        for (std::size_t slot = 0; slot < ladder_.size(); ++slot) rows(s, slot, states_[s].slot_stats[slot]);
      }
    }
  }

  void flush() {
    measurements_.flush();
    c4_.flush();
    trace_.flush();
    if (!measurements_ || !c4_ || !trace_) throw Error("failed writing campaign output");
  }

  RunSummary summary(bool completed) const {
    RunSummary s;
    s.sweeps_done = sweep_;
    s.records = records_;
    s.completed = completed;
    s.output_dir = dir_.string();
    s.temperatures = ladder_.temperatures();
    return s;
  }

  CampaignConfig config_;
  std::vector<Sample> samples_;
  TemperatureLadder ladder_;
  std::vector<SlotTables> tables_;
  std::optional<PackedCouplings> couplings_;
  fs::path dir_;

  std::uint64_t sweep_ = 0;
  std::uint64_t records_ = 0;
  std::vector<SampleState> states_;
  std::optional<PackedState> packed_;
  std::array<LaneFlipStats, 2> lane_stats_{};
  OutputOffsets offsets_;
  std::ofstream measurements_, c4_, trace_;
};

std::vector<double> resolve_temperatures(const CampaignConfig& config,
                                         const std::vector<Sample>& samples) {
  if (!config.tune) return config.temperatures;
  const auto& t = *config.tune;
  TuneBudget budget;
  budget.max_iterations = t.iterations;
  budget.measurement_blocks = t.blocks;
  budget.thermalization_blocks = std::max<std::uint64_t>(1, t.blocks / 10);
  const TuneResult result = tune_ladder(samples.front(), t.t_min, t.t_max, t.count, t.target,
                                        budget, derive_seed(config.seed, SeedTag::swap_stream, ~0ULL),
                                        config.n_pt);
  return result.ladder.temperatures();
}

}  // namespace

RunSummary run_campaign(const CampaignConfig& base, const RunOptions& options) {
  const CampaignConfig config = apply_overrides(base, options);
  auto samples = make_samples(config);
  auto temps = resolve_temperatures(config, samples);
  Campaign c(config, std::move(samples), std::move(temps));
  c.fresh_state();
  c.open_outputs(true);
  return c.run(options.halt_after);
}

RunSummary resume_campaign(const std::string& checkpoint_path, const RunOptions& options,
                           const std::optional<CampaignConfig>& expected) {
  const CheckpointHeader header = read_checkpoint_header(checkpoint_path);
  CampaignConfig config = parse_config(header.config_text);
  if (expected && config_hash(*expected) != header.config_hash) {
    throw ConfigError("--config", "does not match the configuration stored in the checkpoint");
  }
  if (options.seed && *options.seed != config.seed) {
    throw ConfigError("--seed", "cannot change the seed of a checkpointed run");
  }
  RunOptions o = options;
  o.seed.reset();
  if (!o.output) o.output = fs::path(checkpoint_path).parent_path().string();
  if (o.output->empty()) o.output = ".";
  config = apply_overrides(config, o);

  auto samples = make_samples(config);
  Checkpoint cp = read_checkpoint(checkpoint_path, samples);
  Campaign c(config, std::move(samples), cp.temperatures);
  c.restore(std::move(cp));
  c.open_outputs(false);
  return c.run(options.halt_after);
}

}  // namespace eamc::campaign
