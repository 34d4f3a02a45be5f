#include "eamc/campaign/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "eamc/campaign/checkpoint.hpp"
#include "eamc/energy.hpp"
#include "eamc/enumeration.hpp"
#include "eamc/error.hpp"
#include "eamc/mixing.hpp"
#include "eamc/tempering.hpp"

namespace eamc::campaign {

const char* to_string(OracleMethod m) noexcept {
  switch (m) {
    case OracleMethod::metropolis: return "metropolis";
    case OracleMethod::heatbath: return "heatbath";
    case OracleMethod::tempering: return "tempering";
  }
  return "?";
}

double OracleReport::max_abs_z() const noexcept {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.z));
  return m;
}

namespace {

struct BatchMeans {
  explicit BatchMeans(std::uint64_t per_batch) : per_batch_(per_batch) {}

  void add(double x) {
    acc_ += x;
    if (++n_ == per_batch_) {
      means_.push_back(acc_ / static_cast<double>(n_));
      acc_ = 0.0;
      n_ = 0;
    }
  }
  double mean() const {
    double s = 0.0;
    for (double m : means_) s += m;
    return s / static_cast<double>(means_.size());
  }
  double std_error() const {
    const double mu = mean();
    double v = 0.0;
    for (double m : means_) v += (m - mu) * (m - mu);
    const double b = static_cast<double>(means_.size());
    return std::sqrt(v / (b - 1.0) / b);
  }

 private:
  std::uint64_t per_batch_;
  std::uint64_t n_ = 0;
  double acc_ = 0.0;
  std::vector<double> means_;
};

double z_score(double mc, double exact, double err) {
  if (err > 0.0) return (mc - exact) / err;
  return mc == exact ? 0.0 : std::numeric_limits<double>::infinity();
}

double two_spin_correlation(double temperature) {
  BondGraph g;
  g.spins = 2;
  g.bonds.push_back({0, 1, 1.0});
  return exact_expectation(g, temperature, [](std::uint64_t s) {
    const int a = (s & 1U) ? 1 : -1;
    const int b = (s & 2U) ? 1 : -1;
    return static_cast<double>(a * b);
  });
}

// One constant-temperature chain; returns (mean, stderr) of E.
std::pair<double, double> single_chain(const Sample& sample, double temperature, EngineKind kind,
                                       const OracleSettings& s, std::uint64_t stream) {
  SpinConfiguration config = SpinConfiguration::random(
      sample.geometry(), 1, derive_seed(s.seed, SeedTag::initial_spins, stream));
  ChainRng rng = ChainRng::parisi_rapuano(derive_seed(s.seed, SeedTag::chain_stream, stream));
  const SlotTables tables(temperature, sample.field());
  const EngineSpec engine{kind, 1};
  advance_chain(sample, config, rng, 0, s.thermalization, tables, engine);
  std::int64_t e = energy_quarters(sample, config, 0);
  BatchMeans bm(s.sweeps / s.batches);
  const std::uint64_t total = (s.sweeps / s.batches) * s.batches;
  for (std::uint64_t t = 0; t < total; ++t) {
    e += advance_chain(sample, config, rng, s.thermalization + t, 1, tables, engine);
    bm.add(static_cast<double>(e) / 4.0);
  }
  if (e != energy_quarters(sample, config, 0)) {
    throw InvariantViolation("oracle chain energy cache drifted");
  }
  return {bm.mean(), bm.std_error()};
}

// A PT run over the whole ladder; returns (mean, stderr) per slot.
std::vector<std::pair<double, double>> tempering_run(const Sample& sample,
                                                     const std::vector<double>& temps,
                                                     const OracleSettings& s,
                                                     std::uint64_t stream) {
  const TemperatureLadder ladder(temps, s.n_pt);
  const std::size_t nt = temps.size();
  std::vector<SpinConfiguration> configs;
  std::vector<ChainRng> rngs;
  for (std::size_t r = 0; r < nt; ++r) {
    configs.push_back(SpinConfiguration::random(
        sample.geometry(), 1, derive_seed(s.seed, SeedTag::initial_spins, stream * 64 + r)));
    rngs.push_back(ChainRng::parisi_rapuano(derive_seed(s.seed, SeedTag::chain_stream, stream * 64 + r)));
  }
  ReplicaSet set(sample, std::move(configs), std::move(rngs));
  ParisiRapuano swap_rng(derive_seed(s.seed, SeedTag::swap_stream, stream));
  std::vector<SlotTables> tables;
  for (double t : temps) tables.emplace_back(t, sample.field());
  const EngineSpec engine{EngineKind::metropolis, 1};

  const auto step = [&] {
    pt_sweeps(sample, set, tables, engine, 1);
    if (set.sweeps() % ladder.n_pt() == 0) {
      set.note_block();
      if (set.blocks() % energy_recompute_interval == 0) set.verify_energies(sample);
      swap_pass(set, ladder, swap_rng);
    }
  };
  for (std::uint64_t t = 0; t < s.thermalization; ++t) step();
  std::vector<BatchMeans> bm(nt, BatchMeans(s.sweeps / s.batches));
  const std::uint64_t total = (s.sweeps / s.batches) * s.batches;
  for (std::uint64_t t = 0; t < total; ++t) {
    step();
    for (std::size_t slot = 0; slot < nt; ++slot) bm[slot].add(set.energy(set.replica_at(slot)));
  }
  set.verify_energies(sample);
  std::vector<std::pair<double, double>> out;
  for (const auto& b : bm) out.emplace_back(b.mean(), b.std_error());
  return out;
}

}  // namespace

OracleReport run_oracle(const std::vector<Sample>& samples, const std::vector<double>& temps,
                        const OracleSettings& s) {
  if (temps.empty()) throw InvalidArgument("oracle needs at least one temperature");
  if (s.batches < 2 || s.sweeps < s.batches) {
    throw InvalidArgument("oracle needs at least two batches and sweeps >= batches");
  }
  for (const auto& sample : samples) {
    if (sample.geometry().size() > max_enumeration_spins) {
      throw InvalidArgument("sample has " + std::to_string(sample.geometry().size()) +
                            " spins; exact enumeration is limited to " +
                            std::to_string(max_enumeration_spins));
    }
  }
  const bool tempering = std::find(s.methods.begin(), s.methods.end(), OracleMethod::tempering) !=
                         s.methods.end();
  if (tempering) (void)TemperatureLadder(temps, s.n_pt);

  // Jobs: (sample, single-T method, T) and (sample, tempering).
  struct Job {
    std::size_t sample;
    OracleMethod method;
    std::size_t temp;  // ignored for tempering
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (OracleMethod m : s.methods) {
      if (m == OracleMethod::tempering) {
        jobs.push_back({i, m, 0});
      } else {
        for (std::size_t k = 0; k < temps.size(); ++k) jobs.push_back({i, m, k});
      }
    }
  }
  std::vector<std::vector<ExactThermo>> exact;
  for (const auto& sample : samples) exact.push_back(exact_enumeration(sample, temps));
  std::vector<double> two_spin;
  for (double t : temps) two_spin.push_back(two_spin_correlation(t));

  std::vector<std::vector<OracleRow>> results(jobs.size());
  const auto run_job = [&](std::size_t j) {
    const Job& job = jobs[j];
    const Sample& sample = samples[job.sample];
    const auto row = [&](std::size_t k, std::pair<double, double> mc) {
      OracleRow r;
      r.sample_id = sample.id();
      r.method = job.method;
      r.temperature = temps[k];
      r.exact_energy = exact[job.sample][k].mean_energy;
      r.mc_energy = mc.first;
      r.std_error = mc.second;
      r.z = z_score(mc.first, r.exact_energy, mc.second);
      r.two_spin_exact = two_spin[k];
      r.two_spin_tanh = std::tanh(1.0 / temps[k]);
      return r;
    };
    if (job.method == OracleMethod::tempering) {
      const auto mc = tempering_run(sample, temps, s, j);
      for (std::size_t k = 0; k < temps.size(); ++k) results[j].push_back(row(k, mc[k]));
    } else {
      const EngineKind kind = job.method == OracleMethod::heatbath ? EngineKind::heatbath
                                                                   : EngineKind::metropolis;
      results[j].push_back(row(job.temp, single_chain(sample, temps[job.temp], kind, s, j)));
    }
  };

  const std::size_t workers = std::min(std::max<std::size_t>(s.workers, 1), jobs.size());
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t j = w; j < jobs.size(); j += workers) run_job(j);
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
  OracleReport report;
  for (auto& r : results) report.rows.insert(report.rows.end(), r.begin(), r.end());
  return report;
}

OracleReport run_oracle(const CampaignConfig& config) {
  if (config.tune) throw ConfigError("temperatures.tune", "the oracle needs explicit temperatures");
  if (config.geometry().size() > max_enumeration_spins) {
    throw ConfigError("lattice", "oracle runs need at most " +
                                     std::to_string(max_enumeration_spins) + " spins");
  }
  OracleSettings s;
  switch (config.engine) {
    case EngineKind::metropolis: s.methods = {OracleMethod::metropolis}; break;
    case EngineKind::heatbath: s.methods = {OracleMethod::heatbath}; break;
    case EngineKind::bitsliced:
      throw ConfigError("engine.kind", "the oracle runs the scalar metropolis or heatbath engine");
  }
  if (config.temperatures.size() >= 2) s.methods.push_back(OracleMethod::tempering);
  s.sweeps = config.oracle_sweeps;
  s.thermalization = config.oracle_thermalization;
  s.batches = config.oracle_batches;
  s.n_pt = config.n_pt;
  s.seed = config.seed;
  s.workers = config.workers;
  return run_oracle(make_samples(config), config.temperatures, s);
}

void write_oracle_csv(std::ostream& out, const OracleReport& report) {
  out << "sample_id,method,T,exact_E,mc_E,stderr,z,two_spin_exact,tanh_beta\n";
  const auto old = out.precision(12);
  for (const auto& r : report.rows) {
    out << r.sample_id << ',' << to_string(r.method) << ',' << r.temperature << ','
        << r.exact_energy << ',' << r.mc_energy << ',' << r.std_error << ',' << r.z << ','
        << r.two_spin_exact << ',' << r.two_spin_tanh << '\n';
  }
  out.precision(old);
}

}  // namespace eamc::campaign
