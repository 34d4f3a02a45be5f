// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Each check is self-contained and uses fixed seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eamc/bitsliced.hpp"
#include "eamc/campaign/bench.hpp"
#include "eamc/campaign/checkpoint.hpp"
#include "eamc/campaign/oracle.hpp"
#include "eamc/campaign/runner.hpp"
#include "eamc/energy.hpp"
#include "eamc/engine.hpp"
#include "eamc/mixing.hpp"
#include "eamc/observables.hpp"
#include "eamc/partition.hpp"
#include "eamc/perf_model.hpp"
#include "eamc/tempering.hpp"
#include "reference.hpp"

using namespace eamc;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool close_rel(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// Survival function of the chi-square distribution with an even number of
// degrees of freedom k: exp(-x/2) * sum_{i<k/2} (x/2)^i / i!.
double chi2_sf_even(double x, int k) {
  double term = 1.0, sum = 1.0;
  for (int i = 1; i < k / 2; ++i) {
    term *= (x / 2.0) / i;
    sum += term;
  }
  return std::exp(-x / 2.0) * sum;
}

// Mean and batch-means standard error.
std::pair<double, double> batch_mean(const std::vector<double>& xs, std::size_t batches) {
  const std::size_t per = xs.size() / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0;
    for (std::size_t k = 0; k < per; ++k) s += xs[b * per + k];
    means.push_back(s / per);
  }
  double m = 0;
  for (double v : means) m += v;
  m /= batches;
  double var = 0;
  for (double v : means) var += (v - m) * (v - m);
  var /= (batches - 1);
  return {m, std::sqrt(var / batches)};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("eamc-acceptance-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict boltzmann() {
  std::vector<Sample> samples;
  for (std::uint64_t i = 0; i < 5; ++i) {
    samples.push_back(Sample::generate(LatticeGeometry(2), i, derive_seed(101, SeedTag::couplings, i)));
  }
  samples.push_back(Sample::generate(LatticeGeometry(2, 2, 4), 5, derive_seed(101, SeedTag::couplings, 5)));

  campaign::OracleSettings s;
  s.methods = {campaign::OracleMethod::metropolis, campaign::OracleMethod::heatbath,
               campaign::OracleMethod::tempering};
  s.sweeps = 10'000'000;
  s.thermalization = 1000;
  s.batches = 100;
  s.n_pt = 10;
  s.seed = 31;
  const auto report = campaign::run_oracle(samples, {1.0, 1.5, 2.5}, s);

  double worst[3] = {0, 0, 0};
  for (const auto& row : report.rows) {
    auto& w = worst[static_cast<int>(row.method)];
    w = std::max(w, std::abs(row.z));
  }
  return {report.passed() && report.rows.size() == 6 * 3 * 3,
          fmt("%zu points, max|z| metropolis %.2f heat-bath %.2f tempering %.2f (limit 4)",
              report.rows.size(), worst[0], worst[1], worst[2])};
}

Verdict bitsliced_equivalence() {
  const LatticeGeometry g(8);
  constexpr std::size_t width = 64;
  std::vector<Sample> samples;
  for (std::size_t w = 0; w < width; ++w) samples.push_back(Sample::generate(g, w, 500 + w));
  const auto packed = PackedCouplings::pack(samples);
  auto config = SpinConfiguration::random(g, width, 9);
  std::vector<SpinConfiguration> lanes;
  std::vector<ParisiRapuano> replay;
  for (std::size_t w = 0; w < width; ++w) {
    lanes.push_back(config.extract_lane(w));
    replay.emplace_back(2718);
  }
  ParisiRapuano shared(2718);
  const AcceptanceTable table(1.0 / 1.1);
  for (int t = 0; t < 10'000; ++t) {
    metropolis_sweep_bitsliced(packed, config, table, SweepRandom::sequential(shared));
  }
  std::size_t identical = 0;
  for (std::size_t w = 0; w < width; ++w) {
    for (int t = 0; t < 10'000; ++t) {
      metropolis_sweep_scalar(samples[w], lanes[w], table, SweepRandom::sequential(replay[w]));
    }
    if (config.extract_lane(w) == lanes[w] && replay[w] == shared) ++identical;
  }
  return {identical == width, fmt("%zu/%zu lanes identical after 10^4 sweeps", identical, width)};
}

Verdict acceptance_statistics() {
  const double beta = 0.6;
  const auto sample = Sample::generate(LatticeGeometry(4), 0, 77);
  auto config = SpinConfiguration::random(sample.geometry(), 1, 78);
  const AcceptanceTable table(beta);
  ParisiRapuano rng(79);
  FlipStats stats;
  for (int t = 0; t < 1'000'000; ++t) {
    stats.merge(metropolis_sweep_scalar(sample, config, table, SweepRandom::sequential(rng)));
  }
  bool ok = true;
  std::string detail;
  for (int n = 0; n <= 6; ++n) {
    const int key = AcceptanceTable::key(n, false);
    const double de = table.delta_e(key);
    if (de <= 0) continue;
    const auto& bin = stats.bins[static_cast<std::size_t>(key)];
    const double p = std::exp(-beta * de);
    const double rate = static_cast<double>(bin.accepts) / static_cast<double>(bin.attempts);
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(bin.attempts));
    const double dev = (rate - p) / sigma;
    ok = ok && bin.attempts > 0 && std::abs(dev) <= 3.0;
    detail += fmt("dE=%g: %.6g vs %.6g (%+.2f sigma, n=%llu); ", de, rate, p, dev,
                  static_cast<unsigned long long>(bin.attempts));
  }
  return {ok, detail};
}

Verdict degenerate_ladder() {
  constexpr std::size_t nt = 5;
  constexpr int passes = 10'000;
  const auto sample = Sample::generate(LatticeGeometry(4), 0, 12);
  std::vector<SpinConfiguration> configs;
  std::vector<ChainRng> rngs;
  for (std::size_t r = 0; r < nt; ++r) {
    configs.push_back(SpinConfiguration::random(sample.geometry(), 1, 40 + r));
    rngs.push_back(ChainRng::parisi_rapuano(60 + r));
  }
  ReplicaSet set(sample, std::move(configs), std::move(rngs));
  const auto ladder = TemperatureLadder::diagnostic(std::vector<double>(nt, 1.3), 1);
  std::vector<SlotTables> tables;
  for (double t : ladder.temperatures()) tables.emplace_back(t, sample.field());
  ParisiRapuano swap_rng(8);

  std::vector<std::vector<double>> occupancy(nt, std::vector<double>(nt, 0.0));
  for (int p = 0; p < passes; ++p) {
    pt_block(sample, set, ladder, tables, EngineSpec{}, swap_rng);
    for (std::size_t r = 0; r < nt; ++r) occupancy[r][set.slot_of(r)] += 1;
  }
  bool all_accepted = true;
  for (const auto& s : set.pair_stats()) all_accepted = all_accepted && s.attempts == passes && s.accepts == s.attempts;

  double min_p = 1.0;
  const double expected = static_cast<double>(passes) / nt;
  for (const auto& row : occupancy) {
    double chi2 = 0;
    for (double c : row) chi2 += (c - expected) * (c - expected) / expected;
    min_p = std::min(min_p, chi2_sf_even(chi2, static_cast<int>(nt) - 1));
  }
  return {all_accepted && min_p > 0.01,
          fmt("swap acceptance %s, min chi-square p over replicas %.4f", all_accepted ? "100%" : "<100%", min_p)};
}

Verdict tuning() {
  const auto sample = Sample::generate(LatticeGeometry(8), 0, derive_seed(7, SeedTag::couplings, 0));
  TuneBudget budget;
  budget.max_iterations = 30;
  budget.thermalization_blocks = 2000;
  budget.measurement_blocks = 2000;
  const auto r = tune_ladder(sample, 0.9, 1.6, 8, 0.10, budget, 11);
  const double lo = *std::min_element(r.acceptances.begin(), r.acceptances.end());
  const double hi = *std::max_element(r.acceptances.begin(), r.acceptances.end());
  return {lo >= 0.05 && lo <= 0.20,
          fmt("min pair acceptance %.3f, max %.3f after %zu iterations (converged %s, over target %s)",
              lo, hi, r.iterations, r.converged ? "yes" : "no", r.over_target ? "yes" : "no")};
}

Verdict partition_equivalence() {
  const LatticeGeometry g(16);
  const auto sample = Sample::generate(g, 0, 404);
  const double temperature = 2.0;
  const AcceptanceTable table(1.0 / temperature);
  const auto start = SpinConfiguration::random(g, 1, 405);

  // Site-keyed: bit-identical final configurations.
  const SiteKeyedStream stream(406);
  std::vector<SpinConfiguration> finals;
  for (std::size_t p : {1u, 2u, 4u, 8u}) {
    auto c = start;
    partitioned_sweeps(sample, c, SlabLayout::make(g, p), table, PartitionRandom::site_keyed(stream), 0, 1000);
    finals.push_back(std::move(c));
  }
  const bool identical = std::all_of(finals.begin(), finals.end(), [&](const auto& c) { return c == finals[0]; });

  // Per-slab streams: statistically equivalent <E>.
  constexpr int thermal = 500, chunks = 400, chunk = 5;
  std::vector<std::pair<double, double>> est;
  for (std::size_t p : {1u, 2u, 4u, 8u}) {
    auto c = start;
    auto streams = slab_streams(407 + p, p);
    const auto layout = SlabLayout::make(g, p);
    partitioned_sweeps(sample, c, layout, table, PartitionRandom::per_slab(streams), 0, thermal);
    std::vector<double> es;
    for (int k = 0; k < chunks; ++k) {
      partitioned_sweeps(sample, c, layout, table, PartitionRandom::per_slab(streams),
                         thermal + static_cast<std::uint64_t>(k) * chunk, chunk);
      es.push_back(energy(sample, c) / static_cast<double>(g.size()));
    }
    est.push_back(batch_mean(es, 20));
  }
  double worst = 0;
  for (std::size_t i = 1; i < est.size(); ++i) {
    const double s = std::sqrt(est[i].second * est[i].second + est[0].second * est[0].second);
    worst = std::max(worst, std::abs(est[i].first - est[0].first) / s);
  }
  return {identical && worst <= 3.0,
          fmt("site-keyed P=1,2,4,8 %s; per-slab e/N P=1 %.5f+-%.5f, max deviation %.2f sigma",
              identical ? "identical" : "DIFFER", est[0].first, est[0].second, worst)};
}

Verdict perf_values() {
  using namespace perf;
  const auto a = PerfParams::with_ratio(2000, 200e6, 16, 8, 15);
  const auto b = PerfParams::with_ratio(2000, 250e6, 16, 8, 15);
  const double ts = t_spin(a), tg = t_global(b), tl = t_lat(b, 500);
  const auto cross = balance_crossover(a);
  const bool ok = close_rel(ts, 2.5e-12) && close_rel(tg, 0.125e-12) && tl >= 15e-6 && tl <= 16e-6 && cross == 267;
  return {ok, fmt("t_spin %.6g ps, t_global %.6g ps, t_lat(500) %.6g us, crossover L=%llu", ts * 1e12,
                  tg * 1e12, tl * 1e6, static_cast<unsigned long long>(cross))};
}

Verdict budget() {
  const auto n = perf::campaign_spin_updates(1, 100, 1'000'000'000'000ULL, 100);
  perf::Count expected = 1;
  for (int i = 0; i < 20; ++i) expected *= 10;
  return {n == expected, "spin updates " + perf::to_string(n)};
}

Verdict bench() {
  campaign::BenchSpec spec;
  spec.engine = EngineKind::bitsliced;
  spec.side = 64;
  spec.width = 64;
  spec.seconds = 3.0;
  const auto report = campaign::run_bench(spec);
  campaign::write_bench_report(std::cout, report);
  const double gut = report.throughput.gut_ps();
  return {gut <= 1000.0, fmt("GUT %.1f ps/flip, SUT %.1f ps (gate 1000 ps)", gut, report.throughput.sut_ps())};
}

Verdict checkpoint_resume() {
  const auto full = scratch("full"), cut = scratch("cut");
  campaign::CampaignConfig c;
  c.side = 4;
  c.samples = 2;
  c.temperatures = {0.9, 1.3, 2.0};
  c.n_pt = 5;
  c.partitions = 2;
  c.rng_mode = RngMode::parisi_rapuano;
  c.seed = 99;
  c.sweeps = 2000;
  c.checkpoint_interval = 600;
  c.output = full.string();
  campaign::run_campaign(c);

  campaign::RunOptions halt;
  halt.output = cut.string();
  halt.halt_after = 1500;
  campaign::run_campaign(c, halt);
  campaign::resume_campaign((cut / campaign::checkpoint_file).string(), {}, c);

  std::size_t same = 0, total = 0;
  for (const char* f : {campaign::measurements_file, campaign::c4_file, campaign::trace_file,
                        campaign::flip_stats_file, campaign::checkpoint_file}) {
    ++total;
    if (fs::exists(full / f) && slurp(full / f) == slurp(cut / f)) ++same;
  }
  fs::remove_all(full);
  fs::remove_all(cut);
  return {same == total, fmt("%zu/%zu output files byte-identical (halted at 1500, checkpoint 1200)", same, total)};
}

Verdict xi_machinery() {
  bool ok = true;
  double worst = 0;
  std::mt19937_64 rng(2);
  for (auto [lx, ly, lz] : {std::tuple{8, 8, 8}, {16, 16, 16}, {4, 6, 8}}) {
    const LatticeGeometry g(lx, ly, lz);
    const ref::Lattice lat{g.lx(), g.ly(), g.lz()};
    std::vector<std::int8_t> q(g.size());
    std::vector<int> qi(g.size());
    int cur = 1;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (rng() % 4 == 0) cur = -cur;
      q[i] = static_cast<std::int8_t>(cur);
      qi[i] = cur;
    }
    const auto prof = correlation_from_field(g, q);
    const auto c4 = ref::c4(lat, qi);
    for (std::size_t r = 0; r < c4.size(); ++r) {
      const double d = std::abs(prof.c4[r] - c4[r]) / std::max(1.0, std::abs(c4[r]));
      worst = std::max(worst, d);
    }
    const double xi = ref::xi(c4);
    worst = std::max(worst, std::abs(prof.xi - xi) / std::max(1.0, xi));
  }
  ok = ok && worst <= 1e-12;

  bool guard_ok = true;
  for (std::size_t side : {7u, 8u, 13u, 14u, 32u}) {
    for (int k = 0; k <= 400; ++k) {
      const double xi = k * 0.025;
      guard_ok = guard_ok && ((guard_nonequilibrium(xi, side) == Guard::warning) == (7.0 * xi > side));
    }
    const double edge = static_cast<double>(side) / 7.0;
    guard_ok = guard_ok && guard_nonequilibrium(std::nextafter(edge, 0.0), side) == Guard::ok;
    guard_ok = guard_ok && guard_nonequilibrium(std::nextafter(edge, 1e9), side) == Guard::warning;
  }
  ok = ok && guard_ok;

  std::mt19937_64 nrng(5);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<XiPoint> series;
  for (int k = 0; k < 24; ++k) {
    const double t = std::pow(2.0, k);
    series.push_back({t, 1.7 * std::pow(t, 0.1) * std::exp(noise(nrng)), Guard::ok});
  }
  const auto fit = xi_growth_fit(series, 0.8);
  ok = ok && std::abs(fit.inverse_z - 0.1) <= 0.01;
  return {ok, fmt("max relative deviation %.2e, guard %s, fitted exponent %.4f", worst,
                  guard_ok ? "exact" : "WRONG", fit.inverse_z)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Boltzmann correctness against exact enumeration", boltzmann},
      {2, "bit-sliced lanes equal scalar replay", bitsliced_equivalence},
      {3, "Metropolis acceptance per energy bin", acceptance_statistics},
      {4, "degenerate tempering ladder", degenerate_ladder},
      {5, "tempering ladder tuning", tuning},
      {6, "partition equivalence", partition_equivalence},
      {7, "performance model values", perf_values},
      {8, "campaign budget", budget},
      {9, "benchmark throughput", bench},
      {10, "checkpoint and resume", checkpoint_resume},
      {11, "correlation length machinery", xi_machinery},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
