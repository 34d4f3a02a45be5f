// eamc: command-line front end for spin-glass campaigns.
//
// Exit codes: 0 success, 1 other failure, 2 configuration error,
// 3 oracle z-score failure, 4 protocol or internal invariant violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <cstdio>
#include <optional>

#include "eamc/campaign/bench.hpp"
#include "eamc/campaign/checkpoint.hpp"
#include "eamc/campaign/config.hpp"
#include "eamc/campaign/oracle.hpp"
#include "eamc/campaign/runner.hpp"
#include "eamc/error.hpp"
#include "eamc/perf_model.hpp"

namespace {

namespace cmp = eamc::campaign;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;
constexpr int kExitInvariant = 4;

struct Common {
  std::string config;
  std::string resume;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::optional<std::uint64_t> halt_after;
};

cmp::RunOptions run_options(const Common& c) {
  cmp::RunOptions o;
  o.seed = c.seed;
  o.workers = c.workers;
  o.output = c.out;
  o.halt_after = c.halt_after;
  return o;
}

int cmd_run(const Common& c) {
  cmp::RunSummary s;
  if (!c.resume.empty()) {
    std::optional<cmp::CampaignConfig> expected;
    if (!c.config.empty()) expected = cmp::load_config(c.config);
    s = cmp::resume_campaign(c.resume, run_options(c), expected);
  } else {
    if (c.config.empty()) throw eamc::ConfigError("--config", "run needs --config or --resume");
    s = cmp::run_campaign(cmp::load_config(c.config), run_options(c));
  }
  std::cout << (s.completed ? "completed" : "halted") << " at sweep " << s.sweeps_done << ", "
            << s.records << " measurement records in " << s.output_dir << "\n";
  return s.completed ? 0 : kExitFailure;
}

int cmd_oracle(const Common& c) {
  if (c.config.empty()) throw eamc::ConfigError("--config", "oracle needs --config");
  cmp::RunOptions o = run_options(c);
  o.output.reset();
  const auto config = cmp::apply_overrides(cmp::load_config(c.config), o);
  const auto report = cmp::run_oracle(config);
  cmp::write_oracle_csv(std::cout, report);
  if (c.out) {
    std::ofstream f(*c.out);
    if (!f) throw eamc::Error("cannot write '" + *c.out + "'");
    cmp::write_oracle_csv(f, report);
  }
  std::cerr << "max |z| = " << report.max_abs_z() << (report.passed() ? " (pass)" : " (FAIL)")
            << "\n";
  return report.passed() ? 0 : kExitOracle;
}

int cmd_bench(const cmp::BenchSpec& spec, const std::string& engine) {
  cmp::BenchSpec s = spec;
  if (engine == "bitsliced") {
    s.engine = eamc::EngineKind::bitsliced;
  } else if (engine == "metropolis") {
    s.engine = eamc::EngineKind::metropolis;
  } else if (engine == "heatbath") {
    s.engine = eamc::EngineKind::heatbath;
  } else {
    throw eamc::ConfigError("--engine", "unknown engine '" + engine + "'");
  }
  if (s.engine != eamc::EngineKind::bitsliced) s.width = 1;
  cmp::write_bench_report(std::cout, cmp::run_bench(s));
  return 0;
}

struct PerfArgs {
  double n_p = 2000;
  double f = 200e6;
  double processors = 16;
  double n_l = 8;
  double ratio = 15;
  std::uint64_t l_min = 100;
  std::uint64_t l_max = 600;
  std::uint64_t step = 1;
  std::string csv;
};

int cmd_perf(const PerfArgs& a) {
  const auto p = eamc::perf::PerfParams::with_ratio(a.n_p, a.f, a.processors, a.n_l, a.ratio);
  p.validate();
  const auto rows = eamc::perf::balance_table(p, a.l_min, a.l_max, a.step);
  std::cout << "quantity,value\n";
  std::cout << "t_spin_ps," << eamc::perf::t_spin(p) * 1e12 << "\n";
  std::cout << "t_global_ps," << eamc::perf::t_global(p) * 1e12 << "\n";
  std::cout << "balance_crossover_L," << eamc::perf::balance_crossover(p) << "\n\n";
  eamc::perf::write_balance_csv(std::cout, rows);
  if (!a.csv.empty()) {
    std::ofstream f(a.csv);
    if (!f) throw eamc::Error("cannot write '" + a.csv + "'");
    eamc::perf::write_balance_csv(f, rows);
  }
  return 0;
}

int cmd_inspect(const std::string& path) {
  const auto h = cmp::read_checkpoint_header(path);
  nlohmann::ordered_json j;
  j["version"] = h.version;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(h.config_hash));
  j["config_hash"] = hash;
  j["sweep"] = h.sweep;
  j["temperatures"] = h.temperatures;
  j["offsets"] = {{"measurements", h.offsets.measurements},
                  {"c4", h.offsets.c4},
                  {"trace", h.offsets.trace}};
  j["config"] = h.config_text;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edwards-Anderson spin-glass Monte Carlo campaigns"};
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "campaign config (YAML)");
    sub->add_option("--seed", common.seed, "override the master seed");
    sub->add_option("--workers", common.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", common.out, "output directory (run) or report file (oracle)");
  };

  auto* run = app.add_subcommand("run", "run or resume a campaign");
  add_common(run);
  run->add_option("--resume", common.resume, "checkpoint to resume from");
  run->add_option("--halt-after", common.halt_after)->group("");

  auto* oracle = app.add_subcommand("oracle", "exact enumeration versus Monte Carlo");
  add_common(oracle);

  cmp::BenchSpec bench_spec;
  std::string bench_engine = "bitsliced";
  auto* bench = app.add_subcommand("bench", "timed sweep throughput");
  bench->add_option("--engine", bench_engine, "bitsliced | metropolis | heatbath");
  bench->add_option("-L,--side", bench_spec.side, "lattice side");
  bench->add_option("-W,--width", bench_spec.width, "bit-sliced lanes (1..64)");
  bench->add_option("--seconds", bench_spec.seconds, "timed duration");
  bench->add_option("--warmup", bench_spec.warmup_seconds, "untimed warmup");
  bench->add_option("-T,--temperature", bench_spec.temperature, "temperature");
  bench->add_option("--seed", bench_spec.seed, "seed");

  PerfArgs perf;
  auto* perf_cmd = app.add_subcommand("perf", "analytic performance model tables");
  perf_cmd->add_option("--np", perf.n_p, "update engines per processor");
  perf_cmd->add_option("--freq", perf.f, "clock frequency (Hz)");
  perf_cmd->add_option("--processors", perf.processors, "processor count P");
  perf_cmd->add_option("--lanes", perf.n_l, "link lanes n_l");
  perf_cmd->add_option("--ratio", perf.ratio, "link clock over core clock");
  perf_cmd->add_option("--lmin", perf.l_min, "smallest L");
  perf_cmd->add_option("--lmax", perf.l_max, "largest L");
  perf_cmd->add_option("--step", perf.step, "L step");
  perf_cmd->add_option("--csv", perf.csv, "also write the balance table here");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "dump a checkpoint header");
  inspect->add_option("checkpoint", inspect_path, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(common);
    if (*oracle) return cmd_oracle(common);
    if (*bench) return cmd_bench(bench_spec, bench_engine);
    if (*perf_cmd) return cmd_perf(perf);
    if (*inspect) return cmd_inspect(inspect_path);
  } catch (const eamc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const eamc::ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const eamc::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const eamc::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
