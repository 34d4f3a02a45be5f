#include "eamc/perf_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "eamc/error.hpp"

namespace eamc::perf {

PerfParams PerfParams::with_ratio(double n_p, double f, double processors, double n_l,
                                  double fc_over_f) {
  PerfParams p{n_p, f, processors, n_l, fc_over_f * f};
  p.validate();
  return p;
}

void PerfParams::validate() const {
  for (double v : {n_p, f, processors, n_l, f_c}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("performance parameters must be finite and > 0");
    }
  }
}

double t_spin(const PerfParams& p) {
  p.validate();
  return 1.0 / (p.n_p * p.f);
}

double t_global(const PerfParams& p) {
  p.validate();
  return 1.0 / (p.n_p * p.f * p.processors);
}

double t_lat(const PerfParams& p, double side) {
  p.validate();
  if (!(side > 0.0)) throw InvalidArgument("lattice side must be > 0");
  return side * side * side / (p.processors * p.n_p * p.f);
}

double t_dat(const PerfParams& p, double side) {
  p.validate();
  if (!(side > 0.0)) throw InvalidArgument("lattice side must be > 0");
  return side * side / (p.n_l * p.f_c);
}

bool balanced(const PerfParams& p, std::uint64_t side) {
  p.validate();
  return static_cast<double>(side) * p.n_l * p.bandwidth_ratio() >= p.n_p * p.processors;
}

std::uint64_t balance_crossover(const PerfParams& p) {
  p.validate();
  const double exact = p.n_p * p.processors / (p.n_l * p.bandwidth_ratio());
  if (!(exact < 1e18)) throw InvalidArgument("balance crossover out of range");
  auto side = static_cast<std::uint64_t>(std::max(1.0, std::ceil(exact)));
  // Align with the predicate in case the ceiling landed one off.
  while (side > 1 && balanced(p, side - 1)) --side;
  while (!balanced(p, side)) ++side;
  return side;
}

std::vector<BalanceRow> balance_table(const PerfParams& p, std::uint64_t side_min,
                                      std::uint64_t side_max, std::uint64_t step) {
  if (side_min == 0 || side_max < side_min || step == 0) {
    throw InvalidArgument("invalid lattice size range");
  }
  const std::uint64_t cross = balance_crossover(p);
  std::vector<BalanceRow> rows;
  for (std::uint64_t l = side_min; l <= side_max; l += step) {
    BalanceRow r;
    r.side = l;
    r.t_lat = t_lat(p, static_cast<double>(l));
    r.t_dat = t_dat(p, static_cast<double>(l));
    r.balanced = balanced(p, l);
    r.crossover = l == cross;
    rows.push_back(r);
  }
  return rows;
}

void write_balance_csv(std::ostream& out, const std::vector<BalanceRow>& rows) {
  out << "L,t_lat_s,t_dat_s,t_lat_ps,t_dat_ps,ratio,balanced,crossover\n";
  const auto old = out.precision(12);
  for (const auto& r : rows) {
    out << r.side << ',' << r.t_lat << ',' << r.t_dat << ',' << r.t_lat * 1e12 << ','
        << r.t_dat * 1e12 << ',' << r.t_lat / r.t_dat << ',' << (r.balanced ? 1 : 0) << ','
        << (r.crossover ? 1 : 0) << '\n';
  }
  out.precision(old);
}

std::string to_string(Count v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

Count campaign_spin_updates(std::uint64_t temperatures, std::uint64_t side, std::uint64_t sweeps,
                            std::uint64_t samples) {
  const Count max = ~Count{0};
  Count acc = 1;
  for (const std::uint64_t f : {temperatures, side, side, side, sweeps, samples}) {
    if (f == 0) return 0;
    if (acc > max / f) throw InvalidArgument("campaign spin-update count overflows 128 bits");
    acc *= f;
  }
  return acc;
}

CampaignBudget campaign_budget(std::uint64_t temperatures, std::uint64_t side,
                               std::uint64_t sweeps, std::uint64_t samples, double gut_seconds) {
  if (!(gut_seconds >= 0.0)) throw InvalidArgument("gut must be >= 0");
  CampaignBudget b;
  b.spin_updates = campaign_spin_updates(temperatures, side, sweeps, samples);
  b.wall_seconds = static_cast<double>(static_cast<long double>(b.spin_updates) * gut_seconds);
  return b;
}

ThroughputReport measure_throughput(double wall_seconds, std::uint64_t sweeps,
                                    std::uint64_t sites, std::uint64_t width) {
  if (sweeps == 0) throw InvalidArgument("throughput needs at least one sweep");
  if (sites == 0 || width == 0) throw InvalidArgument("throughput needs sites and width > 0");
  if (!(wall_seconds > 0.0)) throw InvalidArgument("wall time must be > 0");
  ThroughputReport r;
  r.wall_seconds = wall_seconds;
  r.sweeps = sweeps;
  r.sites = sites;
  r.width = width;
  r.sut = wall_seconds / (static_cast<double>(sweeps) * static_cast<double>(sites));
  r.gut = r.sut / static_cast<double>(width);
  return r;
}

const std::vector<ReferenceSystem>& reference_systems() {
  static const std::vector<ReferenceSystem> rows = {
      {"Core 2 Duo", 2007, 150, 1000, 150},  {"CBE (16 cores)", 2007, 220, 150, 33},
      {"FPGA engine (2008)", 2008, 35, 16, 0.56},        {"C1060", 2009, 200, 720, 144},
      {"NH (8 cores)", 2009, 220, 200, 244}, {"C2050", 2010, 300, 430, 129},
      {"SB (16 cores)", 2012, 300, 60, 18},  {"K20X", 2012, 300, 230, 69},
      {"Xeon-Phi", 2013, 300, 52, 15.6},     {"FPGA engine (2013)", 2013, 25, 2, 0.05},
  };
  return rows;
}

}  // namespace eamc::perf
