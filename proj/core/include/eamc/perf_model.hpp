#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace eamc::perf {

/// Machine parameters of the balance model: update cores per processor,
/// clock (Hz), processor count, lanes per link, per-lane bandwidth (bit/s).
struct PerfParams {
  double n_p = 2000;
  double f = 200e6;
  double processors = 16;
  double n_l = 8;
  double f_c = 15 * 200e6;

  /// Builds params from the bandwidth-to-clock ratio f_c/f.
  static PerfParams with_ratio(double n_p, double f, double processors, double n_l,
                               double fc_over_f);
  double bandwidth_ratio() const noexcept { return f_c / f; }
  /// Throws InvalidArgument unless every field is finite and > 0.
  void validate() const;
};

/// 1 / (n_p f): time to process one spin on one processor.
double t_spin(const PerfParams& p);
/// 1 / (n_p f P): aggregated spin update time.
double t_global(const PerfParams& p);
/// L^3 / (P n_p f): time for one processor to sweep its slab.
double t_lat(const PerfParams& p, double side);
/// L^2 / (n_l f_c): time to ship one face (one bit per site).
double t_dat(const PerfParams& p, double side);

/// t_lat >= t_dat, evaluated as L * n_l * (f_c/f) >= n_p * P.
bool balanced(const PerfParams& p, std::uint64_t side);

/// Smallest integer L with balanced(p, L); the ceiling of n_p P / (n_l f_c/f).
std::uint64_t balance_crossover(const PerfParams& p);

struct BalanceRow {
  std::uint64_t side = 0;
  double t_lat = 0.0;
  double t_dat = 0.0;
  bool balanced = false;
  bool crossover = false;
};

std::vector<BalanceRow> balance_table(const PerfParams& p, std::uint64_t side_min,
                                      std::uint64_t side_max, std::uint64_t step = 1);

/// CSV "L,t_lat_s,t_dat_s,t_lat_ps,t_dat_ps,ratio,balanced,crossover".
void write_balance_csv(std::ostream& out, const std::vector<BalanceRow>& rows);

/// Unsigned 128-bit count with overflow detection.
__extension__ typedef unsigned __int128 Count;
std::string to_string(Count v);

struct CampaignBudget {
  Count spin_updates = 0;
  double wall_seconds = 0.0;  // spin_updates * gut
};

/// N_T * L^3 * N_MCS * N_samples spin updates. Throws InvalidArgument if the
/// product does not fit in 128 bits.
Count campaign_spin_updates(std::uint64_t temperatures, std::uint64_t side,
                            std::uint64_t sweeps, std::uint64_t samples);
CampaignBudget campaign_budget(std::uint64_t temperatures, std::uint64_t side,
                               std::uint64_t sweeps, std::uint64_t samples, double gut_seconds);

/// Timing summary of a finished run.
struct ThroughputReport {
  double wall_seconds = 0.0;
  std::uint64_t sweeps = 0;
  std::uint64_t sites = 0;
  std::uint64_t width = 1;
  double sut = 0.0;  // seconds per spin update of one sample
  double gut = 0.0;  // sut / W

  double sut_ps() const noexcept { return sut * 1e12; }
  double gut_ps() const noexcept { return gut * 1e12; }
  /// Energy per flip estimate: configured watts times sut.
  double energy_per_flip(double watts) const noexcept { return watts * sut; }
};

ThroughputReport measure_throughput(double wall_seconds, std::uint64_t sweeps,
                                    std::uint64_t sites, std::uint64_t width);

/// Published reference rows for 64^3 lattices (ps/flip).
struct ReferenceSystem {
  const char* name;
  int year;
  double watts;
  double sut_ps;
  double energy_nj;
};
const std::vector<ReferenceSystem>& reference_systems();

}  // namespace eamc::perf
