#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eamc/campaign/config.hpp"
#include "eamc/sample.hpp"

namespace eamc::campaign {

enum class OracleMethod : std::uint8_t { metropolis, heatbath, tempering };
const char* to_string(OracleMethod m) noexcept;

struct OracleSettings {
  std::vector<OracleMethod> methods{OracleMethod::metropolis};
  std::uint64_t sweeps = 1000000;  // measured sweeps per point
  std::uint64_t thermalization = 1000;
  std::size_t batches = 100;
  std::uint32_t n_pt = 10;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

/// One (sample, method, T) comparison. The two-spin columns hold the exact
/// <S1 S2> of a single ferromagnetic bond next to its closed form tanh(beta).
struct OracleRow {
  std::uint64_t sample_id = 0;
  OracleMethod method = OracleMethod::metropolis;
  double temperature = 0.0;
  double exact_energy = 0.0;
  double mc_energy = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double two_spin_exact = 0.0;
  double two_spin_tanh = 0.0;
};

struct OracleReport {
  static constexpr double z_limit = 4.0;
  std::vector<OracleRow> rows;
  double max_abs_z() const noexcept;
  bool passed() const noexcept { return max_abs_z() <= z_limit; }
};

/// Exact enumeration against Monte Carlo <E> with batch-means errors. Every
/// sample must have at most max_enumeration_spins sites; tempering needs a
/// strictly increasing ladder of at least two temperatures.
OracleReport run_oracle(const std::vector<Sample>& samples, const std::vector<double>& temperatures,
                        const OracleSettings& settings);

/// Uses the config's samples, ladder and oracle budget. The configured engine
/// picks the single-temperature method; tempering is added when N_T >= 2.
OracleReport run_oracle(const CampaignConfig& config);

/// CSV "sample_id,method,T,exact_E,mc_E,stderr,z,two_spin_exact,tanh_beta".
void write_oracle_csv(std::ostream& out, const OracleReport& report);

}  // namespace eamc::campaign
