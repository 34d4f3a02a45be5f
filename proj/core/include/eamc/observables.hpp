#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "eamc/spin_config.hpp"

namespace eamc {

/// q = (1/N) sum_i S_i^a S_i^b for one lane of two configurations.
double overlap(const SpinConfiguration& a, const SpinConfiguration& b, std::size_t lane = 0);

/// q_i = S_i^a S_i^b as +/-1 values.
std::vector<std::int8_t> overlap_field(const SpinConfiguration& a, const SpinConfiguration& b,
                                       std::size_t lane = 0);

/// Spatial correlation of the overlap field. c4[r] for r = 0 .. Lmin/2 is the
/// average over sites and the three axes of q_i q_{i+r e}; xi is the clipped
/// first-moment estimate
///
///   xi = sum_{r>=1} r * max(c4[r], 0) / sum_{r>=1} max(c4[r], 0)
///
/// (0 when the denominator vanishes).
struct CorrelationProfile {
  std::vector<double> c4;
  double xi = 0.0;
  std::uint64_t t = 0;
};

CorrelationProfile correlation_from_field(const LatticeGeometry& geometry,
                                          std::span<const std::int8_t> q);
CorrelationProfile correlation_and_xi(const SpinConfiguration& a, const SpinConfiguration& b,
                                      std::size_t lane = 0, std::uint64_t t = 0);
double xi_estimate(std::span<const double> c4);

/// CSV rows "sample_id,T,t,r,c4".
void write_c4_csv(std::ostream& out, const CorrelationProfile& profile, std::uint64_t sample_id,
                  double temperature, bool header);

enum class Guard : std::uint8_t { ok = 0, warning = 1 };

/// Non-equilibrium finite-size guard: warning iff 7*xi > L.
Guard guard_nonequilibrium(double xi, std::size_t side);
const char* to_string(Guard g) noexcept;

inline constexpr double critical_temperature = 1.109;
inline constexpr double dynamic_exponent_at_tc = 6.86;

/// z(T) ~ 6.86 * Tc / T.
double predicted_dynamic_exponent(double temperature);

struct XiPoint {
  double t = 0.0;
  double xi = 0.0;
  Guard guard = Guard::ok;
};

struct XiFit {
  double inverse_z = 0.0;  // slope of log xi against log t
  double z = 0.0;
  double log_amplitude = 0.0;
  double predicted_z = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log xi = log A + (1/z) log t. Refused (InvalidArgument)
/// with fewer than 10 points, non-positive values or any guard warning.
XiFit xi_growth_fit(std::span<const XiPoint> series, double temperature);

}  // namespace eamc
