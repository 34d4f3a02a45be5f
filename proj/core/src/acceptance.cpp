#include "eamc/acceptance.hpp"

#include <cmath>
#include <limits>

#include "eamc/error.hpp"

namespace eamc {

namespace {

void check_beta(double beta) {
  if (std::isnan(beta) || beta < 0.0) {
    throw InvalidArgument("inverse temperature must be >= 0");
  }
}

constexpr long double kTwo32 = 4294967296.0L;

}  // namespace

Threshold fixed_point_threshold(long double p) noexcept {
  if (!(p < 1.0L)) return Threshold{0, true};
  if (!(p > 0.0L)) return Threshold{0, false};
  const long double scaled = std::floor(p * kTwo32);
  return Threshold{static_cast<std::uint32_t>(scaled), false};
}

AcceptanceTable::AcceptanceTable(double beta, FieldStrength field)
    : beta_(beta), field_(field) {
  check_beta(beta);
  for (int k = 0; k < key_count; ++k) {
    const std::int64_t dq = delta_e_quarters(k);
    if (dq <= 0 || beta == 0.0) {
      entries_[static_cast<std::size_t>(k)] = Threshold{0, true};
    } else if (std::isinf(beta)) {
      entries_[static_cast<std::size_t>(k)] = Threshold{0, false};
    } else {
      const long double de = static_cast<long double>(dq) / 4.0L;
      entries_[static_cast<std::size_t>(k)] =
          fixed_point_threshold(std::exp(-static_cast<long double>(beta) * de));
    }
  }
}

std::int64_t AcceptanceTable::delta_e_quarters(int key) const noexcept {
  const int n_sat = key / 2;
  const bool aligned = (key & 1) != 0;
  const std::int64_t h2 = 2 * static_cast<std::int64_t>(field_.quarters());
  return 4 * (4 * n_sat - 12) + (aligned ? h2 : -h2);
}

HeatBathTable::HeatBathTable(double beta, FieldStrength field) : beta_(beta), field_(field) {
  check_beta(beta);
  for (int k = 0; k < key_count; ++k) {
    const double hl = local_field(k);
    Threshold t;
    if (beta == 0.0 || hl == 0.0) {
      t = fixed_point_threshold(0.5L);
    } else if (std::isinf(beta)) {
      t = hl > 0 ? Threshold{0, true} : Threshold{0, false};
    } else {
      const long double x = -2.0L * static_cast<long double>(beta) * hl;
      t = fixed_point_threshold(1.0L / (1.0L + std::exp(x)));
    }
    entries_[static_cast<std::size_t>(k)] = t;
  }
}

double HeatBathTable::local_field(int key) const noexcept {
  const int m = key / 2;
  const int b = key & 1;
  return 2.0 * m - 6.0 + (b ? field_.value() : -field_.value());
}

double HeatBathTable::probability(int key) const noexcept {
  const double hl = local_field(key);
  if (beta_ == 0.0 || hl == 0.0) return 0.5;
  if (std::isinf(beta_)) return hl > 0 ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp(-2.0 * beta_ * hl));
}

}  // namespace eamc
