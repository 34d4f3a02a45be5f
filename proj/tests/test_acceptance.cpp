#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "eamc/acceptance.hpp"
#include "eamc/error.hpp"

using namespace eamc;

TEST(FixedPoint, FloorOfScaledProbability) {
  // floor(2^32 * e^-2), evaluated independently with 50-digit arithmetic.
  EXPECT_EQ(fixed_point_threshold(std::exp(-2.0L)).value, 581260615u);
  EXPECT_EQ(fixed_point_threshold(0.5L).value, 2147483648u);
  EXPECT_EQ(fixed_point_threshold(0.0L).value, 0u);
  EXPECT_FALSE(fixed_point_threshold(0.999L).always);
  EXPECT_TRUE(fixed_point_threshold(1.0L).always);
}

TEST(Threshold, StrictComparison) {
  const Threshold t{100, false};
  EXPECT_TRUE(t.accepts(99));
  EXPECT_FALSE(t.accepts(100));
  const Threshold never{0, false};
  EXPECT_FALSE(never.accepts(0));
  const Threshold always{0, true};
  EXPECT_TRUE(always.accepts(0xFFFFFFFFu));
}

TEST(AcceptanceTable, DeltaEAndThresholds) {
  const double beta = 0.5;
  const AcceptanceTable t(beta);
  for (int n = 0; n <= 6; ++n) {
    const int key = AcceptanceTable::key(n, false);
    EXPECT_EQ(t.delta_e(key), 4.0 * n - 12.0 - 0.0);
    if (4 * n - 12 <= 0) {
      EXPECT_TRUE(t.entry(key).always) << n;
    } else {
      const long double p = std::exp(-static_cast<long double>(beta) * (4 * n - 12));
      EXPECT_EQ(t.entry(key).value, static_cast<std::uint32_t>(std::floor(std::ldexp(p, 32))));
    }
  }
  EXPECT_EQ(t.entry(4, false).value, 581260615u);  // beta * dE = 2
}

TEST(AcceptanceTable, FieldShiftsByTwoH) {
  const auto h = FieldStrength::from_value(0.75);
  const AcceptanceTable t(1.0, h);
  // aligned: h_i S_i = +h, flipping costs +2h
  EXPECT_DOUBLE_EQ(t.delta_e(AcceptanceTable::key(3, true)), 1.5);
  EXPECT_DOUBLE_EQ(t.delta_e(AcceptanceTable::key(3, false)), -1.5);
  EXPECT_EQ(t.entry(3, true).value,
            static_cast<std::uint32_t>(std::floor(std::ldexp(std::exp(-1.5L), 32))));
  EXPECT_TRUE(t.entry(3, false).always);
  for (int k = 0; k < AcceptanceTable::key_count; ++k) EXPECT_TRUE(t.reachable(k));
  const AcceptanceTable no_field(1.0);
  EXPECT_FALSE(no_field.reachable(AcceptanceTable::key(2, true)));
}

TEST(AcceptanceTable, LimitingTemperatures) {
  const AcceptanceTable hot(0.0);
  for (int k = 0; k < AcceptanceTable::key_count; ++k) EXPECT_TRUE(hot.entry(k).always);
  const AcceptanceTable cold(std::numeric_limits<double>::infinity());
  EXPECT_EQ(cold.entry(4, false).value, 0u);
  EXPECT_FALSE(cold.entry(4, false).always);
  EXPECT_TRUE(cold.entry(3, false).always);  // dE = 0
  EXPECT_THROW(AcceptanceTable(-1.0), InvalidArgument);
  EXPECT_THROW(AcceptanceTable(std::nan("")), InvalidArgument);
}

TEST(HeatBathTable, LogisticProbabilities) {
  const double beta = 0.8;
  const HeatBathTable t(beta, FieldStrength::from_value(0.5));
  for (int m = 0; m <= 6; ++m) {
    for (int b = 0; b <= 1; ++b) {
      const int key = HeatBathTable::key(m, b);
      const double hloc = 2.0 * m - 6.0 + (b ? 0.5 : -0.5);
      EXPECT_DOUBLE_EQ(t.local_field(key), hloc);
      const double p = 1.0 / (1.0 + std::exp(-2.0 * beta * hloc));
      EXPECT_NEAR(t.probability(key), p, 1e-15);
      EXPECT_NEAR(std::ldexp(static_cast<double>(t.entry(key).value), -32), p, 1e-9);
    }
  }
  const HeatBathTable hot(0.0);
  EXPECT_EQ(hot.entry(HeatBathTable::key(6, 0)).value, 2147483648u);
}
