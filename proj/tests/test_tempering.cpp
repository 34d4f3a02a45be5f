#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "eamc/error.hpp"
#include "eamc/mixing.hpp"
#include "eamc/tempering.hpp"
#include "reference.hpp"

using namespace eamc;

namespace {

ReplicaSet make_set(const Sample& sample, std::size_t n, std::uint64_t seed) {
  std::vector<SpinConfiguration> configs;
  std::vector<ChainRng> rngs;
  for (std::size_t r = 0; r < n; ++r) {
    configs.push_back(SpinConfiguration::random(sample.geometry(), 1, seed * 100 + r));
    rngs.push_back(ChainRng::parisi_rapuano(seed * 1000 + r));
  }
  return ReplicaSet(sample, std::move(configs), std::move(rngs));
}

std::vector<SlotTables> tables_for(const TemperatureLadder& ladder, FieldStrength h = {}) {
  std::vector<SlotTables> t;
  for (double temp : ladder.temperatures()) t.emplace_back(temp, h);
  return t;
}

}  // namespace

TEST(Ladder, ValidatesOrdering) {
  EXPECT_THROW(TemperatureLadder({1.0, 1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(TemperatureLadder({2.0, 1.0}), InvalidArgument);
  EXPECT_THROW(TemperatureLadder(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(TemperatureLadder({1.0}, 0), InvalidArgument);
  EXPECT_NO_THROW(TemperatureLadder({1.0}));
  EXPECT_NO_THROW(TemperatureLadder::diagnostic({1.0, 1.0, 1.0}));
  const TemperatureLadder d({1.0, 2.0});
  EXPECT_EQ(d.n_pt(), 10u);
  EXPECT_DOUBLE_EQ(d.target_acceptance(), 0.10);
}

TEST(Ladder, GeometricSpacing) {
  const auto l = TemperatureLadder::geometric(0.5, 2.0, 3);
  EXPECT_DOUBLE_EQ(l.temperature(0), 0.5);
  EXPECT_NEAR(l.temperature(1), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(l.temperature(2), 2.0);
}

TEST(Swap, ProbabilityFormula) {
  EXPECT_DOUBLE_EQ(swap_probability(-10.0, -20.0, 1.0, 2.0), 1.0);
  EXPECT_NEAR(swap_probability(-20.0, -10.0, 1.0, 2.0), std::exp(-10.0 * 0.5), 1e-15);
  EXPECT_DOUBLE_EQ(swap_probability(-5.0, -5.0, 1.0, 1.0), 1.0);
}

TEST(Swap, DecisionsDependOnlyOnEnergies) {
  const TemperatureLadder ladder({0.8, 1.0, 1.3, 1.7});
  ParisiRapuano a(5), b(5);
  std::vector<std::size_t> perm{0, 1, 2, 3};
  const std::vector<double> energies{-40.0, -35.0, -36.0, -20.0};
  const auto p1 = swap_pass_energies(energies, perm, ladder, a);
  const auto p2 = swap_pass_energies(energies, perm, ladder, b);
  EXPECT_EQ(p1, p2);
  // Independent replay of the ascending pass.
  ParisiRapuano c(5);
  std::vector<std::size_t> at = perm;
  for (std::size_t s = 0; s + 1 < 4; ++s) {
    const double e_lo = energies[at[s]], e_hi = energies[at[s + 1]];
    const double p = std::min(1.0, std::exp((e_lo - e_hi) * (1.0 / ladder.temperature(s) - 1.0 / ladder.temperature(s + 1))));
    const std::uint32_t r = c.next();
    const bool acc = p >= 1.0 || r < static_cast<std::uint64_t>(std::floor(std::ldexp(p, 32)));
    if (acc) std::swap(at[s], at[s + 1]);
  }
  EXPECT_EQ(p1, at);
}

TEST(Swap, DegenerateLadderAlwaysAccepts) {
  const LatticeGeometry g(4);
  const auto sample = Sample::generate(g, 0, 1);
  auto set = make_set(sample, 5, 2);
  const auto ladder = TemperatureLadder::diagnostic({1.2, 1.2, 1.2, 1.2, 1.2}, 1);
  const auto tables = tables_for(ladder);
  ParisiRapuano swap_rng(3);
  for (int b = 0; b < 200; ++b) {
    const auto out = pt_block(sample, set, ladder, tables, EngineSpec{}, swap_rng);
    for (bool acc : out.accepted) EXPECT_TRUE(acc);
    set.check_permutation();
  }
  for (const auto& p : set.pair_stats()) EXPECT_EQ(p.accepts, p.attempts);
}

TEST(ReplicaSet, EnergyCacheTracksSweepsAndSwaps) {
  const LatticeGeometry g(4);
  const auto sample = Sample::generate(g, 0, 1, FieldStrength::from_value(0.25));
  auto set = make_set(sample, 4, 3);
  const TemperatureLadder ladder({0.7, 1.0, 1.4, 2.0}, 3);
  const auto tables = tables_for(ladder, sample.field());
  ParisiRapuano swap_rng(4);
  for (int b = 0; b < 100; ++b) pt_block(sample, set, ladder, tables, EngineSpec{}, swap_rng);
  EXPECT_NO_THROW(set.verify_energies(sample));
  for (std::size_t r = 0; r < 4; ++r) EXPECT_DOUBLE_EQ(set.energy(r), ref::energy(sample, set.config(r)));
  EXPECT_EQ(set.sweeps(), 300u);
  EXPECT_EQ(set.blocks(), 100u);
  EXPECT_EQ(set.swap_passes(), 100u);
  set.add_energy(0, 4);
  EXPECT_THROW(set.verify_energies(sample), InvariantViolation);
}

TEST(ReplicaSet, HeatBathEngineKeepsCache) {
  const LatticeGeometry g(4);
  const auto sample = Sample::generate(g, 0, 1);
  auto set = make_set(sample, 3, 3);
  const TemperatureLadder ladder({0.9, 1.2, 1.6}, 2);
  ParisiRapuano swap_rng(4);
  for (int b = 0; b < 50; ++b) {
    pt_block(sample, set, ladder, tables_for(ladder), EngineSpec{EngineKind::heatbath, 1}, swap_rng);
  }
  EXPECT_NO_THROW(set.verify_energies(sample));
}

TEST(ReplicaSet, SerializationRoundTrip) {
  const LatticeGeometry g(4);
  const auto sample = Sample::generate(g, 0, 1);
  auto set = make_set(sample, 3, 3);
  const TemperatureLadder ladder({0.9, 1.2, 1.6}, 2);
  ParisiRapuano swap_rng(4);
  for (int b = 0; b < 20; ++b) pt_block(sample, set, ladder, tables_for(ladder), EngineSpec{}, swap_rng);
  std::stringstream ss;
  set.write(ss);
  const auto copy = ReplicaSet::read(ss, sample);
  EXPECT_EQ(copy, set);
}

TEST(ReplicaSet, WorkersDoNotChangeTrajectory) {
  const LatticeGeometry g(4);
  const auto sample = Sample::generate(g, 0, 1);
  auto a = make_set(sample, 4, 9);
  auto b = make_set(sample, 4, 9);
  const TemperatureLadder ladder({0.9, 1.2, 1.6, 2.0}, 5);
  const auto tables = tables_for(ladder);
  ParisiRapuano ra(1), rb(1);
  PtBlockOptions opt;
  opt.workers = 3;
  for (int i = 0; i < 30; ++i) {
    pt_block(sample, a, ladder, tables, EngineSpec{}, ra);
    pt_block(sample, b, ladder, tables, EngineSpec{}, rb, opt);
  }
  EXPECT_EQ(a, b);
}

TEST(PtBlock, RejectsTablesNotMatchingLadder) {
  const LatticeGeometry g(4);
  const auto sample = Sample::generate(g, 0, 1);
  auto set = make_set(sample, 2, 1);
  const TemperatureLadder ladder({1.0, 2.0});
  const TemperatureLadder other({1.0, 3.0});
  ParisiRapuano r(1);
  EXPECT_THROW(pt_block(sample, set, ladder, tables_for(other), EngineSpec{}, r), InvalidArgument);
}

TEST(PtTrace, OneJsonObjectPerPass) {
  SwapOutcome out;
  out.pass = 7;
  out.permutation = {1, 0, 2};
  out.accepted = {true, false};
  std::ostringstream ss;
  write_pt_trace(ss, out);
  EXPECT_EQ(ss.str(), "{\"pass\":7,\"perm\":[1,0,2],\"accepted\":[1,0]}\n");
}

TEST(Tuner, KeepsEndpointsAndOrder) {
  const auto sample = Sample::generate(LatticeGeometry(4), 0, 5);
  TuneBudget budget;
  budget.max_iterations = 4;
  budget.thermalization_blocks = 50;
  budget.measurement_blocks = 300;
  const auto result = tune_ladder(sample, 0.8, 2.0, 5, 0.3, budget, 11);
  const auto& t = result.ladder.temperatures();
  ASSERT_EQ(t.size(), 5u);
  EXPECT_DOUBLE_EQ(t.front(), 0.8);
  EXPECT_DOUBLE_EQ(t.back(), 2.0);
  EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
  EXPECT_EQ(result.acceptances.size(), 4u);
  EXPECT_GE(result.iterations, 1u);
  EXPECT_THROW(tune_ladder(sample, 2.0, 1.0, 4, 0.1, budget, 1), InvalidArgument);
}
