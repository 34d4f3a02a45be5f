#include <gtest/gtest.h>

#include "eamc/bitsliced.hpp"
#include "eamc/energy.hpp"
#include "eamc/error.hpp"

using namespace eamc;

namespace {

std::vector<Sample> make_samples(const LatticeGeometry& g, std::size_t w) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < w; ++i) out.push_back(Sample::generate(g, i, 1000 + i));
  return out;
}

}  // namespace

TEST(PackedCouplings, TransposesLanes) {
  const LatticeGeometry g(4);
  const auto samples = make_samples(g, 5);
  const auto packed = PackedCouplings::pack(samples);
  EXPECT_EQ(packed.width(), 5u);
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t w = 0; w < 5; ++w)
        EXPECT_EQ(static_cast<int>((packed.words(static_cast<Axis>(a))[i] >> w) & 1U),
                  samples[w].coupling(i, static_cast<Axis>(a)));
}

TEST(PackedCouplings, RejectsFieldsAndMixedGeometry) {
  const LatticeGeometry g(4);
  std::vector<Sample> with_field{Sample::generate(g, 0, 1, FieldStrength::from_value(0.5))};
  EXPECT_THROW(PackedCouplings::pack(with_field), InvalidArgument);
  std::vector<Sample> mixed{Sample::generate(g, 0, 1), Sample::generate(LatticeGeometry(6), 1, 1)};
  EXPECT_THROW(PackedCouplings::pack(mixed), InvalidArgument);
  EXPECT_THROW(PackedCouplings::pack(std::vector<Sample>{}), InvalidArgument);
}

class BitslicedReplay : public ::testing::TestWithParam<std::tuple<std::size_t, std::size_t, double>> {};

TEST_P(BitslicedReplay, EveryLaneMatchesScalarReplay) {
  const auto [side, width, beta] = GetParam();
  const LatticeGeometry g(side);
  const auto samples = make_samples(g, width);
  const auto packed = PackedCouplings::pack(samples);
  auto config = SpinConfiguration::random(g, width, 77);
  std::vector<SpinConfiguration> lanes;
  std::vector<ParisiRapuano> lane_gens;
  for (std::size_t w = 0; w < width; ++w) {
    lanes.push_back(config.extract_lane(w));
    lane_gens.emplace_back(4242);  // every lane sees the shared stream
  }
  ParisiRapuano shared(4242);
  const AcceptanceTable table(beta);
  LaneFlipStats lane_stats;
  std::vector<FlipStats> scalar_stats(width);
  std::vector<std::int64_t> e0(width);
  for (std::size_t w = 0; w < width; ++w) e0[w] = energy_quarters(samples[w], lanes[w]);

  for (int sweep = 0; sweep < 60; ++sweep) {
    metropolis_sweep_bitsliced(packed, config, table, SweepRandom::sequential(shared), &lane_stats);
    for (std::size_t w = 0; w < width; ++w) {
      scalar_stats[w].merge(metropolis_sweep_scalar(samples[w], lanes[w], table,
                                                    SweepRandom::sequential(lane_gens[w])));
    }
  }
  for (std::size_t w = 0; w < width; ++w) {
    ASSERT_EQ(config.extract_lane(w), lanes[w]) << "lane " << w;
    const FlipStats collapsed = lane_stats.lane(w);
    for (int n = 0; n <= 6; ++n) {
      const auto key = static_cast<std::size_t>(AcceptanceTable::key(n, false));
      EXPECT_EQ(collapsed.bins[key], scalar_stats[w].bins[key]) << "lane " << w << " n " << n;
    }
    EXPECT_EQ(lane_stats.energy_change_quarters(w), energy_quarters(samples[w], lanes[w]) - e0[w]);
  }
  for (auto w : config.words()) EXPECT_EQ(w & ~config.lane_mask(), 0u);
}

INSTANTIATE_TEST_SUITE_P(Widths, BitslicedReplay,
                         ::testing::Values(std::make_tuple(4u, 64u, 0.6), std::make_tuple(4u, 1u, 0.3),
                                           std::make_tuple(2u, 13u, 1.0), std::make_tuple(6u, 37u, 2.0)));

TEST(Bitsliced, KeyedRandomMatchesScalar) {
  const LatticeGeometry g(4);
  const auto samples = make_samples(g, 8);
  const auto packed = PackedCouplings::pack(samples);
  auto config = SpinConfiguration::random(g, 8, 1);
  std::vector<SpinConfiguration> lanes;
  for (std::size_t w = 0; w < 8; ++w) lanes.push_back(config.extract_lane(w));
  const SiteKeyedStream stream(8);
  const AcceptanceTable table(0.8);
  for (std::uint64_t t = 0; t < 25; ++t) {
    metropolis_sweep_bitsliced(packed, config, table, SweepRandom::keyed(stream, t));
    for (std::size_t w = 0; w < 8; ++w) {
      metropolis_sweep_scalar(samples[w], lanes[w], table, SweepRandom::keyed(stream, t));
    }
  }
  for (std::size_t w = 0; w < 8; ++w) EXPECT_EQ(config.extract_lane(w), lanes[w]);
}

TEST(Bitsliced, WidthMismatchRejected) {
  const LatticeGeometry g(4);
  const auto packed = PackedCouplings::pack(make_samples(g, 4));
  auto config = SpinConfiguration::random(g, 5, 1);
  ParisiRapuano gen(1);
  EXPECT_THROW(metropolis_sweep_bitsliced(packed, config, AcceptanceTable(1.0), SweepRandom::sequential(gen)),
               InvalidArgument);
}
