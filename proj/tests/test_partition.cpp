#include <gtest/gtest.h>

#include <thread>

#include "eamc/energy.hpp"
#include "eamc/mixing.hpp"
#include "eamc/error.hpp"
#include "eamc/partition.hpp"
#include "eamc/sweep.hpp"

using namespace eamc;
using namespace std::chrono_literals;

TEST(SlabLayout, ThickerSlabsFirstAndRing) {
  const auto layout = SlabLayout::make(LatticeGeometry(4, 4, 14), 4);
  EXPECT_EQ(layout.thicknesses(), (std::vector<std::size_t>{4, 4, 3, 3}));
  EXPECT_EQ(layout.slab(0).z_begin, 0u);
  EXPECT_EQ(layout.slab(3).z_end, 14u);
  for (std::size_t k = 0; k + 1 < 4; ++k) EXPECT_EQ(layout.slab(k).z_end, layout.slab(k + 1).z_begin);
  EXPECT_EQ(layout.up(3), 0u);
  EXPECT_EQ(layout.down(0), 3u);
  EXPECT_THROW(SlabLayout::make(LatticeGeometry(4, 4, 6), 4), InvalidArgument);
  EXPECT_THROW(SlabLayout::make(LatticeGeometry(4), 0), InvalidArgument);
}

TEST(HaloMessage, WireLayout) {
  HaloMessage m;
  m.sweep = 0x0102030405060708ULL;
  m.phase = 1;
  m.direction = HaloDirection::down;
  m.sender = 0x0A0B;
  m.plane = {0xFF, 0x01};
  const auto bytes = m.encode();
  ASSERT_EQ(bytes.size(), 18u);
  EXPECT_EQ(bytes[0], 0x08);
  EXPECT_EQ(bytes[7], 0x01);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[9], 1);
  EXPECT_EQ(bytes[10], 0x0B);
  EXPECT_EQ(bytes[11], 0x0A);
  for (int k = 12; k < 16; ++k) EXPECT_EQ(bytes[k], 0);
  EXPECT_EQ(bytes[16], 0xFF);
  EXPECT_EQ(HaloMessage::decode(bytes, 16), m);
  EXPECT_THROW(HaloMessage::decode(bytes, 24), ProtocolError);
  auto bad = bytes;
  bad[8] = 2;
  EXPECT_THROW(HaloMessage::decode(bad, 16), ProtocolError);
  EXPECT_THROW(HaloMessage::decode(std::span(bytes).first(10), 16), ProtocolError);
}

TEST(HaloMailbox, DeliversByKey) {
  HaloMailbox box(16);
  HaloMessage m{3, 0, HaloDirection::up, 2, {1, 2}};
  std::thread poster([&] {
    std::this_thread::sleep_for(10ms);
    box.post(m.encode());
  });
  const auto got = box.take(3, 0, HaloDirection::up, 2, 2000ms);
  poster.join();
  EXPECT_EQ(got, m);
}

TEST(HaloMailbox, DuplicateIsProtocolError) {
  HaloMailbox box(16);
  HaloMessage m{3, 0, HaloDirection::up, 2, {1, 2}};
  box.post(m.encode());
  EXPECT_THROW(box.post(m.encode()), ProtocolError);
  (void)box.take(3, 0, HaloDirection::up, 2, 100ms);
  EXPECT_THROW(box.post(m.encode()), ProtocolError) << "already consumed";
}

TEST(HaloMailbox, MissingIsProtocolError) {
  HaloMailbox box(16);
  try {
    (void)box.take(5, 1, HaloDirection::down, 0, 20ms);
    FAIL() << "expected a timeout";
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("sweep 5"), std::string::npos) << e.what();
  }
}

TEST(HaloMailbox, AbortWakesWaiters) {
  HaloMailbox box(16);
  std::thread t([&] {
    std::this_thread::sleep_for(10ms);
    box.abort();
  });
  EXPECT_THROW((void)box.take(0, 0, HaloDirection::up, 1, 5000ms), Error);
  t.join();
}

class SiteKeyedEquivalence : public ::testing::TestWithParam<std::size_t> {};

TEST_P(SiteKeyedEquivalence, BitIdenticalToMonolithic) {
  const std::size_t p = GetParam();
  const LatticeGeometry g(4, 6, 32);
  const auto sample = Sample::generate(g, 0, 3, FieldStrength::from_value(0.5));
  const AcceptanceTable table(0.9, sample.field());
  const SiteKeyedStream stream(77);
  auto mono = SpinConfiguration::random(g, 1, 5);
  auto part = mono;
  const auto e0 = energy_quarters(sample, mono);
  FlipStats mono_stats;
  for (std::uint64_t t = 0; t < 20; ++t) {
    mono_stats.merge(metropolis_sweep_scalar(sample, mono, table, SweepRandom::keyed(stream, t)));
  }
  PartitionOptions opt;
  opt.audit_halos = true;
  const auto layout = SlabLayout::make(g, p);
  const auto run = partitioned_sweeps(sample, part, layout, table, PartitionRandom::site_keyed(stream), 0, 20, opt);
  EXPECT_EQ(part, mono);
  EXPECT_EQ(run.stats, mono_stats);
  EXPECT_EQ(run.stats.energy_change_quarters, energy_quarters(sample, part) - e0);
  EXPECT_EQ(run.traffic, link_traffic_report(layout, 20));
}

INSTANTIATE_TEST_SUITE_P(Workers, SiteKeyedEquivalence, ::testing::Values(1u, 2u, 4u, 8u, 16u));

TEST(Partition, ContinuesSweepNumbering) {
  const LatticeGeometry g(4, 4, 8);
  const auto sample = Sample::generate(g, 0, 3);
  const AcceptanceTable table(0.7);
  const SiteKeyedStream stream(1);
  auto a = SpinConfiguration::random(g, 1, 2);
  auto b = a;
  const auto layout = SlabLayout::make(g, 2);
  partitioned_sweeps(sample, a, layout, table, PartitionRandom::site_keyed(stream), 0, 10);
  partitioned_sweeps(sample, b, layout, table, PartitionRandom::site_keyed(stream), 0, 4);
  partitioned_sweeps(sample, b, layout, table, PartitionRandom::site_keyed(stream), 4, 6);
  EXPECT_EQ(a, b);
}

TEST(Partition, PerSlabStreamsAreDeterministicForFixedP) {
  const LatticeGeometry g(4, 4, 8);
  const auto sample = Sample::generate(g, 0, 3);
  const AcceptanceTable table(0.7);
  auto a = SpinConfiguration::random(g, 1, 2);
  auto b = a;
  auto sa = slab_streams(9, 4);
  auto sb = slab_streams(9, 4);
  const auto layout = SlabLayout::make(g, 4);
  const auto e0 = energy_quarters(sample, a);
  const auto ra = partitioned_sweeps(sample, a, layout, table, PartitionRandom::per_slab(sa), 0, 15);
  partitioned_sweeps(sample, b, layout, table, PartitionRandom::per_slab(sb), 0, 15);
  EXPECT_EQ(a, b);
  EXPECT_EQ(sa, sb);
  EXPECT_EQ(ra.stats.energy_change_quarters, energy_quarters(sample, a) - e0);
  EXPECT_EQ(slab_streams(9, 4)[2], ParisiRapuano(9 ^ mix64(2)));
}

TEST(Partition, RejectsWrongStreamCount) {
  const LatticeGeometry g(4, 4, 8);
  const auto sample = Sample::generate(g, 0, 3);
  auto c = SpinConfiguration::random(g, 1, 2);
  auto streams = slab_streams(1, 3);
  EXPECT_THROW(partitioned_sweeps(sample, c, SlabLayout::make(g, 2), AcceptanceTable(1.0),
                                  PartitionRandom::per_slab(streams), 0, 1),
               InvalidArgument);
}

TEST(LinkTraffic, ClosedForm) {
  EXPECT_TRUE(link_traffic_report(SlabLayout::make(LatticeGeometry(8), 1), 5).links.empty());
  const auto two = link_traffic_report(SlabLayout::make(LatticeGeometry(8), 2), 3);
  ASSERT_EQ(two.links.size(), 2u);
  EXPECT_EQ(two.total_messages(), 2u * 4u * 3u);
  const auto big = link_traffic_report(SlabLayout::make(LatticeGeometry(512), 16), 1);
  ASSERT_EQ(big.links.size(), 16u);
  for (const auto& l : big.links) {
    EXPECT_EQ(l.messages, 4u);
    EXPECT_EQ(l.bytes, 4u * 512u * 512u / 8u);
    EXPECT_EQ(l.upper, (l.lower + 1) % 16);
  }
  EXPECT_EQ(big.total_messages(), 64u);
}
