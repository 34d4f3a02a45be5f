#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "eamc/acceptance.hpp"
#include "eamc/prng.hpp"
#include "eamc/sample.hpp"
#include "eamc/spin_config.hpp"
#include "eamc/sweep.hpp"

namespace eamc {

struct Slab {
  std::size_t z_begin = 0;
  std::size_t z_end = 0;
  std::size_t thickness() const noexcept { return z_end - z_begin; }
  bool operator==(const Slab&) const = default;
};

/// Contiguous z-slabs over P workers arranged on a ring (P-1 <-> 0).
/// Thicknesses differ by at most one; the thicker slabs come first.
class SlabLayout {
 public:
  /// Requires Lz >= 2P.
  static SlabLayout make(const LatticeGeometry& geometry, std::size_t workers);

  const LatticeGeometry& geometry() const noexcept { return geometry_; }
  std::size_t workers() const noexcept { return slabs_.size(); }
  const Slab& slab(std::size_t k) const noexcept { return slabs_[k]; }
  const std::vector<Slab>& slabs() const noexcept { return slabs_; }
  std::size_t up(std::size_t k) const noexcept { return k + 1 == workers() ? 0 : k + 1; }
  std::size_t down(std::size_t k) const noexcept { return k == 0 ? workers() - 1 : k - 1; }
  std::vector<std::size_t> thicknesses() const;

 private:
  SlabLayout(LatticeGeometry geometry, std::vector<Slab> slabs)
      : geometry_(geometry), slabs_(std::move(slabs)) {}

  LatticeGeometry geometry_;
  std::vector<Slab> slabs_;
};

/// `up` carries the sender's top plane to worker k+1; `down` carries its
/// bottom plane to worker k-1.
enum class HaloDirection : std::uint8_t { up = 0, down = 1 };

/// Wire layout, little-endian: sweep u64, phase u8, direction u8, sender u16,
/// reserved u32, then ceil(plane_sites/8) bytes of spin bits (site x+Lx*y at
/// byte (x+Lx*y)/8, bit (x+Lx*y)%8).
struct HaloMessage {
  static constexpr std::size_t header_size = 16;

  std::uint64_t sweep = 0;
  std::uint8_t phase = 0;
  HaloDirection direction = HaloDirection::up;
  std::uint16_t sender = 0;
  std::vector<std::uint8_t> plane;

  static std::size_t payload_size(std::size_t plane_sites) noexcept {
    return (plane_sites + 7) / 8;
  }
  std::vector<std::uint8_t> encode() const;
  /// Throws ProtocolError on a short buffer, a payload of the wrong length or
  /// invalid phase/direction fields.
  static HaloMessage decode(std::span<const std::uint8_t> bytes, std::size_t plane_sites);

  bool operator==(const HaloMessage&) const = default;
};

/// Inbox of one worker. Messages are keyed by (sweep, phase, direction,
/// sender); a second message with a pending or already consumed key is a
/// duplicate and a message that does not arrive in time is missing. Both are
/// reported as ProtocolError naming the key.
class HaloMailbox {
 public:
  explicit HaloMailbox(std::size_t plane_sites) : plane_sites_(plane_sites) {}

  void post(std::vector<std::uint8_t> bytes);
  HaloMessage take(std::uint64_t sweep, int phase, HaloDirection direction,
                   std::uint16_t sender, std::chrono::milliseconds timeout);
  /// Wakes any waiter; subsequent take() calls throw.
  void abort();

 private:
  using Key = std::tuple<std::uint64_t, std::uint8_t, std::uint8_t, std::uint16_t>;

  std::size_t plane_sites_;
  std::mutex mutex_;
  std::condition_variable ready_;
  std::map<Key, HaloMessage> pending_;
  std::map<std::pair<std::uint8_t, std::uint16_t>, std::pair<std::uint64_t, std::uint8_t>> last_;
  bool aborted_ = false;
};

struct LinkTraffic {
  std::size_t lower = 0;  // worker below the boundary
  std::size_t upper = 0;  // worker above the boundary
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  bool operator==(const LinkTraffic&) const = default;
};

struct TrafficReport {
  std::vector<LinkTraffic> links;
  std::uint64_t total_messages() const noexcept;
  std::uint64_t total_bytes() const noexcept;
  bool operator==(const TrafficReport&) const = default;
};

/// Closed-form traffic of `sweeps` sweeps: each of the P ring links (none for
/// P=1) carries 2 phases x 2 directions messages per sweep.
TrafficReport link_traffic_report(const SlabLayout& layout, std::uint64_t sweeps);

/// Randomness for a partitioned run. Site-keyed mode reproduces the
/// monolithic engine bit for bit for any P; in Parisi-Rapuano mode each slab
/// consumes its own stream in its own visiting order.
struct PartitionRandom {
  RngMode mode = RngMode::site_keyed;
  SiteKeyedStream keyed;
  std::span<ParisiRapuano> slab_streams;

  static PartitionRandom site_keyed(SiteKeyedStream s) { return {RngMode::site_keyed, s, {}}; }
  static PartitionRandom per_slab(std::span<ParisiRapuano> streams) {
    return {RngMode::parisi_rapuano, {}, streams};
  }
};

/// Slab s is seeded with seed ^ mix64(s). Not reproducible across different P.
std::vector<ParisiRapuano> slab_streams(std::uint64_t seed, std::size_t workers);

struct PartitionOptions {
  /// Before each phase, every worker checks its ghost planes against the
  /// neighbours' owned boundary planes.
  bool audit_halos = false;
  std::chrono::milliseconds halo_timeout{30000};
};

struct PartitionRun {
  FlipStats stats;
  TrafficReport traffic;  // as measured by the workers
};

/// Runs `sweeps` Metropolis sweeps with the lattice split over the layout's
/// workers. Per parity phase each worker exchanges halos, updates its owned
/// sites of that parity and waits at a barrier. Sweep numbers start at
/// `first_sweep` (relevant to site-keyed randomness).
PartitionRun partitioned_sweeps(const Sample& sample, SpinConfiguration& config,
                                const SlabLayout& layout, const AcceptanceTable& table,
                                PartitionRandom rng, std::uint64_t first_sweep,
                                std::uint64_t sweeps, const PartitionOptions& options = {});

}  // namespace eamc
