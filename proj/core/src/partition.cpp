#include "eamc/partition.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <string>
#include <thread>

#include "eamc/energy.hpp"
#include "eamc/error.hpp"
#include "eamc/mixing.hpp"
#include "kernels.hpp"

namespace eamc {

namespace {

std::string describe(std::uint64_t sweep, int phase, HaloDirection d, std::uint16_t sender) {
  return "(sweep " + std::to_string(sweep) + ", phase " + std::to_string(phase) +
         ", direction " + (d == HaloDirection::up ? "up" : "down") + ", sender " +
         std::to_string(sender) + ")";
}

// Barrier that can be released early when a worker fails.
class AbortableBarrier {
 public:
  explicit AbortableBarrier(std::size_t count) : count_(count) {}

  void arrive_and_wait() {
    std::unique_lock lock(mutex_);
    if (aborted_) throw ProtocolError("partitioned run aborted");
    const std::size_t gen = generation_;
    if (++arrived_ == count_) {
      arrived_ = 0;
      ++generation_;
      cv_.notify_all();
      return;
    }
    cv_.wait(lock, [&] { return generation_ != gen || aborted_; });
    if (aborted_) throw ProtocolError("partitioned run aborted");
  }

  void abort() {
    std::lock_guard lock(mutex_);
    aborted_ = true;
    cv_.notify_all();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t count_;
  std::size_t arrived_ = 0;
  std::size_t generation_ = 0;
  bool aborted_ = false;
};

void pack_plane(const std::uint64_t* plane, std::size_t n, std::vector<std::uint8_t>& out) {
  out.assign(HaloMessage::payload_size(n), 0);
  for (std::size_t i = 0; i < n; ++i) {
    out[i / 8] |= static_cast<std::uint8_t>((plane[i] & 1U) << (i % 8));
  }
}

void unpack_plane(const std::vector<std::uint8_t>& bytes, std::uint64_t* plane, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) plane[i] = (bytes[i / 8] >> (i % 8)) & 1U;
}

}  // namespace

SlabLayout SlabLayout::make(const LatticeGeometry& geometry, std::size_t workers) {
  if (workers == 0) throw InvalidArgument("partition needs at least one worker");
  const std::size_t lz = geometry.lz();
  if (lz < 2 * workers) {
    throw InvalidArgument("lattice extent " + std::to_string(lz) + " too small for " +
                          std::to_string(workers) + " slabs (need L >= 2P)");
  }
  std::vector<Slab> slabs(workers);
  const std::size_t base = lz / workers;
  const std::size_t extra = lz % workers;
  std::size_t z = 0;
  for (std::size_t k = 0; k < workers; ++k) {
    const std::size_t t = base + (k < extra ? 1 : 0);
    slabs[k] = Slab{z, z + t};
    z += t;
  }
  return SlabLayout(geometry, std::move(slabs));
}

std::vector<std::size_t> SlabLayout::thicknesses() const {
  std::vector<std::size_t> t;
  for (const auto& s : slabs_) t.push_back(s.thickness());
  return t;
}

std::vector<std::uint8_t> HaloMessage::encode() const {
  std::vector<std::uint8_t> out(header_size + plane.size(), 0);
  for (int b = 0; b < 8; ++b) out[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(sweep >> (8 * b));
  out[8] = phase;
  out[9] = static_cast<std::uint8_t>(direction);
  out[10] = static_cast<std::uint8_t>(sender & 0xFF);
  out[11] = static_cast<std::uint8_t>(sender >> 8);
  std::copy(plane.begin(), plane.end(), out.begin() + header_size);
  return out;
}

HaloMessage HaloMessage::decode(std::span<const std::uint8_t> bytes, std::size_t plane_sites) {
  const std::size_t expected = header_size + payload_size(plane_sites);
  if (bytes.size() != expected) {
    throw ProtocolError("halo message has " + std::to_string(bytes.size()) +
                        " bytes, expected " + std::to_string(expected));
  }
  HaloMessage m;
  for (int b = 0; b < 8; ++b) m.sweep |= static_cast<std::uint64_t>(bytes[static_cast<std::size_t>(b)]) << (8 * b);
  m.phase = bytes[8];
  if (m.phase > 1) throw ProtocolError("halo message has invalid phase");
  if (bytes[9] > 1) throw ProtocolError("halo message has invalid direction");
  m.direction = static_cast<HaloDirection>(bytes[9]);
  m.sender = static_cast<std::uint16_t>(bytes[10] | (bytes[11] << 8));
  m.plane.assign(bytes.begin() + header_size, bytes.end());
  return m;
}

void HaloMailbox::post(std::vector<std::uint8_t> bytes) {
  HaloMessage m = HaloMessage::decode(bytes, plane_sites_);
  std::lock_guard lock(mutex_);
  const Key key{m.sweep, m.phase, static_cast<std::uint8_t>(m.direction), m.sender};
  const auto stream = std::make_pair(static_cast<std::uint8_t>(m.direction), m.sender);
  const auto seen = last_.find(stream);
  const bool stale = seen != last_.end() &&
                     std::make_pair(m.sweep, m.phase) <= seen->second;
  if (stale || pending_.count(key) != 0) {
    throw ProtocolError("duplicate halo message " +
                        describe(m.sweep, m.phase, m.direction, m.sender));
  }
  pending_.emplace(key, std::move(m));
  ready_.notify_all();
}

HaloMessage HaloMailbox::take(std::uint64_t sweep, int phase, HaloDirection direction,
                              std::uint16_t sender, std::chrono::milliseconds timeout) {
  const Key key{sweep, static_cast<std::uint8_t>(phase), static_cast<std::uint8_t>(direction),
                sender};
  std::unique_lock lock(mutex_);
  const bool arrived = ready_.wait_for(lock, timeout, [&] {
    return aborted_ || pending_.count(key) != 0;
  });
  if (aborted_) throw ProtocolError("halo exchange aborted");
  if (!arrived) {
    throw ProtocolError("missing halo message " + describe(sweep, phase, direction, sender));
  }
  auto node = pending_.extract(key);
  last_[std::make_pair(static_cast<std::uint8_t>(direction), sender)] =
      std::make_pair(sweep, static_cast<std::uint8_t>(phase));
  return std::move(node.mapped());
}

void HaloMailbox::abort() {
  std::lock_guard lock(mutex_);
  aborted_ = true;
  ready_.notify_all();
}

std::uint64_t TrafficReport::total_messages() const noexcept {
  std::uint64_t n = 0;
  for (const auto& l : links) n += l.messages;
  return n;
}

std::uint64_t TrafficReport::total_bytes() const noexcept {
  std::uint64_t n = 0;
  for (const auto& l : links) n += l.bytes;
  return n;
}

TrafficReport link_traffic_report(const SlabLayout& layout, std::uint64_t sweeps) {
  TrafficReport r;
  const std::size_t p = layout.workers();
  if (p < 2) return r;
  const std::uint64_t payload = HaloMessage::payload_size(layout.geometry().plane_size());
  for (std::size_t k = 0; k < p; ++k) {
    LinkTraffic l;
    l.lower = k;
    l.upper = layout.up(k);
    l.messages = 2 * 2 * sweeps;
    l.bytes = l.messages * payload;
    r.links.push_back(l);
  }
  return r;
}

std::vector<ParisiRapuano> slab_streams(std::uint64_t seed, std::size_t workers) {
  std::vector<ParisiRapuano> out;
  out.reserve(workers);
  for (std::size_t s = 0; s < workers; ++s) out.emplace_back(seed ^ mix64(s));
  return out;
}

PartitionRun partitioned_sweeps(const Sample& sample, SpinConfiguration& config,
                                const SlabLayout& layout, const AcceptanceTable& table,
                                PartitionRandom rng, std::uint64_t first_sweep,
                                std::uint64_t sweeps, const PartitionOptions& options) {
  require_same_geometry(sample, config);
  if (config.width() != 1) throw InvalidArgument("partitioned sweeps need W=1");
  if (!(layout.geometry() == sample.geometry())) {
    throw InvalidArgument("slab layout geometry does not match sample");
  }
  if (!(table.field() == sample.field())) {
    throw InvalidArgument("acceptance table field does not match sample field");
  }
  const std::size_t p = layout.workers();
  if (rng.mode == RngMode::parisi_rapuano && rng.slab_streams.size() != p) {
    throw InvalidArgument("need one generator per slab");
  }
  if (p > 0xFFFF) throw InvalidArgument("too many workers");

  const auto& g = sample.geometry();
  const std::size_t plane = g.plane_size();

  // Local slab buffers: plane 0 is the lower ghost, the last plane the upper ghost.
  std::vector<std::vector<std::uint64_t>> local(p);
  for (std::size_t k = 0; k < p; ++k) {
    const Slab& s = layout.slab(k);
    local[k].assign((s.thickness() + 2) * plane, 0);
    std::copy(config.words().begin() + static_cast<std::ptrdiff_t>(s.z_begin * plane),
              config.words().begin() + static_cast<std::ptrdiff_t>(s.z_end * plane),
              local[k].begin() + static_cast<std::ptrdiff_t>(plane));
  }

  std::vector<std::unique_ptr<HaloMailbox>> inbox;
  for (std::size_t k = 0; k < p; ++k) inbox.push_back(std::make_unique<HaloMailbox>(plane));
  AbortableBarrier barrier(p);
  std::vector<FlipStats> stats(p);
  std::vector<std::uint64_t> messages_up(p, 0);
  std::vector<std::uint64_t> messages_down(p, 0);
  std::vector<std::exception_ptr> errors(p);
  std::atomic<bool> failed{false};

  const auto abort_all = [&] {
    failed = true;
    barrier.abort();
    for (auto& box : inbox) box->abort();
  };

  const auto worker = [&](std::size_t k) {
    try {
      const Slab& slab = layout.slab(k);
      std::uint64_t* buf = local[k].data();
      std::uint64_t* lower_ghost = buf;
      std::uint64_t* upper_ghost = buf + (slab.thickness() + 1) * plane;
      const std::uint64_t* bottom = buf + plane;
      const std::uint64_t* top = buf + slab.thickness() * plane;
      const auto planes = [&](std::ptrdiff_t z) {
        return buf + static_cast<std::size_t>(z - static_cast<std::ptrdiff_t>(slab.z_begin) + 1) * plane;
      };
      const auto up = static_cast<std::uint16_t>(layout.up(k));
      const auto down = static_cast<std::uint16_t>(layout.down(k));
      const auto self = static_cast<std::uint16_t>(k);
      std::vector<std::uint8_t> payload;

      for (std::uint64_t n = 0; n < sweeps; ++n) {
        const std::uint64_t sweep = first_sweep + n;
        for (int phase = 0; phase < 2; ++phase) {
          if (p == 1) {
            std::copy(top, top + plane, lower_ghost);
            std::copy(bottom, bottom + plane, upper_ghost);
          } else {
            HaloMessage m;
            m.sweep = sweep;
            m.phase = static_cast<std::uint8_t>(phase);
            m.sender = self;
            m.direction = HaloDirection::up;
            pack_plane(top, plane, m.plane);
            inbox[up]->post(m.encode());
            ++messages_up[k];
            m.direction = HaloDirection::down;
            pack_plane(bottom, plane, m.plane);
            inbox[down]->post(m.encode());
            ++messages_down[k];

            const HaloMessage from_below =
                inbox[k]->take(sweep, phase, HaloDirection::up, down, options.halo_timeout);
            unpack_plane(from_below.plane, lower_ghost, plane);
            const HaloMessage from_above =
                inbox[k]->take(sweep, phase, HaloDirection::down, up, options.halo_timeout);
            unpack_plane(from_above.plane, upper_ghost, plane);
          }

          if (options.audit_halos) {
            barrier.arrive_and_wait();
            const auto& below = local[down];
            const auto& above = local[up];
            const std::size_t tb = layout.slab(down).thickness();
            const bool ok_low = std::equal(lower_ghost, lower_ghost + plane,
                                           below.begin() + static_cast<std::ptrdiff_t>(tb * plane));
            const bool ok_high = std::equal(upper_ghost, upper_ghost + plane,
                                            above.begin() + static_cast<std::ptrdiff_t>(plane));
            if (!ok_low || !ok_high) {
              throw InvariantViolation("stale ghost plane on worker " + std::to_string(k) +
                                       " at sweep " + std::to_string(sweep) + ", phase " +
                                       std::to_string(phase));
            }
            barrier.arrive_and_wait();
          }

          if (rng.mode == RngMode::site_keyed) {
            detail::metropolis_phase(sample, planes, slab.z_begin, slab.z_end, phase, table,
                                     detail::KeyedDraw{rng.keyed, sweep}, stats[k]);
          } else {
            detail::metropolis_phase(sample, planes, slab.z_begin, slab.z_end, phase, table,
                                     detail::SequentialDraw{&rng.slab_streams[k]}, stats[k]);
          }
          barrier.arrive_and_wait();
        }
      }
    } catch (...) {
      errors[k] = std::current_exception();
      abort_all();
    }
  };

  if (p == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(p);
    for (std::size_t k = 0; k < p; ++k) threads.emplace_back(worker, k);
    for (auto& t : threads) t.join();
  }

  if (failed) {
    // Report the root cause: prefer an error that is not the secondary abort.
    std::exception_ptr first;
    for (auto& e : errors) {
      if (!e) continue;
      try {
        std::rethrow_exception(e);
      } catch (const ProtocolError& pe) {
        if (std::string(pe.what()).find("aborted") == std::string::npos) throw;
        if (!first) first = e;
      } catch (...) {
        throw;
      }
    }
    if (first) std::rethrow_exception(first);
  }

  for (std::size_t k = 0; k < p; ++k) {
    const Slab& s = layout.slab(k);
    std::copy(local[k].begin() + static_cast<std::ptrdiff_t>(plane),
              local[k].begin() + static_cast<std::ptrdiff_t>((s.thickness() + 1) * plane),
              config.words().begin() + static_cast<std::ptrdiff_t>(s.z_begin * plane));
  }

  PartitionRun run;
  for (const auto& s : stats) run.stats.merge(s);
  if (p >= 2) {
    const std::uint64_t payload = HaloMessage::payload_size(plane);
    for (std::size_t k = 0; k < p; ++k) {
      LinkTraffic l;
      l.lower = k;
      l.upper = layout.up(k);
      // Boundary k carries k's upward sends and (k+1)'s downward sends.
      l.messages = messages_up[k] + messages_down[layout.up(k)];
      l.bytes = l.messages * payload;
      run.traffic.links.push_back(l);
    }
  }
  return run;
}

}  // namespace eamc
