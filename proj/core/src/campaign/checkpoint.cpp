#include "eamc/campaign/checkpoint.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "eamc/binary_io.hpp"
#include "eamc/error.hpp"
#include "eamc/mixing.hpp"

namespace eamc::campaign {

namespace {

constexpr std::array<char, 8> kMagic{'E', 'A', 'M', 'C', 'C', 'K', 'P', 'T'};

void write_stats(BinaryWriter& w, const FlipStats& s) {
  for (const auto& b : s.bins) {
    w.u64(b.attempts);
    w.u64(b.accepts);
  }
  w.i64(s.energy_change_quarters);
}

FlipStats read_stats(BinaryReader& r) {
  FlipStats s;
  for (auto& b : s.bins) {
    b.attempts = r.u64();
    b.accepts = r.u64();
  }
  s.energy_change_quarters = r.i64();
  return s;
}

void write_config(BinaryWriter& w, const SpinConfiguration& c) {
  w.u16(static_cast<std::uint16_t>(c.geometry().lx()));
  w.u16(static_cast<std::uint16_t>(c.geometry().ly()));
  w.u16(static_cast<std::uint16_t>(c.geometry().lz()));
  w.u8(static_cast<std::uint8_t>(c.width()));
  for (std::uint64_t word : c.words()) w.u64(word);
}

SpinConfiguration read_config(BinaryReader& r) {
  const std::size_t lx = r.u16(), ly = r.u16(), lz = r.u16();
  const std::size_t width = r.u8();
  SpinConfiguration c(LatticeGeometry(lx, ly, lz), width);
  for (auto& word : c.words()) word = r.u64();
  return c;
}

CheckpointHeader read_header(std::istream& in) {
  BinaryReader r(in);
  std::array<char, 8> magic{};
  for (auto& ch : magic) ch = static_cast<char>(r.u8());
  if (magic != kMagic) throw Error("not a checkpoint file (bad magic)");
  CheckpointHeader h;
  h.version = r.u32();
  if (h.version != Checkpoint::version) {
    throw Error("unsupported checkpoint version " + std::to_string(h.version));
  }
  h.config_hash = r.u64();
  h.sweep = r.u64();
  h.offsets.measurements = r.u64();
  h.offsets.c4 = r.u64();
  h.offsets.trace = r.u64();
  const std::uint32_t nt = r.u32();
  for (std::uint32_t i = 0; i < nt; ++i) h.temperatures.push_back(r.f64());
  const std::uint32_t len = r.u32();
  h.config_text.resize(len);
  for (auto& ch : h.config_text) ch = static_cast<char>(r.u8());
  if (config_hash(parse_config(h.config_text)) != h.config_hash) {
    throw Error("checkpoint config hash does not match its embedded config");
  }
  return h;
}

}  // namespace

std::vector<Sample> make_samples(const CampaignConfig& config) {
  const auto geometry = config.geometry();
  const std::uint64_t base = config.coupling_seed.value_or(config.seed);
  std::vector<Sample> out;
  out.reserve(config.samples);
  for (std::size_t i = 0; i < config.samples; ++i) {
    out.push_back(Sample::generate(geometry, i, derive_seed(base, SeedTag::couplings, i),
                                   config.field_strength()));
  }
  return out;
}

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint '" + tmp + "'");
    BinaryWriter w(out);
    for (char ch : kMagic) w.u8(static_cast<std::uint8_t>(ch));
    w.u32(Checkpoint::version);
    w.u64(cp.config_hash);
    w.u64(cp.sweep);
    w.u64(cp.offsets.measurements);
    w.u64(cp.offsets.c4);
    w.u64(cp.offsets.trace);
    w.u32(static_cast<std::uint32_t>(cp.temperatures.size()));
    for (double t : cp.temperatures) w.f64(t);
    w.u32(static_cast<std::uint32_t>(cp.config_text.size()));
    w.bytes(cp.config_text);

    w.u8(cp.packed ? 1 : 0);
    if (cp.packed) {
      const auto& p = *cp.packed;
      w.u32(static_cast<std::uint32_t>(p.configs.size()));
      for (const auto& c : p.configs) write_config(w, c);
      for (const auto& rng : p.rngs) rng.write(out);
      for (std::size_t k = 0; k < 7; ++k) {
        for (std::size_t l = 0; l < 64; ++l) {
          w.u64(p.stats.attempts[k][l]);
          w.u64(p.stats.accepts[k][l]);
        }
      }
    } else {
      w.u32(static_cast<std::uint32_t>(cp.samples.size()));
      for (const auto& s : cp.samples) {
        w.u32(static_cast<std::uint32_t>(s.sets.size()));
        for (const auto& set : s.sets) set.write(out);
        for (const auto& rng : s.swap_rngs) rng.write(out);
        w.u32(static_cast<std::uint32_t>(s.slot_stats.size()));
        for (const auto& st : s.slot_stats) write_stats(w, st);
      }
    }
    out.flush();
    if (!out) throw Error("failed writing checkpoint '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

CheckpointHeader read_checkpoint_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  return read_header(in);
}

Checkpoint read_checkpoint(const std::string& path, const std::vector<Sample>& samples) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  const CheckpointHeader h = read_header(in);
  Checkpoint cp;
  cp.config_text = h.config_text;
  cp.config_hash = h.config_hash;
  cp.sweep = h.sweep;
  cp.temperatures = h.temperatures;
  cp.offsets = h.offsets;

  BinaryReader r(in);
  if (r.u8() != 0) {
    PackedState p;
    const std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) p.configs.push_back(read_config(r));
    for (std::uint32_t i = 0; i < n; ++i) p.rngs.push_back(ChainRng::read(in));
    for (std::size_t k = 0; k < 7; ++k) {
      for (std::size_t l = 0; l < 64; ++l) {
        p.stats.attempts[k][l] = r.u64();
        p.stats.accepts[k][l] = r.u64();
      }
    }
    cp.packed = std::move(p);
  } else {
    const std::uint32_t n = r.u32();
    if (n != samples.size()) throw Error("checkpoint sample count does not match the config");
    for (std::uint32_t i = 0; i < n; ++i) {
      SampleState s;
      const std::uint32_t sets = r.u32();
      for (std::uint32_t k = 0; k < sets; ++k) s.sets.push_back(ReplicaSet::read(in, samples[i]));
      for (std::uint32_t k = 0; k < sets; ++k) s.swap_rngs.push_back(ParisiRapuano::read(in));
      const std::uint32_t slots = r.u32();
      for (std::uint32_t k = 0; k < slots; ++k) s.slot_stats.push_back(read_stats(r));
      cp.samples.push_back(std::move(s));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error("trailing bytes in checkpoint");
  return cp;
}

}  // namespace eamc::campaign
