#include "eamc/campaign/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "eamc/error.hpp"

namespace eamc::campaign {

namespace {

void check_keys(const YAML::Node& node, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(section, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (allowed.count(key) == 0) {
      throw ConfigError(section.empty() ? key : section + "." + key, "unknown key");
    }
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "invalid value '" + YAML::Dump(node) + "'");
  }
}

EngineKind parse_engine(const std::string& s, const std::string& field) {
  if (s == "metropolis") return EngineKind::metropolis;
  if (s == "heatbath" || s == "heat-bath") return EngineKind::heatbath;
  if (s == "bitsliced" || s == "bit-sliced") return EngineKind::bitsliced;
  throw ConfigError(field, "unknown engine '" + s + "'");
}

RngMode parse_rng(const std::string& s, const std::string& field) {
  if (s == "parisi-rapuano") return RngMode::parisi_rapuano;
  if (s == "site-keyed") return RngMode::site_keyed;
  throw ConfigError(field, "unknown rng mode '" + s + "'");
}

}  // namespace

const char* to_string(EngineKind kind) noexcept {
  switch (kind) {
    case EngineKind::metropolis: return "metropolis";
    case EngineKind::heatbath: return "heatbath";
    case EngineKind::bitsliced: return "bitsliced";
  }
  return "?";
}

const char* to_string(RngMode mode) noexcept {
  return mode == RngMode::parisi_rapuano ? "parisi-rapuano" : "site-keyed";
}

LatticeGeometry CampaignConfig::geometry() const {
  if (!extents.empty()) return LatticeGeometry(extents[0], extents[1], extents[2]);
  return LatticeGeometry(side);
}

CampaignConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", std::string("YAML parse error: ") + e.what());
  }
  CampaignConfig c;
  if (root.IsNull()) return c;
  check_keys(root, "", {"lattice", "samples", "temperatures", "engine", "rng", "run", "oracle"});

  if (const auto n = root["lattice"]) {
    check_keys(n, "lattice", {"L", "extents", "field"});
    if (n["L"]) c.side = get<std::size_t>(n["L"], "lattice.L");
    if (n["extents"]) c.extents = get<std::vector<std::size_t>>(n["extents"], "lattice.extents");
    if (n["field"]) c.field = get<double>(n["field"], "lattice.field");
  }
  if (const auto n = root["samples"]) {
    check_keys(n, "samples", {"count", "coupling_seed"});
    if (n["count"]) c.samples = get<std::size_t>(n["count"], "samples.count");
    if (n["coupling_seed"]) c.coupling_seed = get<std::uint64_t>(n["coupling_seed"], "samples.coupling_seed");
  }
  if (const auto n = root["temperatures"]) {
    check_keys(n, "temperatures", {"values", "tune", "n_pt"});
    if (n["values"]) c.temperatures = get<std::vector<double>>(n["values"], "temperatures.values");
    if (n["n_pt"]) c.n_pt = get<std::uint32_t>(n["n_pt"], "temperatures.n_pt");
    if (const auto t = n["tune"]) {
      check_keys(t, "temperatures.tune", {"t_min", "t_max", "count", "target", "iterations", "blocks"});
      TuneSpec ts;
      if (!t["t_min"] || !t["t_max"] || !t["count"]) {
        throw ConfigError("temperatures.tune", "needs t_min, t_max and count");
      }
      ts.t_min = get<double>(t["t_min"], "temperatures.tune.t_min");
      ts.t_max = get<double>(t["t_max"], "temperatures.tune.t_max");
      ts.count = get<std::size_t>(t["count"], "temperatures.tune.count");
      if (t["target"]) ts.target = get<double>(t["target"], "temperatures.tune.target");
      if (t["iterations"]) ts.iterations = get<std::size_t>(t["iterations"], "temperatures.tune.iterations");
      if (t["blocks"]) ts.blocks = get<std::uint64_t>(t["blocks"], "temperatures.tune.blocks");
      c.tune = ts;
      if (!n["values"]) c.temperatures.clear();
    }
  }
  if (const auto n = root["engine"]) {
    check_keys(n, "engine", {"kind", "partitions"});
    if (n["kind"]) c.engine = parse_engine(get<std::string>(n["kind"], "engine.kind"), "engine.kind");
    if (n["partitions"]) c.partitions = get<std::size_t>(n["partitions"], "engine.partitions");
  }
  if (const auto n = root["rng"]) {
    check_keys(n, "rng", {"mode", "seed"});
    if (n["mode"]) c.rng_mode = parse_rng(get<std::string>(n["mode"], "rng.mode"), "rng.mode");
    if (n["seed"]) c.seed = get<std::uint64_t>(n["seed"], "rng.seed");
  }
  if (const auto n = root["run"]) {
    check_keys(n, "run", {"sweeps", "measure_every", "checkpoint_interval", "output", "workers"});
    if (n["sweeps"]) c.sweeps = get<std::uint64_t>(n["sweeps"], "run.sweeps");
    if (n["measure_every"]) c.measure_every = get<std::uint64_t>(n["measure_every"], "run.measure_every");
    if (n["checkpoint_interval"]) c.checkpoint_interval = get<std::uint64_t>(n["checkpoint_interval"], "run.checkpoint_interval");
    if (n["output"]) c.output = get<std::string>(n["output"], "run.output");
    if (n["workers"]) c.workers = get<std::size_t>(n["workers"], "run.workers");
  }
  if (const auto n = root["oracle"]) {
    check_keys(n, "oracle", {"sweeps", "thermalization", "batches"});
    if (n["sweeps"]) c.oracle_sweeps = get<std::uint64_t>(n["sweeps"], "oracle.sweeps");
    if (n["thermalization"]) c.oracle_thermalization = get<std::uint64_t>(n["thermalization"], "oracle.thermalization");
    if (n["batches"]) c.oracle_batches = get<std::size_t>(n["batches"], "oracle.batches");
  }
  validate(c);
  return c;
}

CampaignConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const CampaignConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "lattice" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "L" << YAML::Value << c.side;
  if (!c.extents.empty()) out << YAML::Key << "extents" << YAML::Value << YAML::Flow << c.extents;
  out << YAML::Key << "field" << YAML::Value << c.field;
  out << YAML::EndMap;

  out << YAML::Key << "samples" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "count" << YAML::Value << c.samples;
  if (c.coupling_seed) out << YAML::Key << "coupling_seed" << YAML::Value << *c.coupling_seed;
  out << YAML::EndMap;

  out << YAML::Key << "temperatures" << YAML::Value << YAML::BeginMap;
  if (!c.temperatures.empty()) {
    out << YAML::Key << "values" << YAML::Value << YAML::Flow << c.temperatures;
  }
  if (c.tune) {
    out << YAML::Key << "tune" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "t_min" << YAML::Value << c.tune->t_min;
    out << YAML::Key << "t_max" << YAML::Value << c.tune->t_max;
    out << YAML::Key << "count" << YAML::Value << c.tune->count;
    out << YAML::Key << "target" << YAML::Value << c.tune->target;
    out << YAML::Key << "iterations" << YAML::Value << c.tune->iterations;
    out << YAML::Key << "blocks" << YAML::Value << c.tune->blocks;
    out << YAML::EndMap;
  }
  out << YAML::Key << "n_pt" << YAML::Value << c.n_pt;
  out << YAML::EndMap;

  out << YAML::Key << "engine" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(c.engine);
  out << YAML::Key << "partitions" << YAML::Value << c.partitions;
  out << YAML::EndMap;

  out << YAML::Key << "rng" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << to_string(c.rng_mode);
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::EndMap;

  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sweeps" << YAML::Value << c.sweeps;
  out << YAML::Key << "measure_every" << YAML::Value << c.measure_every;
  out << YAML::Key << "checkpoint_interval" << YAML::Value << c.checkpoint_interval;
  out << YAML::Key << "output" << YAML::Value << c.output;
  out << YAML::Key << "workers" << YAML::Value << c.workers;
  out << YAML::EndMap;

  out << YAML::Key << "oracle" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sweeps" << YAML::Value << c.oracle_sweeps;
  out << YAML::Key << "thermalization" << YAML::Value << c.oracle_thermalization;
  out << YAML::Key << "batches" << YAML::Value << c.oracle_batches;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void validate(const CampaignConfig& c) {
  if (!c.extents.empty() && c.extents.size() != 3) {
    throw ConfigError("lattice.extents", "needs exactly three values");
  }
  try {
    (void)c.geometry();
  } catch (const InvalidArgument& e) {
    throw ConfigError(c.extents.empty() ? "lattice.L" : "lattice.extents", e.what());
  }
  try {
    (void)c.field_strength();
  } catch (const InvalidArgument& e) {
    throw ConfigError("lattice.field", e.what());
  }
  if (c.samples == 0) throw ConfigError("samples.count", "must be >= 1");
  if (c.tune && !c.temperatures.empty()) {
    throw ConfigError("temperatures", "give either values or tune, not both");
  }
  if (!c.tune) {
    if (c.temperatures.empty()) throw ConfigError("temperatures.values", "must not be empty");
    for (std::size_t i = 0; i < c.temperatures.size(); ++i) {
      if (!(c.temperatures[i] > 0.0) || !std::isfinite(c.temperatures[i])) {
        throw ConfigError("temperatures.values", "temperatures must be finite and > 0");
      }
      if (i > 0 && !(c.temperatures[i] > c.temperatures[i - 1])) {
        throw ConfigError("temperatures.values", "must be strictly increasing");
      }
    }
  } else {
    const auto& t = *c.tune;
    if (!(t.t_min > 0.0) || !(t.t_max > t.t_min)) {
      throw ConfigError("temperatures.tune", "needs 0 < t_min < t_max");
    }
    if (t.count < 2) throw ConfigError("temperatures.tune.count", "must be >= 2");
    if (!(t.target > 0.0 && t.target < 0.5)) {
      throw ConfigError("temperatures.tune.target", "must be in (0, 0.5)");
    }
    if (t.iterations == 0 || t.blocks == 0) {
      throw ConfigError("temperatures.tune", "iterations and blocks must be >= 1");
    }
  }
  if (c.n_pt == 0) throw ConfigError("temperatures.n_pt", "must be >= 1");
  if (c.partitions == 0) throw ConfigError("engine.partitions", "must be >= 1");
  if (c.partitions > 1) {
    if (c.engine != EngineKind::metropolis) {
      throw ConfigError("engine.partitions", "partitioned runs need the metropolis engine");
    }
    if (c.geometry().lz() < 2 * c.partitions) {
      throw ConfigError("engine.partitions", "lattice too small (need Lz >= 2P)");
    }
  }
  if (c.engine == EngineKind::bitsliced) {
    if (c.samples > 64) throw ConfigError("samples.count", "bit-sliced engine packs at most 64 samples");
    if (c.field != 0.0) throw ConfigError("lattice.field", "bit-sliced engine needs h = 0");
    const std::size_t nt = c.tune ? c.tune->count : c.temperatures.size();
    if (nt != 1) throw ConfigError("temperatures", "bit-sliced engine runs a single temperature");
  }
  if (c.sweeps == 0) throw ConfigError("run.sweeps", "must be >= 1");
  if (c.output.empty()) throw ConfigError("run.output", "must not be empty");
  if (c.workers == 0) throw ConfigError("run.workers", "must be >= 1");
  if (c.oracle_batches < 2) throw ConfigError("oracle.batches", "must be >= 2");
  if (c.oracle_sweeps < c.oracle_batches) throw ConfigError("oracle.sweeps", "must be >= batches");
}

std::uint64_t config_hash(const CampaignConfig& config) {
  CampaignConfig c = config;
  c.output.clear();
  c.workers = 1;
  const std::string text = serialize_config(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace eamc::campaign
