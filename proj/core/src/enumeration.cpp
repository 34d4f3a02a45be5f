#include "eamc/enumeration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "eamc/error.hpp"

namespace eamc {

BondGraph BondGraph::from_sample(const Sample& sample) {
  const auto& g = sample.geometry();
  BondGraph graph;
  graph.spins = g.size();
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (int a = 0; a < 3; ++a) {
      const auto d = static_cast<Direction>(a);
      graph.bonds.push_back({static_cast<std::uint32_t>(s),
                             static_cast<std::uint32_t>(g.neighbor(s, d)),
                             sample.coupling(s, static_cast<Axis>(a)) ? 1.0 : -1.0});
    }
  }
  if (sample.has_field()) {
    graph.field.resize(g.size());
    for (std::size_t s = 0; s < g.size(); ++s) {
      graph.field[s] = sample.field_bit(s) ? sample.field().value() : -sample.field().value();
    }
  }
  return graph;
}

double BondGraph::energy(std::uint64_t state) const {
  const auto spin = [&](std::uint32_t k) { return ((state >> k) & 1U) ? 1.0 : -1.0; };
  double e = 0.0;
  for (const auto& b : bonds) e -= b.coupling * spin(b.i) * spin(b.j);
  for (std::size_t k = 0; k < field.size(); ++k) e -= field[k] * spin(static_cast<std::uint32_t>(k));
  return e;
}

namespace {

void check_size(const BondGraph& graph, std::size_t limit) {
  if (graph.spins == 0 || graph.spins > limit) {
    throw InvalidArgument("exact enumeration limited to " + std::to_string(limit) +
                          " spins, got " + std::to_string(graph.spins));
  }
  if (!graph.field.empty() && graph.field.size() != graph.spins) {
    throw InvalidArgument("field vector has wrong size");
  }
  for (const auto& b : graph.bonds) {
    if (b.i >= graph.spins || b.j >= graph.spins) throw InvalidArgument("bond index out of range");
  }
}

// Visits every state in Gray-code order with its energy, updated incrementally.
template <class Visit>
void gray_walk(const BondGraph& graph, Visit&& visit) {
  const std::size_t n = graph.spins;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
  for (const auto& b : graph.bonds) {
    adj[b.i].push_back({b.j, b.coupling});
    adj[b.j].push_back({b.i, b.coupling});
  }
  std::uint64_t state = 0;
  double e = graph.energy(0);
  visit(state, e);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto bit = static_cast<std::uint32_t>(std::countr_zero(k));
    const double si = ((state >> bit) & 1U) ? 1.0 : -1.0;
    double local = graph.field.empty() ? 0.0 : graph.field[bit];
    for (const auto& [j, c] : adj[bit]) {
      // A self-bond (i == j) is invariant under the flip.
      if (j == bit) continue;
      local += c * (((state >> j) & 1U) ? 1.0 : -1.0);
    }
    e += 2.0 * si * local;
    state ^= std::uint64_t{1} << bit;
    visit(state, e);
  }
}

// Lattice energies are multiples of 1/4 and bin exactly; other graphs are
// binned at 2^-20 resolution.
bool quarter_exact(const BondGraph& graph) {
  const auto ok = [](double v) { return std::floor(v * 4.0) == v * 4.0; };
  return std::all_of(graph.bonds.begin(), graph.bonds.end(), [&](const auto& b) { return ok(b.coupling); }) &&
         std::all_of(graph.field.begin(), graph.field.end(), ok);
}

}  // namespace

std::vector<ExactThermo> exact_enumeration(const BondGraph& graph,
                                           std::span<const double> temperatures) {
  check_size(graph, max_enumeration_spins);
  for (double t : temperatures) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("temperatures must be > 0");
  }
  const auto n = static_cast<int>(graph.spins);

  // Joint density of states g(E, M) with M = number of up spins.
  std::map<std::int64_t, std::vector<double>> dos;
  std::vector<std::pair<double, int>> raw;
  const bool binned = quarter_exact(graph);
  gray_walk(graph, [&](std::uint64_t state, double e) {
    const int up = std::popcount(state);
    if (binned) {
      auto& row = dos[std::llround(e * 4.0)];
      if (row.empty()) row.assign(static_cast<std::size_t>(n + 1), 0.0);
      row[static_cast<std::size_t>(up)] += 1.0;
    } else {
      raw.emplace_back(e, up);
    }
  });
  if (!binned) {
    for (const auto& [e, up] : raw) {
      auto& row = dos[std::llround(e * 1048576.0)];
      if (row.empty()) row.assign(static_cast<std::size_t>(n + 1), 0.0);
      row[static_cast<std::size_t>(up)] += 1.0;
    }
  }
  const double scale = binned ? 4.0 : 1048576.0;
  const double e_min = static_cast<double>(dos.begin()->first) / scale;

  std::vector<ExactThermo> out;
  for (double t : temperatures) {
    long double z = 0, se = 0, se2 = 0, sm = 0, sam = 0;
    for (const auto& [eq, row] : dos) {
      const long double e = static_cast<long double>(eq) / scale;
      const long double w = std::exp(-(e - e_min) / static_cast<long double>(t));
      for (int up = 0; up <= n; ++up) {
        const long double c = row[static_cast<std::size_t>(up)];
        if (c == 0) continue;
        const long double m = static_cast<long double>(2 * up - n) / n;
        z += w * c;
        se += w * c * e;
        se2 += w * c * e * e;
        sm += w * c * m;
        sam += w * c * std::fabs(m);
      }
    }
    ExactThermo r;
    r.temperature = t;
    r.mean_energy = static_cast<double>(se / z);
    r.mean_energy_sq = static_cast<double>(se2 / z);
    r.mean_magnetization = static_cast<double>(sm / z);
    r.mean_abs_magnetization = static_cast<double>(sam / z);
    r.log_partition = static_cast<double>(std::log(z)) - e_min / t;
    out.push_back(r);
  }
  return out;
}

std::vector<ExactThermo> exact_enumeration(const Sample& sample,
                                           std::span<const double> temperatures) {
  return exact_enumeration(BondGraph::from_sample(sample), temperatures);
}

double exact_expectation(const BondGraph& graph, double temperature,
                         const std::function<double(std::uint64_t)>& observable) {
  check_size(graph, max_enumeration_spins);
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be > 0");
  double e_min = std::numeric_limits<double>::infinity();
  gray_walk(graph, [&](std::uint64_t, double e) { e_min = std::min(e_min, e); });
  long double z = 0, s = 0;
  gray_walk(graph, [&](std::uint64_t state, double e) {
    const long double w = std::exp(-(static_cast<long double>(e) - e_min) / temperature);
    z += w;
    s += w * observable(state);
  });
  return static_cast<double>(s / z);
}

std::vector<double> exact_overlap_distribution(const BondGraph& graph, double temperature) {
  check_size(graph, max_overlap_spins);
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be > 0");
  const std::size_t n = graph.spins;
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<double> energy(total);
  gray_walk(graph, [&](std::uint64_t state, double e) { energy[state] = e; });
  const double e_min = *std::min_element(energy.begin(), energy.end());
  std::vector<long double> w(total);
  long double z = 0;
  for (std::uint64_t s = 0; s < total; ++s) {
    w[s] = std::exp(-(static_cast<long double>(energy[s]) - e_min) / temperature);
    z += w[s];
  }
  std::vector<long double> hist(2 * n + 1, 0.0L);
  for (std::uint64_t a = 0; a < total; ++a) {
    for (std::uint64_t b = 0; b < total; ++b) {
      const int q = static_cast<int>(n) - 2 * std::popcount(a ^ b);
      hist[static_cast<std::size_t>(q + static_cast<int>(n))] += w[a] * w[b];
    }
  }
  std::vector<double> out(hist.size());
  for (std::size_t k = 0; k < hist.size(); ++k) out[k] = static_cast<double>(hist[k] / (z * z));
  return out;
}

}  // namespace eamc
