#include "lgw/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace lgw {

Graph Graph::from_edges(std::size_t node_count, std::span<const WeightedEdge> edges,
                        bool directed) {
  struct Arc {
    node_id from;
    node_id to;
    double weight;
    std::size_t order;
  };
  std::vector<Arc> arcs;
  arcs.reserve(directed ? edges.size() : 2 * edges.size());
  std::size_t order = 0;
  for (const auto& e : edges) {
    if (e.from >= node_count || e.to >= node_count) {
      throw data_error("edge endpoint out of range");
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw data_error("edge weight must be a finite nonnegative number");
    }
    if (e.from == e.to || e.weight == 0.0) continue;
    arcs.push_back({e.from, e.to, e.weight, order});
    if (!directed) arcs.push_back({e.to, e.from, e.weight, order});
    ++order;
  }
  // Stable order within (from, to) keeps the first occurrence of repeats.
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    return a.order < b.order;
  });
  arcs.erase(std::unique(arcs.begin(), arcs.end(),
                         [](const Arc& a, const Arc& b) {
                           return a.from == b.from && a.to == b.to;
                         }),
             arcs.end());

  Graph g;
  g.node_count_ = node_count;
  g.directed_ = directed;
  g.offsets_.assign(node_count + 1, 0);
  g.neighbors_.reserve(arcs.size());
  g.weights_.reserve(arcs.size());
  for (const auto& a : arcs) {
    ++g.offsets_[a.from + 1];
    g.neighbors_.push_back(a.to);
    g.weights_.push_back(a.weight);
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  return g;
}

bool Graph::has_arc(node_id u, node_id v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

double Graph::weighted_out_degree(node_id u) const {
  const auto w = weights(u);
  return std::accumulate(w.begin(), w.end(), 0.0);
}

node_id IdMap::intern(std::string_view name) {
  std::string key(name);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const auto id = static_cast<node_id>(names_.size());
  names_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<node_id> IdMap::find(std::string_view name) const {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  return std::nullopt;
}

namespace {

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw data_error("edge list line " + std::to_string(line) + ": " + what);
}

}  // namespace

LoadedGraph load_edge_list(std::istream& in, bool directed) {
  LoadedGraph out;
  std::vector<WeightedEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++out.stats.lines;
    std::istringstream fields(line);
    std::string u, v, w, extra;
    if (!(fields >> u) || u.front() == '#') continue;
    if (!(fields >> v)) fail_line(line_no, "expected \"u v [w]\"");
    double weight = 1.0;
    if (fields >> w) {
      const char* first = w.data();
      const char* last = w.data() + w.size();
      auto [ptr, ec] = std::from_chars(first, last, weight);
      if (ec != std::errc() || ptr != last) fail_line(line_no, "malformed weight \"" + w + "\"");
      if (!std::isfinite(weight) || weight < 0.0) {
        fail_line(line_no, "weight must be positive, got " + w);
      }
      if (fields >> extra) fail_line(line_no, "unexpected trailing token \"" + extra + "\"");
    }
    const node_id a = out.ids.intern(u);
    const node_id b = out.ids.intern(v);
    ++out.stats.edges_read;
    if (a == b) {
      ++out.stats.self_loops_dropped;
      continue;
    }
    if (weight == 0.0) {
      ++out.stats.zero_weight_dropped;
      continue;
    }
    edges.push_back({a, b, weight});
  }
  if (out.stats.edges_read == 0) throw data_error("edge list is empty");
  out.graph = Graph::from_edges(out.ids.size(), edges, directed);
  const std::size_t kept = directed ? out.graph.arc_count() : out.graph.arc_count() / 2;
  out.stats.duplicates_dropped = edges.size() - kept;
  return out;
}

LoadedGraph load_edge_list_file(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open edge list " + path);
  return load_edge_list(in, directed);
}

AliasSampler::AliasSampler(const Graph& g)
    : accept_(g.arc_count(), 1.0), alias_(g.arc_count(), 0) {
  std::vector<std::uint32_t> small, large;
  std::vector<double> scaled;
  for (node_id u = 0; u < g.node_count(); ++u) {
    const auto w = g.weights(u);
    const std::size_t n = w.size();
    if (n == 0) continue;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    const std::size_t base = g.arc_begin(u);
    scaled.resize(n);
    small.clear();
    large.clear();
    for (std::size_t k = 0; k < n; ++k) {
      scaled[k] = w[k] * static_cast<double>(n) / total;
      alias_[base + k] = static_cast<std::uint32_t>(k);
      (scaled[k] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(k));
    }
    while (!small.empty() && !large.empty()) {
      const auto s = small.back();
      small.pop_back();
      const auto l = large.back();
      accept_[base + s] = scaled[s];
      alias_[base + s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    // Leftovers are 1 up to rounding.
    for (auto k : small) accept_[base + k] = 1.0;
    for (auto k : large) accept_[base + k] = 1.0;
  }
}

std::optional<std::size_t> AliasSampler::sample_arc(const Graph& g, node_id u,
                                                    Rng& rng) const {
  const std::size_t n = g.out_degree(u);
  if (n == 0) return std::nullopt;
  const std::size_t base = g.arc_begin(u);
  const std::size_t k = base + uniform_index(rng, n);
  if (n == 1 || uniform01(rng) < accept_[k]) return k;
  return base + alias_[k];
}

std::optional<node_id> sample_neighbor(const Graph& g, const AliasSampler& s, node_id u,
                                       Rng& rng) {
  if (auto arc = s.sample_arc(g, u, rng)) return g.arc_target(*arc);
  return std::nullopt;
}

}  // namespace lgw
