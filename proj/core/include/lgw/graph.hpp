#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lgw/common.hpp"

namespace lgw {

struct WeightedEdge {
  node_id from;
  node_id to;
  double weight;
};

/// Immutable weighted graph in compressed sparse row form.
///
/// Adjacency lists are sorted by neighbor id so arc lookups are a binary
/// search. Undirected graphs store both arcs of every edge.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an edge list. Self-loops and zero-weight edges are
  /// dropped, repeated edges keep their first weight. Throws data_error on a
  /// negative or non-finite weight or an endpoint >= node_count.
  static Graph from_edges(std::size_t node_count, std::span<const WeightedEdge> edges,
                          bool directed);

  std::size_t node_count() const { return node_count_; }
  std::size_t arc_count() const { return neighbors_.size(); }
  bool directed() const { return directed_; }

  std::size_t out_degree(node_id u) const { return offsets_[u + 1] - offsets_[u]; }
  std::span<const node_id> neighbors(node_id u) const {
    return {neighbors_.data() + offsets_[u], out_degree(u)};
  }
  std::span<const double> weights(node_id u) const {
    return {weights_.data() + offsets_[u], out_degree(u)};
  }

  std::size_t arc_begin(node_id u) const { return offsets_[u]; }
  node_id arc_target(std::size_t arc) const { return neighbors_[arc]; }

  bool has_arc(node_id u, node_id v) const;
  double weighted_out_degree(node_id u) const;

  const std::vector<std::size_t>& offsets() const { return offsets_; }
  const std::vector<node_id>& neighbor_array() const { return neighbors_; }
  const std::vector<double>& weight_array() const { return weights_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t node_count_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<node_id> neighbors_;
  std::vector<double> weights_;
  bool directed_ = false;
};

/// Bidirectional mapping between external string ids and dense node ids.
class IdMap {
 public:
  node_id intern(std::string_view name);
  std::optional<node_id> find(std::string_view name) const;
  const std::string& name(node_id id) const { return names_[id]; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const IdMap& a, const IdMap& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, node_id> index_;
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t edges_read = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t zero_weight_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

struct LoadedGraph {
  Graph graph;
  IdMap ids;
  LoadStats stats;
};

/// Parses a whitespace-separated edge list ("u v" or "u v w" per line, '#'
/// comments). Node ids are interned in first-seen order; a missing weight is
/// 1.0. Throws data_error naming the offending line.
LoadedGraph load_edge_list(std::istream& in, bool directed);
LoadedGraph load_edge_list_file(const std::string& path, bool directed);

/// Per-node alias tables over outgoing arcs, weight-proportional.
class AliasSampler {
 public:
  AliasSampler() = default;
  explicit AliasSampler(const Graph& g);

  /// Samples an arc index (into Graph's CSR arrays) out of u, or nullopt
  /// when u is a dead end.
  std::optional<std::size_t> sample_arc(const Graph& g, node_id u, Rng& rng) const;

 private:
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

/// Samples j with probability w_uj / sum_h w_uh; nullopt when u has no out-arcs.
std::optional<node_id> sample_neighbor(const Graph& g, const AliasSampler& s, node_id u,
                                       Rng& rng);

}  // namespace lgw
