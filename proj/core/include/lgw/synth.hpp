#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "lgw/common.hpp"
#include "lgw/graph.hpp"

namespace lgw {

/// Planted partition: communities of the given sizes, same-community pairs
/// linked with probability `intra`, pairs across communities a and b with
/// probability inter[a][b].
struct PlantedPartitionSpec {
  std::vector<std::size_t> sizes;
  double intra = 0.0;
  std::vector<std::vector<double>> inter;

  /// Three communities of `size` nodes; the first two linked by `cross`, the
  /// third isolated.
  static PlantedPartitionSpec three_communities(std::size_t size, double intra, double cross);
  /// 3 x 600 nodes, intra 0.02, cross 0.006.
  static PlantedPartitionSpec desk_scale();
  /// 3 x 10^4 nodes, intra 0.001, cross 0.0003.
  static PlantedPartitionSpec full_scale();

  std::size_t node_count() const;
};

void validate(const PlantedPartitionSpec& spec);

struct SyntheticGraph {
  Graph graph;
  IdMap ids;  // node i is named by its decimal index
  std::vector<std::size_t> community;
  std::vector<WeightedEdge> edges;  // each undirected edge once, from < to
  std::vector<std::vector<std::size_t>> block_edges;  // per community pair
};

/// Samples every block with geometric skips over pair indices, O(edges).
SyntheticGraph generate(const PlantedPartitionSpec& spec, Rng& rng);

/// Per epoch, the share of trained walks that started in each community.
std::vector<std::vector<double>> community_training_share(
    std::span<const std::vector<node_id>> starts_per_epoch,
    std::span<const std::size_t> community, std::size_t community_count);

/// "u v" lines, one per edge.
void write_edge_list(std::ostream& out, const SyntheticGraph& g);
/// "node community" lines, one per node.
void write_labels(std::ostream& out, const SyntheticGraph& g);

}  // namespace lgw
