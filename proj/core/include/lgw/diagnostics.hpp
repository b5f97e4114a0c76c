#pragma once

#include <cstddef>
#include <span>

#include "lgw/common.hpp"
#include "lgw/graph.hpp"
#include "lgw/sgns.hpp"

namespace lgw {

/// Positive-loss statistics of a frozen model: edges against random
/// non-adjacent pairs, and the spread of edge losses.
struct LossProfile {
  double edge_loss = 0.0;        // mean over every stored arc
  double background_loss = 0.0;  // mean over sampled non-adjacent ordered pairs
  double edge_background_ratio = 0.0;
  double q90_edge_loss = 0.0;  // nearest-rank 90th percentile
  double q90_mean_ratio = 0.0;
  std::size_t background_pairs = 0;
  bool background_defined = true;  // false when the graph has no non-adjacent pair
};

/// Background pairs are distinct ordered pairs (u, v), u != v, with no arc in
/// either direction, drawn fresh on every call by rejection. When fewer than
/// n_background such pairs exist, all of them are used. Throws data_error on a
/// graph without arcs.
LossProfile loss_profile(const EmbeddingModel& m, const Graph& g, Rng& rng,
                         std::size_t n_background = 1000);

/// Nearest-rank quantile: the ceil(q * n)-th smallest value.
double nearest_rank_quantile(std::span<const double> values, double q);

}  // namespace lgw
