#include "lgw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

namespace lgw {

namespace {

// Mean taken as offsets from the first value, so a constant sample returns
// that constant exactly.
double shifted_mean(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x - v.front();
  return v.front() + acc / static_cast<double>(v.size());
}

}  // namespace

double nearest_rank_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw config_error("quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

LossProfile loss_profile(const EmbeddingModel& m, const Graph& g, Rng& rng,
                         std::size_t n_background) {
  if (g.arc_count() == 0) throw data_error("loss profile needs a graph with at least one edge");
  if (n_background == 0) throw config_error("loss profile needs n_background >= 1");
  const std::size_t n = g.node_count();
  LossProfile p;

  std::vector<double> edge_losses;
  edge_losses.reserve(g.arc_count());
  std::size_t adjacent_ordered = 0;
  for (node_id u = 0; u < n; ++u) {
    for (node_id v : g.neighbors(u)) {
      edge_losses.push_back(pos_loss(m, u, v));
      adjacent_ordered += g.has_arc(v, u) ? 1 : 2;
    }
  }
  p.edge_loss = shifted_mean(edge_losses);
  p.q90_edge_loss = nearest_rank_quantile(edge_losses, 0.9);
  p.q90_mean_ratio = p.edge_loss > 0.0 ? p.q90_edge_loss / p.edge_loss : 0.0;

  auto adjacent = [&](node_id u, node_id v) { return g.has_arc(u, v) || g.has_arc(v, u); };
  const std::size_t available = n * (n - 1) - adjacent_ordered;
  if (available == 0) {
    p.background_defined = false;
    return p;
  }
  std::vector<double> bg;
  if (available <= n_background) {
    for (node_id u = 0; u < n; ++u) {
      for (node_id v = 0; v < n; ++v) {
        if (u == v || adjacent(u, v)) continue;
        bg.push_back(pos_loss(m, u, v));
      }
    }
  } else {
    std::unordered_set<std::uint64_t> seen;
    while (bg.size() < n_background) {
      const auto u = static_cast<node_id>(uniform_index(rng, n));
      const auto v = static_cast<node_id>(uniform_index(rng, n));
      if (u == v || adjacent(u, v)) continue;
      if (!seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) continue;
      bg.push_back(pos_loss(m, u, v));
    }
  }
  p.background_pairs = bg.size();
  p.background_loss = shifted_mean(bg);
  p.edge_background_ratio = p.background_loss > 0.0 ? p.edge_loss / p.background_loss : 0.0;
  return p;
}

}  // namespace lgw
