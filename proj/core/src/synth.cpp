#include "lgw/synth.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace lgw {

PlantedPartitionSpec PlantedPartitionSpec::three_communities(std::size_t size, double intra,
                                                             double cross) {
  PlantedPartitionSpec s;
  s.sizes = {size, size, size};
  s.intra = intra;
  s.inter = {{0.0, cross, 0.0}, {cross, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  return s;
}

PlantedPartitionSpec PlantedPartitionSpec::desk_scale() {
  return three_communities(600, 0.02, 0.006);
}

PlantedPartitionSpec PlantedPartitionSpec::full_scale() {
  return three_communities(10000, 0.001, 0.0003);
}

std::size_t PlantedPartitionSpec::node_count() const {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  return n;
}

void validate(const PlantedPartitionSpec& spec) {
  const std::size_t k = spec.sizes.size();
  if (k == 0) throw config_error("planted partition needs at least one community");
  for (auto s : spec.sizes) {
    if (s == 0) throw config_error("community sizes must be >= 1");
  }
  auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!is_prob(spec.intra)) throw config_error("intra-community probability must be in [0, 1]");
  if (spec.inter.size() != k) throw config_error("inter-community matrix must be k x k");
  for (std::size_t a = 0; a < k; ++a) {
    if (spec.inter[a].size() != k) throw config_error("inter-community matrix must be k x k");
    for (std::size_t b = 0; b < k; ++b) {
      if (!is_prob(spec.inter[a][b])) throw config_error("probabilities must be in [0, 1]");
      if (spec.inter[a][b] != spec.inter[b][a]) throw config_error("inter-community matrix must be symmetric");
    }
    if (spec.inter[a][a] != 0.0) throw config_error("inter-community matrix must have a zero diagonal");
  }
}

namespace {

// Calls visit(index) for each of `pairs` indices kept independently with
// probability p, jumping geometric gaps between kept indices.
template <class Visit>
void bernoulli_skip(std::uint64_t pairs, double p, Rng& rng, Visit&& visit) {
  if (p <= 0.0 || pairs == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < pairs; ++i) visit(i);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t i = 0;
  while (true) {
    // Number of failures before the next success, Geometric(p).
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    const double gap = std::floor(std::log(u) / log_q);
    if (gap >= static_cast<double>(pairs - i)) return;
    i += static_cast<std::uint64_t>(gap);
    visit(i);
    if (++i >= pairs) return;
  }
}

// Index -> (row, col) with row < col over the strict upper triangle, enumerated
// column by column: index = col * (col - 1) / 2 + row.
std::pair<std::uint64_t, std::uint64_t> unrank_pair(std::uint64_t idx) {
  auto col = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(idx))) / 2.0);
  while (col * (col - 1) / 2 > idx) --col;
  while ((col + 1) * col / 2 <= idx) ++col;
  return {idx - col * (col - 1) / 2, col};
}

}  // namespace

SyntheticGraph generate(const PlantedPartitionSpec& spec, Rng& rng) {
  validate(spec);
  const std::size_t k = spec.sizes.size();
  SyntheticGraph out;
  std::vector<std::size_t> first(k + 1, 0);
  for (std::size_t c = 0; c < k; ++c) first[c + 1] = first[c] + spec.sizes[c];
  const std::size_t n = first[k];
  out.community.resize(n);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t v = first[c]; v < first[c + 1]; ++v) out.community[v] = c;
  }
  for (std::size_t v = 0; v < n; ++v) out.ids.intern(std::to_string(v));
  out.block_edges.assign(k, std::vector<std::size_t>(k, 0));

  auto add = [&](std::size_t a, std::size_t b, std::size_t u, std::size_t v) {
    out.edges.push_back({static_cast<node_id>(u), static_cast<node_id>(v), 1.0});
    ++out.block_edges[a][b];
    if (a != b) ++out.block_edges[b][a];
  };
  for (std::size_t a = 0; a < k; ++a) {
    const std::uint64_t size = spec.sizes[a];
    bernoulli_skip(size * (size - 1) / 2, spec.intra, rng, [&](std::uint64_t idx) {
      const auto [r, c] = unrank_pair(idx);
      add(a, a, first[a] + r, first[a] + c);
    });
    for (std::size_t b = a + 1; b < k; ++b) {
      const std::uint64_t cols = spec.sizes[b];
      bernoulli_skip(size * cols, spec.inter[a][b], rng, [&](std::uint64_t idx) {
        add(a, b, first[a] + idx / cols, first[b] + idx % cols);
      });
    }
  }
  out.graph = Graph::from_edges(n, out.edges, false);
  return out;
}

std::vector<std::vector<double>> community_training_share(
    std::span<const std::vector<node_id>> starts_per_epoch,
    std::span<const std::size_t> community, std::size_t community_count) {
  std::vector<std::vector<double>> out;
  out.reserve(starts_per_epoch.size());
  for (const auto& starts : starts_per_epoch) {
    std::vector<double> share(community_count, 0.0);
    for (node_id v : starts) share[community[v]] += 1.0;
    if (!starts.empty()) {
      for (auto& s : share) s /= static_cast<double>(starts.size());
    }
    out.push_back(std::move(share));
  }
  return out;
}

void write_edge_list(std::ostream& out, const SyntheticGraph& g) {
  for (const auto& e : g.edges) out << g.ids.name(e.from) << ' ' << g.ids.name(e.to) << '\n';
}

void write_labels(std::ostream& out, const SyntheticGraph& g) {
  for (std::size_t v = 0; v < g.community.size(); ++v) {
    out << g.ids.name(static_cast<node_id>(v)) << ' ' << g.community[v] << '\n';
  }
}

}  // namespace lgw
