#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "lgw/synth.hpp"
#include "oracles.hpp"

using namespace lgw;

namespace {

// Component label per node by union-find.
std::vector<std::size_t> components(const Graph& g) {
  std::vector<std::size_t> parent(g.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (node_id u = 0; u < g.node_count(); ++u) {
    for (node_id v : g.neighbors(u)) parent[find(u)] = find(v);
  }
  std::vector<std::size_t> out(g.node_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = find(i);
  return out;
}

void check_blocks_within_3_sigma(const PlantedPartitionSpec& spec, const SyntheticGraph& g) {
  const std::size_t k = spec.sizes.size();
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const double pairs = a == b ? spec.sizes[a] * (spec.sizes[a] - 1.0) / 2.0
                                  : static_cast<double>(spec.sizes[a]) * spec.sizes[b];
      const double p = a == b ? spec.intra : spec.inter[a][b];
      const double mean = pairs * p;
      const double sd = std::sqrt(pairs * p * (1.0 - p));
      const double got = static_cast<double>(g.block_edges[a][b]);
      CHECK(std::abs(got - mean) <= 3.0 * sd + 1e-9);
    }
  }
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("full intra probability and no cross edges gives two triangles") {
    PlantedPartitionSpec spec{{3, 3}, 1.0, {{0, 0}, {0, 0}}};
    Rng rng(1);
    const auto g = generate(spec, rng);
    CHECK(g.edges.size() == 6);
    CHECK(g.graph.arc_count() == 12);
    for (node_id u = 0; u < 6; ++u) {
      CHECK(g.graph.out_degree(u) == 2);
      for (node_id v : g.graph.neighbors(u)) CHECK(g.community[u] == g.community[v]);
    }
    CHECK(g.community == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
  }

  TEST_CASE("desk-scale block counts are binomial") {
    const auto spec = PlantedPartitionSpec::desk_scale();
    CHECK(spec.node_count() == 1800);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      const auto g = generate(spec, rng);
      check_blocks_within_3_sigma(spec, g);
      CHECK(g.block_edges[0][2] == 0);
      CHECK(g.block_edges[1][2] == 0);
    }
  }

  TEST_CASE("full-scale block counts are binomial") {
    const auto spec = PlantedPartitionSpec::full_scale();
    Rng rng(2);
    const auto g = generate(spec, rng);
    // Expected 49995 per community and 30000 red-green.
    check_blocks_within_3_sigma(spec, g);
    CHECK(std::abs(static_cast<double>(g.block_edges[0][1]) - 30000.0) <= 3 * std::sqrt(30000.0));
  }

  TEST_CASE("pairs within a block are hit uniformly") {
    PlantedPartitionSpec spec{{5}, 0.3, {{0}}};
    std::vector<std::uint64_t> counts(10, 0);
    Rng rng(3);
    for (int t = 0; t < 20000; ++t) {
      const auto g = generate(spec, rng);
      for (const auto& e : g.edges) {
        CHECK(e.from < e.to);
        // column-major index over the upper triangle
        ++counts[e.to * (e.to - 1) / 2 + e.from];
      }
    }
    CHECK(test::fits(counts, std::vector<double>(10, 0.1)));
  }

  TEST_CASE("without cross edges components stay inside communities") {
    Rng rng(4);
    const auto spec = PlantedPartitionSpec::three_communities(50, 0.1, 0.0);
    const auto g = generate(spec, rng);
    const auto comp = components(g.graph);
    for (std::size_t u = 0; u < comp.size(); ++u) {
      for (std::size_t v = 0; v < comp.size(); v += 13) {
        if (comp[u] == comp[v]) CHECK(g.community[u] == g.community[v]);
      }
    }
  }

  TEST_CASE("labels partition the nodes") {
    Rng rng(5);
    const auto g = generate(PlantedPartitionSpec::three_communities(40, 0.1, 0.02), rng);
    std::vector<std::size_t> sizes(3, 0);
    for (auto c : g.community) ++sizes[c];
    CHECK(sizes == std::vector<std::size_t>{40, 40, 40});
    CHECK(g.ids.size() == 120);
  }

  TEST_CASE("same seed, same graph") {
    Rng a(6), b(6);
    const auto spec = PlantedPartitionSpec::desk_scale();
    CHECK(generate(spec, a).graph == generate(spec, b).graph);
  }

  TEST_CASE("planted partition validation") {
    Rng rng(7);
    CHECK_THROWS_AS(generate(PlantedPartitionSpec{{}, 0.1, {}}, rng), config_error);
    CHECK_THROWS_AS(generate(PlantedPartitionSpec{{3}, 1.5, {{0}}}, rng), config_error);
    CHECK_THROWS_AS(generate(PlantedPartitionSpec{{3, 3}, 0.5, {{0, 0.1}, {0.2, 0}}}, rng), config_error);
    CHECK_THROWS_AS(generate(PlantedPartitionSpec{{3, 3}, 0.5, {{0, 0}}}, rng), config_error);
  }

  TEST_CASE("training share of a full pass is one third per community") {
    const std::vector<std::size_t> community{0, 0, 1, 1, 2, 2};
    std::vector<std::vector<node_id>> epochs{{5, 4, 3, 2, 1, 0}, {0, 0, 0, 1}, {}};
    const auto share = community_training_share(epochs, community, 3);
    for (double s : share[0]) CHECK(s == 1.0 / 3.0);
    CHECK(share[1] == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(share[2] == std::vector<double>{0.0, 0.0, 0.0});
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
      std::vector<node_id> starts(1 + uniform_index(rng, 30));
      for (auto& s : starts) s = static_cast<node_id>(uniform_index(rng, 6));
      const auto sh = community_training_share(std::vector<std::vector<node_id>>{starts}, community, 3);
      CHECK(sh[0][0] + sh[0][1] + sh[0][2] == doctest::Approx(1.0));
    }
  }

  TEST_CASE("edge and label files round trip through the loader") {
    Rng rng(9);
    const auto g = generate(PlantedPartitionSpec::three_communities(30, 0.3, 0.05), rng);
    std::ostringstream edges, labels;
    write_edge_list(edges, g);
    write_labels(labels, g);
    std::istringstream in(edges.str());
    const auto back = load_edge_list(in, false);
    CHECK(back.graph.arc_count() == g.graph.arc_count());
    for (const auto& e : g.edges) {
      const auto u = back.ids.find(g.ids.name(e.from));
      const auto v = back.ids.find(g.ids.name(e.to));
      REQUIRE(u.has_value());
      REQUIRE(v.has_value());
      CHECK(back.graph.has_arc(*u, *v));
    }
    std::istringstream lin(labels.str());
    std::string id;
    std::size_t c = 0, lines = 0;
    while (lin >> id >> c) {
      CHECK(g.community[std::stoul(id)] == c);
      ++lines;
    }
    CHECK(lines == 90);
  }
}
