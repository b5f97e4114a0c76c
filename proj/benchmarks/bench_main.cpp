#include <benchmark/benchmark.h>

#include "lgw/selector.hpp"
#include "lgw/synth.hpp"

using namespace lgw;

namespace {

const SyntheticGraph& desk_graph() {
  static const SyntheticGraph g = [] {
    Rng rng(1);
    return generate(PlantedPartitionSpec::desk_scale(), rng);
  }();
  return g;
}

void BM_alias_sample(benchmark::State& state) {
  const auto& g = desk_graph().graph;
  const AliasSampler s(g);
  Rng rng(2);
  node_id u = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.sample_arc(g, u, rng));
    u = (u + 1) % g.node_count();
  }
}
BENCHMARK(BM_alias_sample);

void BM_simple_walk(benchmark::State& state) {
  const auto& g = desk_graph().graph;
  const AliasSampler s(g);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(simple_walk(g, s, 7, 10, rng));
}
BENCHMARK(BM_simple_walk);

void BM_node2vec_walk(benchmark::State& state) {
  const auto& g = desk_graph().graph;
  const AliasSampler s(g);
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(node2vec_walk(g, s, 7, 10, 0.5, 2.0, rng));
}
BENCHMARK(BM_node2vec_walk);

void BM_loss_guided_walk(benchmark::State& state) {
  const auto& g = desk_graph().graph;
  Rng rng(5);
  const auto m = init_model(g.node_count(), 16, rng);
  for (auto _ : state) benchmark::DoNotOptimize(loss_guided_walk(g, m, 7, 10, 1.0, rng));
}
BENCHMARK(BM_loss_guided_walk);

void BM_update_on_walk(benchmark::State& state) {
  const auto& g = desk_graph().graph;
  const AliasSampler s(g);
  Rng rng(6);
  auto m = init_model(g.node_count(), static_cast<std::size_t>(state.range(0)), rng);
  NegativeTable tbl(g.node_count());
  const UpdateOptions opt;
  for (auto _ : state) {
    const Walk w = simple_walk(g, s, static_cast<node_id>(uniform_index(rng, g.node_count())), 10, rng);
    benchmark::DoNotOptimize(update_on_walk(m, w, tbl, opt, rng));
  }
}
BENCHMARK(BM_update_on_walk)->Arg(16)->Arg(128);

void BM_weighted_sample_wor(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  std::vector<double> w(n);
  for (auto& x : w) x = uniform01(rng);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_sample_wor(w, n / 10, rng));
}
BENCHMARK(BM_weighted_sample_wor)->Arg(1800)->Arg(30000);

void BM_loss_guided_epoch(benchmark::State& state) {
  const auto& g = desk_graph().graph;
  TrainConfig cfg;
  cfg.dim = 10;
  cfg.epochs = 1000;
  TrainingState st(g, cfg, 8);
  run_baseline_epoch(st);
  const auto plan = make_round_plan(g.node_count(), 10);
  for (auto _ : state) benchmark::DoNotOptimize(run_loss_guided_epoch(st, ScoreFn::prefix(1, 32.0), plan));
}
BENCHMARK(BM_loss_guided_epoch)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
