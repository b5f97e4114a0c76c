#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "lgw/selector.hpp"
#include "oracles.hpp"

using namespace lgw;

namespace {

Graph cycle(std::size_t n) {
  std::vector<WeightedEdge> e;
  for (node_id i = 0; i < n; ++i) e.push_back({i, static_cast<node_id>((i + 1) % n), 1.0});
  return Graph::from_edges(n, e, false);
}

Graph small_world(std::size_t n, Rng& rng) {
  std::vector<WeightedEdge> e;
  for (node_id i = 0; i < n; ++i) {
    e.push_back({i, static_cast<node_id>((i + 1) % n), 1.0});
    e.push_back({i, static_cast<node_id>(uniform_index(rng, n)), 1.0});
  }
  return Graph::from_edges(n, e, false);
}

std::vector<double> empirical_inclusion(const std::vector<double>& w, std::size_t k, int trials,
                                        Rng& rng) {
  std::vector<double> hits(w.size(), 0.0);
  for (int t = 0; t < trials; ++t) {
    for (auto i : weighted_sample_wor(w, k, rng)) hits[i] += 1.0;
  }
  for (auto& h : hits) h /= trials;
  return hits;
}

TrainConfig small_config(std::size_t epochs = 3) {
  TrainConfig cfg;
  cfg.walk_length = 5;
  cfg.window = 3;
  cfg.negatives = 2;
  cfg.dim = 4;
  cfg.epochs = epochs;
  return cfg;
}

}  // namespace

TEST_SUITE("selector") {
  TEST_CASE("prefix score of one edge is that edge's loss to the power") {
    Rng rng(1);
    auto m = init_model(4, 3, rng);
    for (auto& x : m.context_matrix()) x = uniform01(rng) - 0.5;
    const Walk w{{0, 1, 2, 3}};
    CHECK(lscore_prefix(m, w, 1, 1.0) == pos_loss(m, 0, 1));
    CHECK(lscore_prefix(m, w, 1, 3.0) == doctest::Approx(std::pow(pos_loss(m, 0, 1), 3.0)));
    CHECK(lscore_prefix(m, w, 2, 2.0) ==
          doctest::Approx(std::pow(pos_loss(m, 0, 1), 2.0) + std::pow(pos_loss(m, 1, 2), 2.0)));
  }

  TEST_CASE("edge loss 0.5 at power 4 scores 0.0625") {
    EmbeddingModel m(2, 1);
    m.focus(0)[0] = 1.0;
    m.context(1)[0] = -std::log(std::expm1(0.5));
    CHECK(lscore_prefix(m, Walk{{0, 1}}, 1, 4.0) == doctest::Approx(0.0625).epsilon(1e-12));
  }

  TEST_CASE("single-edge ranking is invariant to the power") {
    Rng rng(2);
    EmbeddingModel m(10, 2);
    for (auto& x : m.focus_matrix()) x = uniform01(rng) - 0.5;
    for (auto& x : m.context_matrix()) x = 4.0 * uniform01(rng) - 2.0;
    std::vector<Walk> walks;
    for (node_id i = 0; i < 9; ++i) walks.push_back(Walk{{i, static_cast<node_id>(i + 1)}});
    auto order = [&](double p) {
      std::vector<std::size_t> idx(walks.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        return lscore_prefix(m, walks[a], 1, p) < lscore_prefix(m, walks[b], 1, p);
      });
      return idx;
    };
    const auto base = order(1.0);
    for (double p : {0.5, 2.0, 4.0, 32.0}) CHECK(order(p) == base);
  }

  TEST_CASE("all-pairs score on two nodes") {
    Rng rng(3);
    auto m = init_model(2, 3, rng);
    for (auto& x : m.context_matrix()) x = uniform01(rng) - 0.5;
    const Walk w{{0, 1}};
    for (std::size_t window : {1, 2, 10}) {
      CHECK(lscore_all(m, w, window, 2.0) ==
            doctest::Approx(std::pow(pos_loss(m, 0, 1), 2.0) + std::pow(pos_loss(m, 1, 0), 2.0)));
    }
  }

  TEST_CASE("all-pairs score on three nodes, window 2") {
    Rng rng(4);
    auto m = init_model(3, 3, rng);
    for (auto& x : m.context_matrix()) x = uniform01(rng) - 0.5;
    const Walk w{{0, 1, 2}};
    const double want = pos_loss(m, 0, 1) + pos_loss(m, 1, 0) + pos_loss(m, 1, 2) +
                        pos_loss(m, 2, 1) + 0.5 * (pos_loss(m, 0, 2) + pos_loss(m, 2, 0));
    CHECK(lscore_all(m, w, 2, 1.0) == doctest::Approx(want).epsilon(1e-12));
  }

  TEST_CASE("constant loss field: all-pairs score is (ln 2)^p times the expected pair count") {
    EmbeddingModel m(11, 4);  // zero context: every loss is ln 2
    Walk w;
    for (node_id i = 0; i < 11; ++i) w.nodes.push_back(i);
    for (std::size_t window : {1, 3, 10}) {
      for (double p : {1.0, 2.0, 4.0}) {
        CHECK(lscore_all(m, w, window, p) ==
              doctest::Approx(std::pow(std::log(2.0), p) * expected_pair_count(11, window)).epsilon(1e-12));
      }
    }
    CHECK(window_pair_count(11, 10) == 110);
    CHECK(window_pair_count(3, 1) == 4);
  }

  TEST_CASE("all-pairs score equals the Monte Carlo mean over skip draws") {
    Rng rng(5);
    auto m = init_model(6, 3, rng);
    for (auto& x : m.context_matrix()) x = uniform01(rng) - 0.5;
    const Walk w{{0, 1, 2, 3, 4, 5}};
    const int draws = 40000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
      for (const auto& [a, b] : gen_pairs(w, 3, rng)) sum += pos_loss(m, a, b);
    }
    CHECK(std::abs(sum / draws / lscore_all(m, w, 3, 1.0) - 1.0) <= 0.01);
  }

  TEST_CASE("score validation") {
    CHECK_NOTHROW(validate(ScoreFn::prefix(3, 1.0), 10));
    CHECK_THROWS_AS(validate(ScoreFn::prefix(0, 1.0), 10), config_error);
    CHECK_THROWS_AS(validate(ScoreFn::prefix(11, 1.0), 10), config_error);
    CHECK_THROWS_AS(validate(ScoreFn::all(-1.0), 10), config_error);
    CHECK_NOTHROW(validate(ScoreFn::all(0.0), 10));
  }

  TEST_CASE("WOR: equal weights with k = n returns every index") {
    Rng rng(6);
    auto got = weighted_sample_wor(std::vector<double>(7, 1.0), 7, rng);
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
  }

  TEST_CASE("WOR: weights (1, 0, 0), k = 1 always picks 0") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) CHECK(weighted_sample_wor(std::vector<double>{1, 0, 0}, 1, rng).front() == 0);
  }

  TEST_CASE("WOR oracle: (2, 1, 1), k = 2") {
    const auto incl = test::wor_inclusion({2, 1, 1}, 2);
    CHECK(incl[0] == test::Fraction{5, 6});
    CHECK(incl[1] == test::Fraction{7, 12});
    CHECK(incl[2] == test::Fraction{7, 12});
    CHECK(incl[0] + incl[1] + incl[2] == test::Fraction{2, 1});
    Rng rng(8);
    const auto emp = empirical_inclusion({2, 1, 1}, 2, 100000, rng);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(emp[i] - incl[i].value()) <= 0.01);
  }

  TEST_CASE("WOR matches enumeration on random small instances") {
    Rng rng(9);
    for (int trial = 0; trial < 8; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 5);
      std::vector<std::int64_t> w(n);
      std::size_t positive = 0;
      for (auto& x : w) {
        x = static_cast<std::int64_t>(uniform_index(rng, 6));
        positive += x > 0;
      }
      if (positive == 0) continue;
      const std::size_t k = 1 + uniform_index(rng, positive);
      const auto incl = test::wor_inclusion(w, k);
      test::Fraction sum;
      for (const auto& f : incl) sum = sum + f;
      CHECK(sum == test::Fraction{static_cast<__int128>(k), 1});
      const std::vector<double> wd(w.begin(), w.end());
      const auto emp = empirical_inclusion(wd, k, 100000, rng);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(emp[i] - incl[i].value()) <= 0.01);
    }
  }

  TEST_CASE("WOR selection is unchanged by scaling the weights") {
    const std::vector<double> w{3.0, 0.5, 1.25, 2.0, 0.0, 7.0};
    std::vector<double> w4, w3;
    for (double x : w) {
      w4.push_back(4.0 * x);
      w3.push_back(3.0 * x);
    }
    Rng a(10), b(10);
    for (int i = 0; i < 1000; ++i) CHECK(weighted_sample_wor(w, 3, a) == weighted_sample_wor(w4, 3, b));
    Rng c(11), d(12);
    const auto e1 = empirical_inclusion(w, 3, 100000, c);
    const auto e3 = empirical_inclusion(w3, 3, 100000, d);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(e1[i] - e3[i]) <= 0.01);
  }

  TEST_CASE("WOR fills from zero weights uniformly when positives run out") {
    Rng rng(13);
    const std::vector<double> w{1.0, 0.0, 0.0, 0.0};
    const auto emp = empirical_inclusion(w, 3, 60000, rng);
    CHECK(emp[0] == 1.0);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(emp[i] - 2.0 / 3.0) <= 0.01);
    const auto uniform = empirical_inclusion(std::vector<double>(5, 0.0), 2, 50000, rng);
    for (double p : uniform) CHECK(std::abs(p - 0.4) <= 0.01);
  }

  TEST_CASE("WOR input validation") {
    Rng rng(14);
    CHECK_THROWS_AS(weighted_sample_wor(std::vector<double>{1, 2}, 3, rng), config_error);
    CHECK_THROWS_AS(weighted_sample_wor(std::vector<double>{1, -2}, 1, rng), config_error);
    CHECK_THROWS_AS(weighted_sample_wor(std::vector<double>{1, NAN}, 1, rng), config_error);
    CHECK(weighted_sample_wor(std::vector<double>{1, 2}, 0, rng).empty());
  }

  TEST_CASE("round plan arithmetic") {
    const auto plan = make_round_plan(20, 10);
    CHECK(plan.rounds == 10);
    CHECK(plan.candidates == 20);
    CHECK(plan.selected == 2);
    CHECK(make_round_plan(25, 10).selected == 2);
    CHECK_THROWS_AS(make_round_plan(5, 6), config_error);
    CHECK_THROWS_AS(make_round_plan(5, 0), config_error);
  }

  TEST_CASE("baseline epoch trains every start node once") {
    const auto g = cycle(5);
    TrainingState st(g, small_config(), 1);
    const auto s1 = run_baseline_epoch(st);
    CHECK(s1.walks_trained == 5);
    auto starts = s1.start_nodes;
    std::sort(starts.begin(), starts.end());
    CHECK(starts == std::vector<node_id>{0, 1, 2, 3, 4});
    CHECK(st.walks_consumed() == 5);
    CHECK(s1.updates.negative_pairs == 2 * s1.updates.positive_pairs);
  }

  TEST_CASE("baseline positive pairs sum over the trained walks") {
    // Replay the epoch's rng stream by hand: same seed, same draws.
    const auto g = cycle(5);
    TrainingState a(g, small_config(1), 2);
    const auto stats = run_baseline_epoch(a);
    TrainingState b(g, small_config(1), 2);
    std::size_t pairs = 0;
    std::vector<node_id> order{0, 1, 2, 3, 4};
    shuffle(order, b.rng());
    const WalkGenerator gen(g, b.sampler(), SimpleWalkKind{});
    for (node_id v : order) {
      const auto w = gen.draw(v, 5, b.rng());
      pairs += b.train_walk(w).positive_pairs;
      b.maybe_refresh_negatives();
    }
    CHECK(order == stats.start_nodes);
    CHECK(stats.updates.positive_pairs == pairs);
    CHECK(a.model() == b.model());
  }

  TEST_CASE("shuffle order differs between epochs") {
    Rng rng(3);
    const auto g = small_world(40, rng);
    TrainingState st(g, small_config(), 3);
    const auto e1 = run_baseline_epoch(st);
    const auto e2 = run_baseline_epoch(st);
    CHECK(e1.start_nodes != e2.start_nodes);
  }

  TEST_CASE("loss-guided epoch accounting: |V| = 20, F = 10") {
    const auto g = cycle(20);
    TrainingState st(g, small_config(), 4);
    run_baseline_epoch(st);
    const auto stats = run_loss_guided_epoch(st, ScoreFn::prefix(1, 32.0), make_round_plan(20, 10));
    CHECK(stats.walks_trained == 20);
    CHECK(stats.candidates_scored == 200);
    CHECK(stats.score_loss_evaluations == 200);
    CHECK(stats.start_nodes.size() == 20);
    CHECK(st.walks_consumed() == 40);

    const auto s3 = run_loss_guided_epoch(st, ScoreFn::prefix(3, 1.0), make_round_plan(20, 4));
    CHECK(s3.walks_trained == 20);
    CHECK(s3.candidates_scored == 80);
    CHECK(s3.score_loss_evaluations == 240);

    const auto all = run_loss_guided_epoch(st, ScoreFn::all(1.0), make_round_plan(20, 3));
    CHECK(all.walks_trained == 18);
    CHECK(all.candidates_scored == 60);
    CHECK(all.score_loss_evaluations == 60 * window_pair_count(6, 3));
  }

  TEST_CASE("F = 1 trains every node once") {
    Rng rng(5);
    const auto g = small_world(30, rng);
    TrainingState st(g, small_config(), 5);
    const auto stats = run_loss_guided_epoch(st, ScoreFn::prefix(2, 1.0), make_round_plan(30, 1));
    auto starts = stats.start_nodes;
    std::sort(starts.begin(), starts.end());
    std::vector<node_id> all(30);
    std::iota(all.begin(), all.end(), 0);
    CHECK(starts == all);
  }

  TEST_CASE("constant scores select start nodes uniformly") {
    Rng rng(6);
    const auto g = small_world(10, rng);
    TrainingState st(g, small_config(200), 6);
    std::vector<std::uint64_t> counts(10, 0);
    for (int e = 0; e < 200; ++e) {
      // Power 0 makes every score 1.
      for (node_id v : run_loss_guided_epoch(st, ScoreFn::prefix(1, 0.0), make_round_plan(10, 5)).start_nodes) {
        ++counts[v];
      }
    }
    CHECK(test::fits(counts, std::vector<double>(10, 0.1)));
  }

  TEST_CASE("single-worker training is bit-reproducible") {
    Rng rng(7);
    const auto g = small_world(30, rng);
    auto run = [&] {
      TrainingState st(g, small_config(), 77);
      run_baseline_epoch(st);
      run_loss_guided_epoch(st, ScoreFn::prefix(1, 32.0), make_round_plan(30, 10));
      run_loss_guided_epoch(st, ScoreFn::all(2.0), make_round_plan(30, 5));
      return st.model();
    };
    CHECK(run() == run());
  }

  TEST_CASE("parallel workers keep the accounting and finite parameters") {
    Rng rng(8);
    const auto g = small_world(60, rng);
    auto cfg = small_config();
    cfg.workers = 3;
    for (const WalkKind& kind : std::vector<WalkKind>{SimpleWalkKind{}, LossGuidedWalkKind{1.0}}) {
      for (ModelRead read : {ModelRead::relaxed, ModelRead::consistent}) {
        cfg.walk_kind = kind;
        cfg.model_read = read;
        TrainingState st(g, cfg, 8);
        CHECK(run_baseline_epoch(st).walks_trained == 60);
        const auto s = run_loss_guided_epoch(st, ScoreFn::prefix(2, 4.0), make_round_plan(60, 10));
        CHECK(s.walks_trained == 60);
        CHECK(s.candidates_scored == 600);
        CHECK(st.model().all_finite());
        CHECK(st.walks_consumed() == 120);
      }
    }
  }

  TEST_CASE("negative distribution refreshes on the baseline cadence") {
    const auto g = cycle(8);
    TrainingState st(g, small_config(), 9);
    CHECK(st.walks_until_refresh() == 1);
    const WalkGenerator gen(g, st.sampler(), SimpleWalkKind{});
    // Refresh points seen from each walk: walks consumed plus walks still to go.
    std::vector<std::size_t> due;
    for (std::size_t i = 1; i <= 20; ++i) {
      st.train_walk(gen.draw(0, 5, st.rng()));
      st.maybe_refresh_negatives();
      const auto next = st.walks_consumed() + st.walks_until_refresh();
      if (due.empty() || due.back() != next) due.push_back(next);
    }
    CHECK(due == std::vector<std::size_t>{2, 4, 8, 16, 24});
    CHECK(st.negative_table().has_distribution());
  }

  TEST_CASE("learning rate decays over the planned walks") {
    const auto g = cycle(10);
    TrainingState st(g, small_config(2), 10);
    CHECK(st.planned_walks() == 20);
    CHECK(st.learning_rate_after(0) == doctest::Approx(0.025));
    CHECK(st.learning_rate_after(10) == doctest::Approx(lr_at(0.5)));
    run_baseline_epoch(st);
    const auto s2 = run_baseline_epoch(st);
    CHECK(s2.final_learning_rate == doctest::Approx(0.0001));
  }

  TEST_CASE("train config validation") {
    auto cfg = small_config();
    CHECK_NOTHROW(validate(cfg));
    cfg.walk_length = 0;
    CHECK_THROWS_AS(validate(cfg), config_error);
    cfg = small_config();
    cfg.workers = 0;
    CHECK_THROWS_AS(validate(cfg), config_error);
    cfg = small_config();
    cfg.walk_kind = Node2VecWalkKind{-1.0, 1.0};
    CHECK_THROWS_AS(validate(cfg), config_error);
  }
}
