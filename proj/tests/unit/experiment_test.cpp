#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "lgw/experiment.hpp"
#include "lgw/synth.hpp"

using namespace lgw;

namespace {

Dataset small_dataset(std::size_t size = 30, std::uint64_t seed = 1) {
  Rng rng(seed);
  auto s = generate(PlantedPartitionSpec::three_communities(size, 0.3, 0.03), rng);
  LabelData labels;
  labels.class_names = {"0", "1", "2"};
  for (auto c : s.community) labels.labels.push_back({c});
  return Dataset{std::move(s.graph), std::move(s.ids), std::move(labels), s.community};
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.task = TaskKind::multiclass;
  cfg.train_per_class = 10;
  cfg.dim = 8;
  cfg.epochs = 3;
  cfg.rounds = 10;
  cfg.walk_length = 6;
  cfg.window = 3;
  cfg.background_pairs = 100;
  return cfg;
}

std::string epoch_csv(const RunReport& r) {
  std::ostringstream out;
  write_epoch_csv(out, r);
  return out.str();
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("config round trips through to_map and set") {
    ExperimentConfig a;
    a.set("task", "multilabel");
    a.set("dim", "32");
    a.set("score", "all");
    a.set("score_power", "4");
    a.set("walk", "node2vec");
    a.set("node2vec_q", "0.25");
    a.set("lr_initial", "0.1");
    a.set("seed", "18446744073709551615");
    ExperimentConfig b;
    for (const auto& [k, v] : a.to_map()) b.set(k, v);
    CHECK(b.to_map() == a.to_map());
    CHECK(b.effective_dim() == 32);
    CHECK(b.seed == 18446744073709551615ull);
    CHECK(a.to_map().size() == ExperimentConfig::keys().size());
  }

  TEST_CASE("config file parsing") {
    std::istringstream in("# comment\nepochs = 4\n\nrounds=5 # trailing\ndim=auto\n");
    ExperimentConfig c;
    c.load(in);
    CHECK(c.epochs == 4);
    CHECK(c.rounds == 5);
    CHECK(c.effective_dim() == 16);
    c.task = TaskKind::multiclass;
    CHECK(c.effective_dim() == 128);
  }

  TEST_CASE("config errors") {
    ExperimentConfig c;
    CHECK_THROWS_AS(c.set("nope", "1"), config_error);
    CHECK_THROWS_AS(c.set("epochs", "ten"), config_error);
    CHECK_THROWS_AS(c.set("epochs", "-1"), config_error);
    CHECK_THROWS_AS(c.set("seed", "-3"), config_error);
    CHECK_THROWS_AS(c.set("method", "magic"), config_error);
    std::istringstream bad("epochs 4\n");
    CHECK_THROWS_AS(c.load(bad), config_error);
    c.epochs = 0;
    CHECK_THROWS_AS(validate(c), config_error);
    ExperimentConfig m;
    m.task = TaskKind::multiclass;
    m.edges_path = "unused.txt";
    CHECK_THROWS_AS(load_dataset(m), config_error);  // no labels file
  }

  TEST_CASE("multiclass split takes n per class") {
    LabelData l;
    l.class_names = {"a", "b", "c"};
    for (std::size_t i = 0; i < 90; ++i) l.labels.push_back({i % 3});
    Rng rng(1);
    const auto s = split_labels(l, TaskKind::multiclass, 20, 0.5, rng);
    CHECK(s.train.size() == 60);
    CHECK(s.eval.size() == 30);
    std::vector<int> per(3, 0);
    for (auto i : s.train) ++per[l.labels[i][0]];
    CHECK(per == std::vector<int>{20, 20, 20});
  }

  TEST_CASE("multilabel split takes the fraction") {
    LabelData l;
    l.class_names = {"a", "b"};
    for (std::size_t i = 0; i < 10; ++i) l.labels.push_back({0, 1});
    Rng rng(2);
    const auto s = split_labels(l, TaskKind::multilabel, 20, 0.5, rng);
    CHECK(s.train.size() == 5);
    CHECK(s.eval.size() == 5);
  }

  TEST_CASE("label ingestion") {
    IdMap ids;
    for (auto n : {"a", "b", "c"}) ids.intern(n);
    std::istringstream good("a x\nb y\nc x\n");
    const auto l = ingest_labels(good, ids, TaskKind::multiclass);
    CHECK(l.class_count() == 2);
    CHECK(l.labels[0] == l.labels[2]);

    std::istringstream unknown("a x\nzed y\n");
    try {
      ingest_labels(unknown, ids, TaskKind::multiclass);
      FAIL("expected an error");
    } catch (const data_error& e) {
      CHECK(std::string(e.what()).find("zed") != std::string::npos);
    }
    std::istringstream missing("a x\nb y\n");
    CHECK_THROWS_AS(ingest_labels(missing, ids, TaskKind::multiclass), data_error);

    std::istringstream multi("a x,y\nb y z\n");
    const auto ml = ingest_labels(multi, ids, TaskKind::multilabel);
    CHECK(ml.class_count() == 3);
    CHECK(ml.labels[0].size() == 2);
    CHECK(ml.labels[1].size() == 2);
    CHECK(ml.labels[2].empty());
  }

  TEST_CASE("curves have one row per repetition and one column per epoch") {
    auto cfg = small_config();
    cfg.repetitions = 2;
    const auto d = small_dataset();
    const auto r = run_experiment(cfg, d);
    REQUIRE(r.methods.size() == 2);
    for (const auto& m : r.methods) {
      REQUIRE(m.curves.size() == 2);
      for (const auto& c : m.curves) CHECK(c.size() == 3);
    }
    CHECK(r.epochs.size() == 2 * 2 * 3);
    CHECK(r.gains.size() == 1);
  }

  TEST_CASE("walk accounting matches the closed forms") {
    auto cfg = small_config();
    const auto d = small_dataset(31);  // |V| = 93
    const auto r = run_experiment(cfg, d);
    const std::size_t n = 93;
    CHECK(r.methods[0].walks_trained.front() == 3 * n);
    CHECK(r.methods[1].walks_trained.front() == n + 2 * 10 * (n / 10));
    for (const auto& e : r.epochs) {
      if (e.method == "baseline" || e.epoch == 1) {
        CHECK(e.stats.walks_trained == n);
      } else {
        CHECK(e.stats.walks_trained == 90);
        CHECK(e.stats.candidates_scored == 10 * n);
      }
    }
  }

  TEST_CASE("epoch 1 is shared between baseline and method") {
    const auto r = run_experiment(small_config(), small_dataset());
    const EpochRecord* first[2] = {nullptr, nullptr};
    for (const auto& e : r.epochs) {
      if (e.epoch == 1) first[e.method == "baseline" ? 0 : 1] = &e;
    }
    REQUIRE(first[0]);
    REQUIRE(first[1]);
    CHECK(first[0]->quality == first[1]->quality);
    CHECK(first[0]->stats.updates.positive_loss_sum == first[1]->stats.updates.positive_loss_sum);
  }

  TEST_CASE("single-worker runs are bit-reproducible") {
    auto cfg = small_config();
    cfg.repetitions = 2;
    const auto d = small_dataset();
    const auto a = run_experiment(cfg, d);
    const auto b = run_experiment(cfg, d);
    CHECK(epoch_csv(a) == epoch_csv(b));
    CHECK(a.final_model == b.final_model);
    cfg.seed = 2;
    CHECK(epoch_csv(run_experiment(cfg, d)) != epoch_csv(a));
  }

  TEST_CASE("repetitions can be rerun in isolation") {
    auto cfg = small_config();
    cfg.repetitions = 3;
    const auto d = small_dataset();
    const auto all = run_experiment(cfg, d);
    auto one = cfg;
    one.repetitions = 1;
    one.seed = repetition_seed(cfg, 2);
    const auto alone = run_experiment(one, d);
    CHECK(alone.methods[1].curves[0] == all.methods[1].curves[2]);
  }

  TEST_CASE("gains recompute from the stored curves") {
    auto cfg = small_config();
    cfg.repetitions = 3;
    const auto r = run_experiment(cfg, small_dataset());
    const auto& base = r.methods[0];
    const auto& method = r.methods[1];
    const auto pb = epochs_to_peak(base.curves, cfg.peak_fraction);
    const auto pm = epochs_to_peak(method.curves, cfg.peak_fraction);
    CHECK(pb.mean == base.peak.mean);
    CHECK(pm.mean == method.peak.mean);
    const auto& g = r.gains.front();
    CHECK(g.training_gain == training_gain(pm.mean, pb.mean));
    CHECK(g.computation_gain == computation_gain(pm.mean, pb.mean, method.cost));
    CHECK(g.computation_gain <= g.training_gain);
  }

  TEST_CASE("loss-guided walks method runs and pays a per-walk overhead") {
    auto cfg = small_config();
    cfg.method = Method::loss_guided_walks;
    const auto r = run_experiment(cfg, small_dataset());
    REQUIRE(r.methods.size() == 2);
    CHECK(r.methods[1].walks_trained.front() == 3 * 90);
    CHECK(r.methods[1].cost.extra_per_walk > 0.0);
  }

  TEST_CASE("clustering task needs no labels") {
    auto cfg = small_config();
    cfg.task = TaskKind::clustering;
    cfg.clusters = 3;
    auto d = small_dataset();
    d.labels.reset();
    const auto r = run_experiment(cfg, d);
    for (double q : r.methods[0].curves[0]) {
      CHECK(q >= -0.5);
      CHECK(q <= 1.0);
    }
  }

  TEST_CASE("labelled task without labels is a config error") {
    auto d = small_dataset();
    d.labels.reset();
    CHECK_THROWS_AS(run_experiment(small_config(), d), config_error);
  }

  TEST_CASE("sweep shares one baseline across the grid") {
    auto cfg = small_config();
    cfg.epochs = 2;
    cfg.walk_length = 10;
    const auto d = small_dataset();
    SweepGrid one{{5}, {4.0}, {2}};
    const auto s1 = run_sweep(cfg, d, one);
    REQUIRE(s1.rows.size() == 1);
    CHECK(s1.rows[0].rounds == 5);
    CHECK(s1.rows[0].prefix_edges == 2);
    CHECK(s1.rows[0].power == 4.0);
    const auto full = run_sweep(cfg, d, SweepGrid{});
    CHECK(full.rows.size() == 60);
    for (const auto& row : full.rows) CHECK(row.epochs_baseline == full.baseline.peak.mean);
    cfg.score = ScoreFn::all(1.0);
    CHECK(run_sweep(cfg, d, SweepGrid{}).rows.size() == 12);
  }

  TEST_CASE("node2vec grid covers every (p, q)") {
    auto cfg = small_config();
    cfg.epochs = 2;
    const auto rows = run_node2vec_grid(cfg, small_dataset(), {0.5, 2.0});
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].p == 0.5);
    CHECK(rows[1].q == 2.0);
    for (const auto& r : rows) CHECK(r.peak_quality > 0.0);
  }

  TEST_CASE("csv writers emit a header and one line per record") {
    const auto r = run_experiment(small_config(), small_dataset());
    const auto csv = epoch_csv(r);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == r.epochs.size() + 1);
    std::ostringstream g;
    write_gain_csv(g, r.gains);
    const auto gs = g.str();
    CHECK(std::count(gs.begin(), gs.end(), '\n') == 2);
    CHECK_FALSE(version_string().empty());
  }
}
