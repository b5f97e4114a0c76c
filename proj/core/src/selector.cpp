#include "lgw/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace lgw {

void validate(const ScoreFn& score, std::size_t walk_length) {
  if (!(std::isfinite(score.power) && score.power >= 0.0)) {
    throw config_error("score power must be finite and >= 0");
  }
  if (score.kind == ScoreFn::Kind::prefix &&
      (score.prefix_edges < 1 || score.prefix_edges > walk_length)) {
    throw config_error("prefix score length t' must satisfy 1 <= t' <= t");
  }
}

double lscore_prefix(const EmbeddingModel& m, const Walk& walk, std::size_t prefix_edges,
                     double power) {
  const std::size_t edges = std::min(prefix_edges, walk.edge_count());
  double score = 0.0;
  for (std::size_t k = 0; k < edges; ++k) {
    score += std::pow(pos_loss(m, walk.nodes[k], walk.nodes[k + 1]), power);
  }
  return score;
}

double lscore_all(const EmbeddingModel& m, const Walk& walk, std::size_t window, double power) {
  const std::size_t n = walk.nodes.size();
  const double w = static_cast<double>(window);
  double score = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t d = i > j ? i - j : j - i;
      if (d > window) continue;
      // P(skip_i >= d) under skip_i ~ U{1..window}.
      const double inclusion = (w - static_cast<double>(d) + 1.0) / w;
      score += inclusion * std::pow(pos_loss(m, walk.nodes[i], walk.nodes[j]), power);
    }
  }
  return score;
}

std::size_t window_pair_count(std::size_t nodes, std::size_t window) {
  std::size_t count = 0;
  for (std::size_t d = 1; d <= window && d < nodes; ++d) count += 2 * (nodes - d);
  return count;
}

std::vector<std::size_t> weighted_sample_wor(std::span<const double> weights, std::size_t k,
                                             Rng& rng) {
  const std::size_t n = weights.size();
  if (k > n) throw config_error("sample size exceeds the number of items");
  std::vector<std::pair<double, std::size_t>> keyed;
  std::vector<std::size_t> zeros;
  keyed.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights[i];
    if (std::isnan(w) || w < 0.0) throw config_error("sampling weights must be nonnegative");
    // Draw for every item so the stream consumed does not depend on the weights.
    const double e = -std::log1p(-uniform01(rng));
    if (w > 0.0) {
      keyed.emplace_back(e / w, i);
    } else {
      zeros.push_back(i);
    }
  }
  std::vector<std::size_t> out;
  out.reserve(k);
  const std::size_t from_positive = std::min(k, keyed.size());
  std::partial_sort(keyed.begin(), keyed.begin() + from_positive, keyed.end());
  for (std::size_t r = 0; r < from_positive; ++r) out.push_back(keyed[r].second);
  if (out.size() < k) {
    shuffle(zeros, rng);
    out.insert(out.end(), zeros.begin(), zeros.begin() + (k - out.size()));
  }
  return out;
}

RoundPlan make_round_plan(std::size_t node_count, std::size_t rounds) {
  if (rounds == 0) throw config_error("rounds per epoch F must be >= 1");
  RoundPlan plan{rounds, node_count, node_count / rounds};
  if (plan.selected == 0) throw config_error("F exceeds |V|: a round would select no walks");
  return plan;
}

void validate(const TrainConfig& cfg) {
  if (cfg.walk_length == 0) throw config_error("walk length t must be >= 1");
  if (cfg.window == 0) throw config_error("window must be >= 1");
  if (cfg.dim == 0) throw config_error("dimension d must be >= 1");
  if (cfg.epochs == 0) throw config_error("epochs must be >= 1");
  if (cfg.workers == 0) throw config_error("workers must be >= 1");
  if (!(cfg.lr.initial > 0.0 && cfg.lr.minimum > 0.0 && cfg.lr.minimum <= cfg.lr.initial)) {
    throw config_error("learning rates must satisfy 0 < minimum <= initial");
  }
  validate(cfg.walk_kind);
}

TrainingState::TrainingState(const Graph& g, TrainConfig cfg, std::uint64_t seed)
    : graph_(&g), sampler_(g), cfg_(cfg), rng_(seed), table_(g.node_count()) {
  validate(cfg_);
  if (g.node_count() == 0) throw data_error("graph has no nodes");
  model_ = init_model(g.node_count(), cfg_.dim, rng_);
}

double TrainingState::learning_rate_after(std::size_t walks) const {
  return lr_at(static_cast<double>(walks) / static_cast<double>(planned_walks()), cfg_.lr);
}

UpdateStats TrainingState::train_walk(const Walk& walk) {
  const UpdateOptions opt{cfg_.window, cfg_.negatives, current_learning_rate(), false};
  auto stats = update_on_walk(model_, walk, table_, opt, rng_);
  ++walks_consumed_;
  return stats;
}

std::size_t TrainingState::walks_until_refresh() const {
  return next_refresh_ > walks_consumed_ ? next_refresh_ - walks_consumed_ : 1;
}

void TrainingState::maybe_refresh_negatives() {
  if (walks_consumed_ < next_refresh_) return;
  table_.refresh();
  const std::size_t n = graph_->node_count();
  while (next_refresh_ <= walks_consumed_) {
    next_refresh_ = next_refresh_ < n ? std::min(2 * next_refresh_, n) : next_refresh_ + n;
  }
}

namespace {

template <class Fn>
void run_workers(std::size_t workers, Fn&& fn) {
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        fn(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  threads.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct WorkerTotals {
  UpdateStats updates;
  std::size_t walk_loss_evaluations = 0;
};

// Trains `starts` (with matching candidate prefixes when given) on the shared
// model from `workers` threads. Walk i uses the learning rate at
// walks_consumed + i.
void train_parallel(TrainingState& state, std::span<const node_id> starts,
                    std::span<const Walk> prefixes, EpochStats& stats) {
  const auto& cfg = state.config();
  const std::size_t workers = std::min(cfg.workers, std::max<std::size_t>(starts.size(), 1));
  std::vector<std::uint64_t> seeds(workers);
  for (auto& s : seeds) s = state.rng()();

  // A consistent read gives loss-guided steps a snapshot from section start.
  const bool snapshot = cfg.model_read == ModelRead::consistent &&
                        std::holds_alternative<LossGuidedWalkKind>(cfg.walk_kind);
  EmbeddingModel frozen;
  if (snapshot) frozen = state.model();
  const EmbeddingModel* read_model = snapshot ? &frozen : &state.model();
  const ModelRead read = snapshot ? ModelRead::consistent : ModelRead::relaxed;
  const WalkGenerator gen(state.graph(), state.sampler(), cfg.walk_kind, read_model, read);

  std::vector<WorkerTotals> totals(workers);
  const std::size_t base = state.walks_consumed();
  run_workers(workers, [&](std::size_t w) {
    Rng rng(seeds[w]);
    for (std::size_t i = w; i < starts.size(); i += workers) {
      const std::size_t counted = prefixes.empty() ? 0 : prefixes[i].loss_evaluations;
      Walk walk = prefixes.empty() ? gen.draw(starts[i], cfg.walk_length, rng)
                                   : gen.extend(prefixes[i], cfg.walk_length, rng);
      totals[w].walk_loss_evaluations += walk.loss_evaluations - counted;
      const UpdateOptions opt{cfg.window, cfg.negatives, state.learning_rate_after(base + i), true};
      totals[w].updates += update_on_walk(state.model(), walk, state.negative_table(), opt, rng);
    }
  });
  for (const auto& t : totals) {
    stats.updates += t.updates;
    stats.walk_loss_evaluations += t.walk_loss_evaluations;
  }
  state.advance(starts.size());
  stats.walks_trained += starts.size();
  stats.start_nodes.insert(stats.start_nodes.end(), starts.begin(), starts.end());
}

}  // namespace

EpochStats run_baseline_epoch(TrainingState& state) {
  const auto& cfg = state.config();
  const std::size_t n = state.graph().node_count();
  std::vector<node_id> order(n);
  std::iota(order.begin(), order.end(), node_id{0});
  shuffle(order, state.rng());

  EpochStats stats;
  stats.start_nodes.reserve(n);
  if (cfg.workers == 1) {
    const WalkGenerator gen(state.graph(), state.sampler(), cfg.walk_kind, &state.model());
    for (node_id v : order) {
      const Walk walk = gen.draw(v, cfg.walk_length, state.rng());
      stats.walk_loss_evaluations += walk.loss_evaluations;
      stats.updates += state.train_walk(walk);
      stats.start_nodes.push_back(v);
      ++stats.walks_trained;
      state.maybe_refresh_negatives();
    }
  } else {
    // Blocks end at refresh points so the table is rebuilt between them.
    std::size_t done = 0;
    while (done < n) {
      const std::size_t block = std::min(n - done, state.walks_until_refresh());
      train_parallel(state, std::span(order).subspan(done, block), {}, stats);
      state.maybe_refresh_negatives();
      done += block;
    }
  }
  stats.final_learning_rate = state.current_learning_rate();
  return stats;
}

EpochStats run_loss_guided_epoch(TrainingState& state, const ScoreFn& score,
                                 const RoundPlan& plan) {
  const auto& cfg = state.config();
  validate(score, cfg.walk_length);
  const std::size_t n = state.graph().node_count();
  if (plan.candidates != n) throw config_error("round plan does not match the graph size");

  const bool prefix = score.kind == ScoreFn::Kind::prefix;
  const std::size_t draw_length = prefix ? score.prefix_edges : cfg.walk_length;
  EpochStats stats;
  stats.start_nodes.reserve(plan.rounds * plan.selected);

  std::vector<Walk> candidates(n);
  std::vector<double> scores(n);
  std::vector<std::size_t> evaluations(n);
  for (std::size_t round = 0; round < plan.rounds; ++round) {
    // Candidates are drawn and scored against the model as of round start.
    auto score_range = [&](Rng& rng, std::size_t first, std::size_t stride) {
      const WalkGenerator gen(state.graph(), state.sampler(), cfg.walk_kind, &state.model());
      for (std::size_t v = first; v < n; v += stride) {
        Walk w = gen.draw(static_cast<node_id>(v), draw_length, rng);
        if (prefix) {
          scores[v] = lscore_prefix(state.model(), w, score.prefix_edges, score.power);
          evaluations[v] = std::min(score.prefix_edges, w.edge_count());
        } else {
          scores[v] = lscore_all(state.model(), w, cfg.window, score.power);
          evaluations[v] = window_pair_count(w.nodes.size(), cfg.window);
        }
        candidates[v] = std::move(w);
      }
    };
    if (cfg.workers == 1) {
      score_range(state.rng(), 0, 1);
    } else {
      std::vector<std::uint64_t> seeds(cfg.workers);
      for (auto& s : seeds) s = state.rng()();
      run_workers(cfg.workers, [&](std::size_t w) {
        Rng rng(seeds[w]);
        score_range(rng, w, cfg.workers);
      });
    }
    for (std::size_t v = 0; v < n; ++v) {
      stats.score_loss_evaluations += evaluations[v];
      stats.walk_loss_evaluations += candidates[v].loss_evaluations;
    }
    stats.candidates_scored += n;

    auto selected = weighted_sample_wor(scores, plan.selected, state.rng());
    shuffle(selected, state.rng());

    if (cfg.workers == 1) {
      const WalkGenerator gen(state.graph(), state.sampler(), cfg.walk_kind, &state.model());
      for (std::size_t v : selected) {
        const std::size_t scored = candidates[v].loss_evaluations;
        const Walk walk = gen.extend(std::move(candidates[v]), cfg.walk_length, state.rng());
        stats.walk_loss_evaluations += walk.loss_evaluations - scored;
        stats.updates += state.train_walk(walk);
        stats.start_nodes.push_back(static_cast<node_id>(v));
        ++stats.walks_trained;
      }
    } else {
      std::vector<node_id> starts;
      std::vector<Walk> prefixes;
      for (std::size_t v : selected) {
        starts.push_back(static_cast<node_id>(v));
        prefixes.push_back(std::move(candidates[v]));
      }
      train_parallel(state, starts, prefixes, stats);
    }
    state.negative_table().refresh();
  }
  stats.final_learning_rate = state.current_learning_rate();
  return stats;
}

}  // namespace lgw
