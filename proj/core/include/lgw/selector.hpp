#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lgw/common.hpp"
#include "lgw/graph.hpp"
#include "lgw/sgns.hpp"
#include "lgw/walk.hpp"

namespace lgw {

/// Walk loss score. `prefix` sums edge losses over the first prefix_edges
/// edges; `all` takes the expectation over skip draws of the loss summed over
/// the walk's positive pairs. Each loss is raised to `power`.
struct ScoreFn {
  enum class Kind { all, prefix };
  Kind kind = Kind::prefix;
  std::size_t prefix_edges = 1;
  double power = 1.0;

  static ScoreFn all(double power) { return {Kind::all, 0, power}; }
  static ScoreFn prefix(std::size_t edges, double power) { return {Kind::prefix, edges, power}; }
};

/// Throws config_error unless power >= 0 and, for prefix scores,
/// 1 <= prefix_edges <= walk_length.
void validate(const ScoreFn& score, std::size_t walk_length);

double lscore_prefix(const EmbeddingModel& m, const Walk& walk, std::size_t prefix_edges,
                     double power);
double lscore_all(const EmbeddingModel& m, const Walk& walk, std::size_t window, double power);

/// Ordered position pairs within the window, i.e. losses lscore_all evaluates.
std::size_t window_pair_count(std::size_t nodes, std::size_t window);

/// Weighted sampling without replacement by exponential-race keys
/// (key = Exp(1) / w, keep the k smallest). Indices come back in draw order.
/// When fewer than k weights are positive the remainder is drawn uniformly
/// from the zero-weight items. Throws config_error if k exceeds the list
/// length or a weight is negative or NaN.
std::vector<std::size_t> weighted_sample_wor(std::span<const double> weights, std::size_t k,
                                             Rng& rng);

struct RoundPlan {
  std::size_t rounds = 1;      // F
  std::size_t candidates = 0;  // |V| per round
  std::size_t selected = 0;    // floor(|V| / F) per round
};

RoundPlan make_round_plan(std::size_t node_count, std::size_t rounds);

struct TrainConfig {
  std::size_t walk_length = 10;
  std::size_t window = 10;
  std::size_t negatives = 5;
  std::size_t dim = 16;
  std::size_t epochs = 1;  // planned, sets the learning-rate horizon
  LearningRateSchedule lr;
  WalkKind walk_kind = SimpleWalkKind{};
  std::size_t workers = 1;  // 1 is the deterministic mode
  ModelRead model_read = ModelRead::relaxed;  // loss-guided walk reads when workers > 1
};

void validate(const TrainConfig& cfg);

struct EpochStats {
  std::size_t walks_trained = 0;
  std::size_t candidates_scored = 0;
  std::size_t score_loss_evaluations = 0;  // preprocessing: losses computed for scoring
  std::size_t walk_loss_evaluations = 0;   // losses computed inside loss-guided walk steps
  UpdateStats updates;
  std::vector<node_id> start_nodes;  // of every trained walk, in training order
  double final_learning_rate = 0.0;
};

/// Everything one training run mutates, plus the graph it reads.
class TrainingState {
 public:
  TrainingState(const Graph& g, TrainConfig cfg, std::uint64_t seed);

  const Graph& graph() const { return *graph_; }
  const AliasSampler& sampler() const { return sampler_; }
  const TrainConfig& config() const { return cfg_; }
  EmbeddingModel& model() { return model_; }
  const EmbeddingModel& model() const { return model_; }
  NegativeTable& negative_table() { return table_; }
  Rng& rng() { return rng_; }

  std::size_t walks_consumed() const { return walks_consumed_; }
  std::size_t planned_walks() const { return cfg_.epochs * graph_->node_count(); }
  double current_learning_rate() const { return learning_rate_after(walks_consumed_); }
  double learning_rate_after(std::size_t walks) const;

  /// Trains one walk in single-worker mode and advances the counters.
  UpdateStats train_walk(const Walk& walk);

  /// Baseline cadence: refresh after 1, 2, 4, ... walks until |V|, then every |V|.
  void maybe_refresh_negatives();
  std::size_t walks_until_refresh() const;

  void advance(std::size_t walks) { walks_consumed_ += walks; }
  void set_walk_kind(WalkKind kind) {
    validate(kind);
    cfg_.walk_kind = kind;
  }

 private:
  const Graph* graph_;
  AliasSampler sampler_;
  TrainConfig cfg_;
  Rng rng_;
  EmbeddingModel model_;
  NegativeTable table_;
  std::size_t walks_consumed_ = 0;
  std::size_t next_refresh_ = 1;
};

/// One pass over V in shuffled order, one walk per start node.
EpochStats run_baseline_epoch(TrainingState& state);

/// F rounds: draw one candidate per node, score against the round-start model,
/// select floor(|V|/F) by weighted sampling without replacement, extend prefix
/// candidates to full length, train in shuffled order.
EpochStats run_loss_guided_epoch(TrainingState& state, const ScoreFn& score,
                                 const RoundPlan& plan);

}  // namespace lgw
