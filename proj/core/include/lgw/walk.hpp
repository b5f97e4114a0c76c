#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "lgw/common.hpp"
#include "lgw/graph.hpp"

namespace lgw {

class EmbeddingModel;

/// A node sequence v_0..v_t. `truncated` is set when generation stopped at a
/// dead end before reaching the requested length.
struct Walk {
  std::vector<node_id> nodes;
  bool truncated = false;
  // Edge losses computed while generating (loss-guided steps only).
  std::size_t loss_evaluations = 0;

  std::size_t edge_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

struct SimpleWalkKind {};

struct Node2VecWalkKind {
  double p = 1.0;  // return
  double q = 1.0;  // in-out
};

/// Steps proportional to w_uv * loss(u, v)^power.
struct LossGuidedWalkKind {
  double power = 0.0;
};

using WalkKind = std::variant<SimpleWalkKind, Node2VecWalkKind, LossGuidedWalkKind>;

/// Throws config_error unless p, q > 0 and power >= 0, all finite.
void validate(const WalkKind& kind);
std::string describe(const WalkKind& kind);

/// How loss-guided steps read a model that other workers may be updating.
enum class ModelRead { consistent, relaxed };

Walk simple_walk(const Graph& g, const AliasSampler& s, node_id start, std::size_t t, Rng& rng);

/// Second-order walk. The first step is weight-proportional; later steps
/// weight each candidate x by w_vx / p if x is the previous node, w_vx if x
/// neighbors the previous node, w_vx / q otherwise.
Walk node2vec_walk(const Graph& g, const AliasSampler& s, node_id start, std::size_t t, double p,
                   double q, Rng& rng);

/// Every step evaluates the positive loss of each outgoing edge. Falls back to
/// weight-proportional steps when every candidate score is zero.
Walk loss_guided_walk(const Graph& g, const EmbeddingModel& m, node_id start, std::size_t t,
                      double power, Rng& rng, ModelRead read = ModelRead::consistent);

/// Binds the inputs walk generation needs so callers can draw walks of any kind
/// through one interface. The model is only read by loss-guided kinds.
class WalkGenerator {
 public:
  WalkGenerator(const Graph& g, const AliasSampler& s, WalkKind kind,
                const EmbeddingModel* model = nullptr, ModelRead read = ModelRead::consistent);

  Walk draw(node_id start, std::size_t t, Rng& rng) const;

  /// Continues `prefix` to t edges from the kind's conditional distribution.
  /// A prefix that is already long enough or truncated is returned unchanged.
  Walk extend(Walk prefix, std::size_t t, Rng& rng) const;

  const WalkKind& kind() const { return kind_; }
  void set_model(const EmbeddingModel* model, ModelRead read) {
    model_ = model;
    read_ = read;
  }

 private:
  const Graph* graph_;
  const AliasSampler* sampler_;
  WalkKind kind_;
  const EmbeddingModel* model_;
  ModelRead read_;
};

Walk extend_walk(const Graph& g, const AliasSampler& s, const EmbeddingModel* m, Walk prefix,
                 const WalkKind& kind, std::size_t t, Rng& rng,
                 ModelRead read = ModelRead::consistent);

}  // namespace lgw
