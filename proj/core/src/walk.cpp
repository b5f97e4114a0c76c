#include "lgw/walk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>

#include "lgw/sgns.hpp"

namespace lgw {

void validate(const WalkKind& kind) {
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Node2VecWalkKind>) {
          if (!(std::isfinite(k.p) && k.p > 0.0 && std::isfinite(k.q) && k.q > 0.0)) {
            throw config_error("node2vec p and q must be finite and positive");
          }
        } else if constexpr (std::is_same_v<K, LossGuidedWalkKind>) {
          if (!(std::isfinite(k.power) && k.power >= 0.0)) {
            throw config_error("loss-guided walk power must be finite and >= 0");
          }
        }
      },
      kind);
}

std::string describe(const WalkKind& kind) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SimpleWalkKind>) {
          return "simple";
        } else if constexpr (std::is_same_v<K, Node2VecWalkKind>) {
          return "node2vec(p=" + format_real(k.p) + ",q=" + format_real(k.q) + ")";
        } else {
          return "loss-guided(power=" + format_real(k.power) + ")";
        }
      },
      kind);
}

namespace {

// Index drawn proportionally to nonnegative weights with a positive sum.
std::size_t draw_proportional(const std::vector<double>& w, double total, Rng& rng) {
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc += w[k];
    if (target < acc) return k;
  }
  // Rounding put target at the very end; take the last positive entry.
  for (std::size_t k = w.size(); k-- > 0;) {
    if (w[k] > 0.0) return k;
  }
  return w.size() - 1;
}

double edge_loss(const EmbeddingModel& m, node_id u, node_id v, ModelRead read) {
  if (read == ModelRead::consistent) return pos_loss(m, u, v);
  // Other workers may be writing these rows.
  auto f = m.focus(u);
  auto c = m.context(v);
  double x = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double fk = std::atomic_ref<double>(const_cast<double&>(f[k])).load(std::memory_order_relaxed);
    const double ck = std::atomic_ref<double>(const_cast<double&>(c[k])).load(std::memory_order_relaxed);
    x += fk * ck;
  }
  return positive_loss(x);
}

struct StepContext {
  const Graph& g;
  const AliasSampler* s;  // null: weight-proportional linear scan
  const EmbeddingModel* model;
  ModelRead read;
  std::vector<double> scratch;
};

std::optional<node_id> weighted_step(StepContext& ctx, node_id cur, Rng& rng) {
  if (ctx.s != nullptr) return sample_neighbor(ctx.g, *ctx.s, cur, rng);
  const auto nb = ctx.g.neighbors(cur);
  if (nb.empty()) return std::nullopt;
  const auto w = ctx.g.weights(cur);
  ctx.scratch.assign(w.begin(), w.end());
  return nb[draw_proportional(ctx.scratch, ctx.g.weighted_out_degree(cur), rng)];
}

std::optional<node_id> node2vec_step(StepContext& ctx, node_id prev, node_id cur, double p,
                                     double q, Rng& rng) {
  const auto nb = ctx.g.neighbors(cur);
  if (nb.empty()) return std::nullopt;
  const auto w = ctx.g.weights(cur);
  auto& bias = ctx.scratch;
  bias.resize(nb.size());
  double total = 0.0;
  for (std::size_t k = 0; k < nb.size(); ++k) {
    double alpha = 1.0 / q;
    if (nb[k] == prev) {
      alpha = 1.0 / p;
    } else if (ctx.g.has_arc(prev, nb[k])) {
      alpha = 1.0;
    }
    bias[k] = w[k] * alpha;
    total += bias[k];
  }
  return nb[draw_proportional(bias, total, rng)];
}

std::optional<node_id> loss_guided_step(StepContext& ctx, node_id cur, double power,
                                        std::size_t& evaluations, Rng& rng) {
  const auto nb = ctx.g.neighbors(cur);
  if (nb.empty()) return std::nullopt;
  if (power == 0.0) return weighted_step(ctx, cur, rng);
  const auto w = ctx.g.weights(cur);
  // Log domain keeps power 32 away from overflow and underflow.
  auto& score = ctx.scratch;
  score.resize(nb.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const double loss = edge_loss(*ctx.model, cur, nb[k], ctx.read);
    score[k] = loss > 0.0 ? std::log(w[k]) + power * std::log(loss)
                          : -std::numeric_limits<double>::infinity();
    best = std::max(best, score[k]);
  }
  evaluations += nb.size();
  if (best == -std::numeric_limits<double>::infinity()) {
    return weighted_step(ctx, cur, rng);
  }
  double total = 0.0;
  for (auto& x : score) {
    x = std::exp(x - best);
    total += x;
  }
  return nb[draw_proportional(score, total, rng)];
}

// Appends steps of `kind` until the walk has t edges or hits a dead end.
void continue_walk(StepContext& ctx, const WalkKind& kind, Walk& walk, std::size_t t, Rng& rng) {
  while (walk.nodes.size() < t + 1) {
    const node_id cur = walk.nodes.back();
    std::optional<node_id> next;
    if (const auto* n2v = std::get_if<Node2VecWalkKind>(&kind)) {
      next = walk.nodes.size() >= 2
                 ? node2vec_step(ctx, walk.nodes[walk.nodes.size() - 2], cur, n2v->p, n2v->q, rng)
                 : weighted_step(ctx, cur, rng);
    } else if (const auto* lg = std::get_if<LossGuidedWalkKind>(&kind)) {
      next = loss_guided_step(ctx, cur, lg->power, walk.loss_evaluations, rng);
    } else {
      next = weighted_step(ctx, cur, rng);
    }
    if (!next) {
      walk.truncated = true;
      return;
    }
    walk.nodes.push_back(*next);
  }
}

Walk start_walk(node_id start, std::size_t t) {
  if (t == 0) throw config_error("walk length must be >= 1");
  Walk w;
  w.nodes.reserve(t + 1);
  w.nodes.push_back(start);
  return w;
}

}  // namespace

Walk simple_walk(const Graph& g, const AliasSampler& s, node_id start, std::size_t t, Rng& rng) {
  StepContext ctx{g, &s, nullptr, ModelRead::consistent, {}};
  Walk w = start_walk(start, t);
  continue_walk(ctx, SimpleWalkKind{}, w, t, rng);
  return w;
}

Walk node2vec_walk(const Graph& g, const AliasSampler& s, node_id start, std::size_t t, double p,
                   double q, Rng& rng) {
  const WalkKind kind = Node2VecWalkKind{p, q};
  validate(kind);
  StepContext ctx{g, &s, nullptr, ModelRead::consistent, {}};
  Walk w = start_walk(start, t);
  continue_walk(ctx, kind, w, t, rng);
  return w;
}

Walk loss_guided_walk(const Graph& g, const EmbeddingModel& m, node_id start, std::size_t t,
                      double power, Rng& rng, ModelRead read) {
  const WalkKind kind = LossGuidedWalkKind{power};
  validate(kind);
  StepContext ctx{g, nullptr, &m, read, {}};
  Walk w = start_walk(start, t);
  continue_walk(ctx, kind, w, t, rng);
  return w;
}

WalkGenerator::WalkGenerator(const Graph& g, const AliasSampler& s, WalkKind kind,
                             const EmbeddingModel* model, ModelRead read)
    : graph_(&g), sampler_(&s), kind_(kind), model_(model), read_(read) {
  validate(kind_);
}

Walk WalkGenerator::draw(node_id start, std::size_t t, Rng& rng) const {
  return extend(start_walk(start, t), t, rng);
}

Walk WalkGenerator::extend(Walk prefix, std::size_t t, Rng& rng) const {
  return extend_walk(*graph_, *sampler_, model_, std::move(prefix), kind_, t, rng, read_);
}

Walk extend_walk(const Graph& g, const AliasSampler& s, const EmbeddingModel* m, Walk prefix,
                 const WalkKind& kind, std::size_t t, Rng& rng, ModelRead read) {
  if (prefix.nodes.empty()) throw config_error("cannot extend an empty walk");
  if (prefix.truncated || prefix.nodes.size() >= t + 1) return prefix;
  if (std::holds_alternative<LossGuidedWalkKind>(kind) && m == nullptr) {
    throw config_error("loss-guided walks need a model");
  }
  StepContext ctx{g, &s, m, read, {}};
  continue_walk(ctx, kind, prefix, t, rng);
  return prefix;
}

}  // namespace lgw
