#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lgw/common.hpp"

namespace lgw {

struct Walk;
class IdMap;

/// Focus and context matrices, |V| x dim each, row-major.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(std::size_t node_count, std::size_t dim)
      : nodes_(node_count), dim_(dim), focus_(node_count * dim), context_(node_count * dim) {}

  std::size_t node_count() const { return nodes_; }
  std::size_t dim() const { return dim_; }

  std::span<double> focus(node_id i) { return {focus_.data() + i * dim_, dim_}; }
  std::span<const double> focus(node_id i) const { return {focus_.data() + i * dim_, dim_}; }
  std::span<double> context(node_id j) { return {context_.data() + j * dim_, dim_}; }
  std::span<const double> context(node_id j) const {
    return {context_.data() + j * dim_, dim_};
  }

  std::vector<double>& focus_matrix() { return focus_; }
  const std::vector<double>& focus_matrix() const { return focus_; }
  std::vector<double>& context_matrix() { return context_; }
  const std::vector<double>& context_matrix() const { return context_; }

  bool all_finite() const;

  friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;

 private:
  std::size_t nodes_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> focus_;
  std::vector<double> context_;
};

/// word2vec-style init: focus ~ U[-0.5/d, 0.5/d], context = 0.
EmbeddingModel init_model(std::size_t node_count, std::size_t dim, Rng& rng);

// ln(1 + e^x) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Loss of a positive example with inner product x: -ln sigma(x).
inline double positive_loss(double x) { return softplus(-x); }
/// Loss of a negative example with inner product x: -ln sigma(-x).
inline double negative_loss(double x) { return softplus(x); }

double dot(std::span<const double> a, std::span<const double> b);

double pos_loss(const EmbeddingModel& m, node_id i, node_id j);
double neg_loss(const EmbeddingModel& m, node_id i, node_id j);

/// Ordered (focus, context) pairs.
using PairBatch = std::vector<std::pair<node_id, node_id>>;

/// Positive pairs of a walk: each position i draws a skip d_i ~ U{1..window}
/// and pairs with every other position within distance d_i.
PairBatch gen_pairs(const Walk& walk, std::size_t window, Rng& rng);
PairBatch gen_pairs(std::span<const node_id> nodes, std::size_t window, Rng& rng);

/// Closed-form E[|Pairs|] for a walk of `nodes` positions under the skip rule.
double expected_pair_count(std::size_t nodes, std::size_t window);

/// Context frequencies accumulated since the start of training and the cached
/// cumulative distribution of count^0.75 used to draw negatives.
class NegativeTable {
 public:
  static constexpr double kPower = 0.75;

  explicit NegativeTable(std::size_t node_count = 0) : counts_(node_count, 0) {}

  void record(const PairBatch& batch);
  /// Recording that tolerates concurrent writers (relaxed atomic increments).
  void record_concurrent(const PairBatch& batch);

  /// Rebuilds the cached distribution from the current counts.
  void refresh();
  bool has_distribution() const { return !cdf_.empty(); }

  /// Draws a context node; uniform over V when no distribution is cached.
  node_id sample(Rng& rng) const;

  /// Probability of drawing j under the cached distribution.
  double probability(node_id j) const;

  std::size_t node_count() const { return counts_.size(); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const;

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<double> cdf_;
};

/// Adds the batch's context counts, refreshes the distribution if none is
/// cached yet, then draws `negatives` contexts per positive pair.
PairBatch record_and_sample_negatives(NegativeTable& tbl, const PairBatch& batch,
                                      std::size_t negatives, Rng& rng);

/// One SGNS step on (i, j): g = lr * (label - sigma(f_i . c_j)),
/// c_j += g f_i, f_i += g c_j(old). Returns the example's loss before the step.
double sgd_step(EmbeddingModel& m, node_id i, node_id j, bool positive, double lr);

/// Same step with relaxed atomic loads and stores on every scalar, for
/// lock-free parallel training.
double sgd_step_relaxed(EmbeddingModel& m, node_id i, node_id j, bool positive, double lr);

struct UpdateStats {
  std::size_t positive_pairs = 0;
  std::size_t negative_pairs = 0;
  double positive_loss_sum = 0.0;

  double mean_positive_loss() const {
    return positive_pairs == 0 ? 0.0 : positive_loss_sum / static_cast<double>(positive_pairs);
  }
  UpdateStats& operator+=(const UpdateStats& o) {
    positive_pairs += o.positive_pairs;
    negative_pairs += o.negative_pairs;
    positive_loss_sum += o.positive_loss_sum;
    return *this;
  }
};

struct UpdateOptions {
  std::size_t window = 10;
  std::size_t negatives = 5;
  double learning_rate = 0.025;
  bool relaxed = false;  // parallel workers share the model
};

/// Trains on one walk: positive pairs, then for each its negatives. Throws
/// numeric_error if a touched parameter becomes non-finite.
UpdateStats update_on_walk(EmbeddingModel& m, const Walk& walk, NegativeTable& tbl,
                           const UpdateOptions& opt, Rng& rng);

struct LearningRateSchedule {
  double initial = 0.025;
  double minimum = 0.0001;
};

/// Linear decay from initial to minimum over progress in [0, 1].
double lr_at(double progress, const LearningRateSchedule& schedule = {});

/// Writes "node_count dim" then one line per node: id and the focus vector.
void write_embedding(std::ostream& out, const EmbeddingModel& m, const IdMap& ids);
/// Same layout with the context vector appended after the focus vector.
void write_model(std::ostream& out, const EmbeddingModel& m, const IdMap& ids);

struct LoadedEmbedding {
  std::vector<std::string> ids;
  EmbeddingModel model;  // context is zero unless the file carried it
  bool has_context = false;
};

/// Reads either layout; throws data_error on malformed input.
LoadedEmbedding read_embedding(std::istream& in);

/// 9 significant digits, locale-independent.
std::string format_real(double x);

}  // namespace lgw
