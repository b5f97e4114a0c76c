#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lgw/common.hpp"
#include "lgw/graph.hpp"

namespace lgw {

/// Row-major n x dim feature matrix view.
struct FeatureView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t dim = 0;

  std::span<const double> row(std::size_t i) const { return data.subspan(i * dim, dim); }
};

struct KMeansOptions {
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
  double tolerance = 1e-4;  // relative inertia decrease that ends Lloyd
};

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<double> centroids;  // k x dim
  double inertia = 0.0;
  std::vector<double> restart_inertias;
  std::vector<double> best_history;  // inertia after each Lloyd iteration, best restart
};

/// k-means++ seeding then Lloyd iterations, best of `restarts`. An emptied
/// cluster is reseeded at the point farthest from its centroid.
KMeansResult kmeans(FeatureView points, std::size_t k, Rng& rng, const KMeansOptions& opt = {});

/// Weighted modularity of a partition, reading the graph as undirected
/// (directed graphs are symmetrized). Throws data_error on zero total weight.
double modularity(const Graph& g, std::span<const std::size_t> assignment);

struct LogRegOptions {
  double c = 1.0;  // inverse L2 strength
  std::size_t max_iterations = 100;
  double tolerance = 1e-4;  // on the max-abs gradient entry
  std::size_t history = 10;  // L-BFGS memory
};

/// One-vs-rest binary logistic regressions, one per class.
struct OvrClassifier {
  std::size_t dim = 0;
  std::vector<std::vector<double>> weights;  // per class: dim weights then bias
  std::vector<bool> trained;  // false: class absent from the training split

  std::size_t classes() const { return weights.size(); }
  /// Decision value w.x + b, or -inf for classes never seen in training.
  double score(std::size_t cls, std::span<const double> x) const;
  std::size_t predict(std::span<const double> x) const;
  std::vector<std::size_t> untrained_classes() const;
};

/// Fits one L2-regularized logistic regression per class with L-BFGS.
/// `labels[i]` lists node i's classes (exactly one for multiclass tasks).
OvrClassifier ovr_logreg_fit(FeatureView features,
                             std::span<const std::vector<std::size_t>> labels,
                             std::size_t class_count, std::span<const std::size_t> train,
                             const LogRegOptions& opt = {});

/// Fraction of eval nodes whose argmax class equals their label.
double predict_multiclass(const OvrClassifier& clf, FeatureView features,
                          std::span<const std::size_t> labels, std::span<const std::size_t> eval);

struct MicroF1 {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double f1() const;
};

/// Pools (node, label) decisions scoring each eval node's top-n labels, where
/// n is the node's true label count.
MicroF1 predict_multilabel(const OvrClassifier& clf, FeatureView features,
                           std::span<const std::vector<std::size_t>> labels,
                           std::span<const std::size_t> eval);

/// Pooled counts from explicit predicted label sets.
MicroF1 micro_f1(std::span<const std::vector<std::size_t>> truth,
                 std::span<const std::vector<std::size_t>> predicted);

/// Per-epoch quality, one row per repetition.
using QualityCurve = std::vector<std::vector<double>>;

struct PeakEpochs {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single repetition
  std::vector<std::size_t> per_repetition;
};

/// First 1-based epoch reaching fraction * (that repetition's peak).
std::size_t first_epoch_reaching(std::span<const double> curve, double fraction = 0.95);
PeakEpochs epochs_to_peak(const QualityCurve& curves, double fraction = 0.95);

/// Per-epoch costs in loss/gradient evaluations per node.
struct CostModel {
  enum class Method { baseline, prefix, all };
  Method method = Method::baseline;
  double expected_pairs = 0.0;
  double negatives = 5.0;
  double rounds = 10.0;
  double prefix_edges = 1.0;
  // When set, replaces expected_pairs * (negatives + 1), e.g. a rounded constant.
  double train_per_walk_override = 0.0;
  // Measured per-walk overhead added to the method cost (loss-guided walks).
  double extra_per_walk = 0.0;

  double train_per_walk() const;
  /// Per-node training plus scoring cost for `method`.
  double method_per_walk() const;
};

void validate(const CostModel& cost);

double training_gain(double epochs_method, double epochs_baseline);
double computation_gain(double epochs_method, double epochs_baseline, const CostModel& cost);

}  // namespace lgw
