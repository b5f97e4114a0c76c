#include "lgw/eval.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "lgw/sgns.hpp"

namespace lgw {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

struct LloydRun {
  std::vector<std::size_t> assignment;
  std::vector<double> centroids;
  double inertia = 0.0;
  std::vector<double> history;
};

std::vector<double> kmeanspp_seed(FeatureView pts, std::size_t k, Rng& rng) {
  const std::size_t n = pts.rows, d = pts.dim;
  std::vector<double> centroids(k * d);
  const std::size_t first = uniform_index(rng, n);
  std::copy_n(pts.row(first).begin(), d, centroids.begin());
  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) closest[i] = squared_distance(pts.row(i), pts.row(first));
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(closest.begin(), closest.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += closest[i];
        if (target < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_index(rng, n);
    }
    std::copy_n(pts.row(pick).begin(), d, centroids.begin() + c * d);
    for (std::size_t i = 0; i < n; ++i) {
      closest[i] = std::min(closest[i], squared_distance(pts.row(i), pts.row(pick)));
    }
  }
  return centroids;
}

// Assigns every point to its nearest centroid; returns the inertia.
double assign(FeatureView pts, std::span<const double> centroids, std::size_t k,
              std::vector<std::size_t>& assignment) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < pts.rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double dist = squared_distance(pts.row(i), centroids.subspan(c * pts.dim, pts.dim));
      if (dist < best) {
        best = dist;
        arg = c;
      }
    }
    assignment[i] = arg;
    inertia += best;
  }
  return inertia;
}

LloydRun lloyd(FeatureView pts, std::size_t k, Rng& rng, const KMeansOptions& opt) {
  const std::size_t n = pts.rows, d = pts.dim;
  LloydRun run;
  run.centroids = kmeanspp_seed(pts, k, rng);
  run.assignment.assign(n, 0);
  run.inertia = assign(pts, run.centroids, k, run.assignment);
  run.history.push_back(run.inertia);
  std::vector<std::size_t> sizes(k);
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    std::fill(run.centroids.begin(), run.centroids.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = run.assignment[i];
      ++sizes[c];
      const auto x = pts.row(i);
      for (std::size_t j = 0; j < d; ++j) run.centroids[c * d + j] += x[j];
    }
    std::vector<std::size_t> owner = run.assignment;
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        for (std::size_t j = 0; j < d; ++j) run.centroids[c * d + j] /= static_cast<double>(sizes[c]);
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      // Reseed at the point farthest from its own centroid.
      std::size_t far = 0;
      double far_dist = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[owner[i]] <= 1) continue;
        const double dist =
            squared_distance(pts.row(i), std::span<const double>(run.centroids).subspan(owner[i] * d, d));
        if (dist > far_dist) {
          far_dist = dist;
          far = i;
        }
      }
      std::copy_n(pts.row(far).begin(), d, run.centroids.begin() + c * d);
      --sizes[owner[far]];
      owner[far] = c;
      sizes[c] = 1;
    }
    const double prev = run.inertia;
    run.inertia = assign(pts, run.centroids, k, run.assignment);
    run.history.push_back(run.inertia);
    if (prev <= 0.0 || (prev - run.inertia) / prev < opt.tolerance) break;
  }
  return run;
}

}  // namespace

KMeansResult kmeans(FeatureView points, std::size_t k, Rng& rng, const KMeansOptions& opt) {
  if (k == 0 || k > points.rows) throw config_error("k-means needs 1 <= k <= number of points");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(opt.restarts, 1); ++r) {
    LloydRun run = lloyd(points, k, rng, opt);
    best.restart_inertias.push_back(run.inertia);
    if (run.inertia < best.inertia) {
      best.inertia = run.inertia;
      best.assignment = std::move(run.assignment);
      best.centroids = std::move(run.centroids);
      best.best_history = std::move(run.history);
    }
  }
  return best;
}

double modularity(const Graph& g, std::span<const std::size_t> assignment) {
  const std::size_t n = g.node_count();
  if (assignment.size() != n) throw config_error("assignment size does not match the graph");
  const std::size_t clusters =
      n == 0 ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1;
  std::vector<double> internal(clusters, 0.0), degree(clusters, 0.0);
  double total = 0.0;
  // Degree and internal weight are accumulated in the same order, so a single
  // cluster yields exactly zero.
  auto add = [&](node_id u, node_id v, double w) {
    degree[assignment[u]] += w;
    if (assignment[u] == assignment[v]) internal[assignment[u]] += w;
    total += w;
  };
  for (node_id u = 0; u < n; ++u) {
    const auto nb = g.neighbors(u);
    const auto w = g.weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      add(u, nb[k], w[k]);
      if (g.directed()) add(nb[k], u, w[k]);
    }
  }
  if (!(total > 0.0)) throw data_error("modularity undefined on a graph with zero total weight");
  double q = 0.0;
  for (std::size_t c = 0; c < clusters; ++c) {
    const double share = degree[c] / total;
    q += internal[c] / total - share * share;
  }
  return q;
}

double OvrClassifier::score(std::size_t cls, std::span<const double> x) const {
  if (!trained[cls]) return -std::numeric_limits<double>::infinity();
  const auto& w = weights[cls];
  double s = w[dim];
  for (std::size_t k = 0; k < dim; ++k) s += w[k] * x[k];
  return s;
}

std::size_t OvrClassifier::predict(std::span<const double> x) const {
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < classes(); ++c) {
    const double s = score(c, x);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

std::vector<std::size_t> OvrClassifier::untrained_classes() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < trained.size(); ++c) {
    if (!trained[c]) out.push_back(c);
  }
  return out;
}

namespace {

// 0.5 |w|^2 + C sum log(1 + exp(-y (w.x + b))); the bias is not penalized.
struct BinaryObjective {
  FeatureView x;
  std::span<const std::size_t> rows;
  std::vector<double> y;  // +1 / -1 per row
  double c;

  double eval(const std::vector<double>& theta, std::vector<double>& grad) const {
    const std::size_t d = x.dim;
    double f = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      f += 0.5 * theta[k] * theta[k];
      grad[k] = theta[k];
    }
    grad[d] = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto xi = x.row(rows[r]);
      double z = theta[d];
      for (std::size_t k = 0; k < d; ++k) z += theta[k] * xi[k];
      const double margin = y[r] * z;
      f += c * softplus(-margin);
      const double coef = -c * y[r] * sigmoid(-margin);
      for (std::size_t k = 0; k < d; ++k) grad[k] += coef * xi[k];
      grad[d] += coef;
    }
    return f;
  }
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  return dot(a, b);
}

std::vector<double> lbfgs(const BinaryObjective& obj, std::size_t size, const LogRegOptions& opt) {
  std::vector<double> theta(size, 0.0), grad(size), next(size), next_grad(size), dir(size);
  double f = obj.eval(theta, grad);
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> alpha(opt.history);
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    if (max_abs(grad) <= opt.tolerance) break;
    // Two-loop recursion for dir = -H grad.
    dir = grad;
    for (std::size_t h = s_hist.size(); h-- > 0;) {
      alpha[h] = rho_hist[h] * inner(s_hist[h], dir);
      for (std::size_t k = 0; k < size; ++k) dir[k] -= alpha[h] * y_hist[h][k];
    }
    if (!s_hist.empty()) {
      const double gamma = inner(s_hist.back(), y_hist.back()) / inner(y_hist.back(), y_hist.back());
      for (auto& v : dir) v *= gamma;
    }
    for (std::size_t h = 0; h < s_hist.size(); ++h) {
      const double beta = rho_hist[h] * inner(y_hist[h], dir);
      for (std::size_t k = 0; k < size; ++k) dir[k] += s_hist[h][k] * (alpha[h] - beta);
    }
    for (auto& v : dir) v = -v;
    double slope = inner(grad, dir);
    if (slope >= 0.0) {
      // Not a descent direction; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t k = 0; k < size; ++k) dir[k] = -grad[k];
      slope = inner(grad, dir);
    }
    double step = s_hist.empty() ? std::min(1.0, 1.0 / std::max(max_abs(grad), 1e-12)) : 1.0;
    double f_next = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      for (std::size_t k = 0; k < size; ++k) next[k] = theta[k] + step * dir[k];
      f_next = obj.eval(next, next_grad);
      if (f_next <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    std::vector<double> s(size), y(size);
    for (std::size_t k = 0; k < size; ++k) {
      s[k] = next[k] - theta[k];
      y[k] = next_grad[k] - grad[k];
    }
    const double sy = inner(s, y);
    if (sy > 1e-12) {
      if (s_hist.size() == opt.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    const double decrease = f - f_next;
    theta.swap(next);
    grad.swap(next_grad);
    f = f_next;
    if (decrease <= 1e-12 * std::max(1.0, std::abs(f))) break;
  }
  return theta;
}

}  // namespace

OvrClassifier ovr_logreg_fit(FeatureView features,
                             std::span<const std::vector<std::size_t>> labels,
                             std::size_t class_count, std::span<const std::size_t> train,
                             const LogRegOptions& opt) {
  if (labels.size() != features.rows) throw config_error("labels do not match feature rows");
  OvrClassifier clf;
  clf.dim = features.dim;
  clf.weights.assign(class_count, std::vector<double>(features.dim + 1, 0.0));
  clf.trained.assign(class_count, false);
  for (std::size_t cls = 0; cls < class_count; ++cls) {
    BinaryObjective obj{features, train, {}, opt.c};
    obj.y.reserve(train.size());
    bool any_positive = false;
    for (std::size_t i : train) {
      const auto& ls = labels[i];
      const bool positive = std::find(ls.begin(), ls.end(), cls) != ls.end();
      any_positive |= positive;
      obj.y.push_back(positive ? 1.0 : -1.0);
    }
    if (!any_positive) continue;
    clf.weights[cls] = lbfgs(obj, features.dim + 1, opt);
    clf.trained[cls] = true;
  }
  return clf;
}

double predict_multiclass(const OvrClassifier& clf, FeatureView features,
                          std::span<const std::size_t> labels, std::span<const std::size_t> eval) {
  if (eval.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i : eval) {
    if (clf.predict(features.row(i)) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(eval.size());
}

double MicroF1::f1() const {
  const std::size_t denom = 2 * true_positives + false_positives + false_negatives;
  return denom == 0 ? 1.0 : 2.0 * static_cast<double>(true_positives) / static_cast<double>(denom);
}

MicroF1 micro_f1(std::span<const std::vector<std::size_t>> truth,
                 std::span<const std::vector<std::size_t>> predicted) {
  MicroF1 out;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t l : predicted[i]) {
      if (std::find(truth[i].begin(), truth[i].end(), l) != truth[i].end()) {
        ++out.true_positives;
      } else {
        ++out.false_positives;
      }
    }
    for (std::size_t l : truth[i]) {
      if (std::find(predicted[i].begin(), predicted[i].end(), l) == predicted[i].end()) {
        ++out.false_negatives;
      }
    }
  }
  return out;
}

MicroF1 predict_multilabel(const OvrClassifier& clf, FeatureView features,
                           std::span<const std::vector<std::size_t>> labels,
                           std::span<const std::size_t> eval) {
  std::vector<std::vector<std::size_t>> truth, predicted;
  std::vector<std::size_t> order(clf.classes());
  std::vector<double> scores(clf.classes());
  for (std::size_t i : eval) {
    const auto x = features.row(i);
    for (std::size_t c = 0; c < clf.classes(); ++c) scores[c] = clf.score(c, x);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min(labels[i].size(), order.size());
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                      });
    truth.push_back(labels[i]);
    predicted.emplace_back(order.begin(), order.begin() + take);
  }
  return micro_f1(truth, predicted);
}

std::size_t first_epoch_reaching(std::span<const double> curve, double fraction) {
  if (curve.empty()) throw config_error("quality curve is empty");
  const double peak = *std::max_element(curve.begin(), curve.end());
  // fraction * peak for positive peaks; the same relative slack below a negative peak.
  const double threshold = peak - (1.0 - fraction) * std::abs(peak);
  for (std::size_t e = 0; e < curve.size(); ++e) {
    if (curve[e] >= threshold) return e + 1;
  }
  return curve.size();
}

PeakEpochs epochs_to_peak(const QualityCurve& curves, double fraction) {
  if (curves.empty()) throw config_error("no quality curves");
  PeakEpochs out;
  for (const auto& c : curves) out.per_repetition.push_back(first_epoch_reaching(c, fraction));
  const double n = static_cast<double>(out.per_repetition.size());
  double sum = 0.0;
  for (auto e : out.per_repetition) sum += static_cast<double>(e);
  out.mean = sum / n;
  if (out.per_repetition.size() > 1) {
    double ss = 0.0;
    for (auto e : out.per_repetition) ss += (static_cast<double>(e) - out.mean) * (static_cast<double>(e) - out.mean);
    out.sd = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

double CostModel::train_per_walk() const {
  return train_per_walk_override > 0.0 ? train_per_walk_override
                                       : expected_pairs * (negatives + 1.0);
}

double CostModel::method_per_walk() const {
  double cost = train_per_walk() + extra_per_walk;
  switch (method) {
    case Method::prefix:
      cost += rounds * prefix_edges;
      break;
    case Method::all:
      cost += rounds * expected_pairs;
      break;
    case Method::baseline:
      break;
  }
  return cost;
}

void validate(const CostModel& cost) {
  if (!(cost.train_per_walk() > 0.0) || cost.negatives < 0.0) {
    throw config_error("cost model needs positive expected pairs and nonnegative negatives");
  }
  if (cost.method != CostModel::Method::baseline && !(cost.rounds > 0.0)) {
    throw config_error("cost model needs F > 0");
  }
  if (cost.method == CostModel::Method::prefix && !(cost.prefix_edges > 0.0)) {
    throw config_error("cost model needs t' > 0");
  }
  if (cost.method == CostModel::Method::all && !(cost.expected_pairs > 0.0)) {
    throw config_error("cost model needs E[|Pairs|] > 0");
  }
}

double training_gain(double epochs_method, double epochs_baseline) {
  if (!(epochs_baseline > 0.0)) throw config_error("baseline epochs must be positive");
  return 1.0 - epochs_method / epochs_baseline;
}

double computation_gain(double epochs_method, double epochs_baseline, const CostModel& cost) {
  if (!(epochs_baseline > 0.0)) throw config_error("baseline epochs must be positive");
  validate(cost);
  return 1.0 - (cost.method_per_walk() * epochs_method) / (cost.train_per_walk() * epochs_baseline);
}

}  // namespace lgw
