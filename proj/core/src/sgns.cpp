#include "lgw/sgns.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lgw/graph.hpp"
#include "lgw/walk.hpp"

namespace lgw {

bool EmbeddingModel::all_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(focus_.begin(), focus_.end(), finite) &&
         std::all_of(context_.begin(), context_.end(), finite);
}

EmbeddingModel init_model(std::size_t node_count, std::size_t dim, Rng& rng) {
  if (dim == 0) throw config_error("embedding dimension must be >= 1");
  EmbeddingModel m(node_count, dim);
  const double half = 0.5 / static_cast<double>(dim);
  for (auto& x : m.focus_matrix()) x = (2.0 * uniform01(rng) - 1.0) * half;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double pos_loss(const EmbeddingModel& m, node_id i, node_id j) {
  return positive_loss(dot(m.focus(i), m.context(j)));
}

double neg_loss(const EmbeddingModel& m, node_id i, node_id j) {
  return negative_loss(dot(m.focus(i), m.context(j)));
}

PairBatch gen_pairs(std::span<const node_id> nodes, std::size_t window, Rng& rng) {
  if (window == 0) throw config_error("window must be >= 1");
  PairBatch out;
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t skip = 1 + uniform_index(rng, window);
    const std::size_t lo = i > skip ? i - skip : 0;
    const std::size_t hi = std::min(n - 1, i + skip);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i) out.emplace_back(nodes[i], nodes[j]);
    }
  }
  return out;
}

PairBatch gen_pairs(const Walk& walk, std::size_t window, Rng& rng) {
  return gen_pairs(walk.nodes, window, rng);
}

double expected_pair_count(std::size_t nodes, std::size_t window) {
  // Position k pairs with min(k, d) nodes behind and min(n-1-k, d) ahead.
  double total = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    for (std::size_t d = 1; d <= window; ++d) {
      total += static_cast<double>(std::min(k, d) + std::min(nodes - 1 - k, d));
    }
  }
  return total / static_cast<double>(window);
}

void NegativeTable::record(const PairBatch& batch) {
  for (const auto& [focus, ctx] : batch) ++counts_[ctx];
}

void NegativeTable::record_concurrent(const PairBatch& batch) {
  for (const auto& [focus, ctx] : batch) {
    std::atomic_ref<std::uint64_t>(counts_[ctx]).fetch_add(1, std::memory_order_relaxed);
  }
}

void NegativeTable::refresh() {
  cdf_.assign(counts_.size(), 0.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    acc += std::pow(static_cast<double>(counts_[j]), kPower);
    cdf_[j] = acc;
  }
  if (acc <= 0.0) {
    cdf_.clear();
    return;
  }
  for (auto& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

node_id NegativeTable::sample(Rng& rng) const {
  if (cdf_.empty()) return static_cast<node_id>(uniform_index(rng, counts_.size()));
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<node_id>(std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1));
}

double NegativeTable::probability(node_id j) const {
  if (cdf_.empty()) return 1.0 / static_cast<double>(counts_.size());
  return j == 0 ? cdf_[0] : cdf_[j] - cdf_[j - 1];
}

std::uint64_t NegativeTable::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

PairBatch record_and_sample_negatives(NegativeTable& tbl, const PairBatch& batch,
                                      std::size_t negatives, Rng& rng) {
  tbl.record(batch);
  if (!tbl.has_distribution()) tbl.refresh();
  PairBatch out;
  out.reserve(batch.size() * negatives);
  for (const auto& [focus, ctx] : batch) {
    for (std::size_t k = 0; k < negatives; ++k) out.emplace_back(focus, tbl.sample(rng));
  }
  return out;
}

double sgd_step(EmbeddingModel& m, node_id i, node_id j, bool positive, double lr) {
  auto f = m.focus(i);
  auto c = m.context(j);
  const double x = dot(f, c);
  const double g = lr * ((positive ? 1.0 : 0.0) - sigmoid(x));
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double c_old = c[k];
    c[k] += g * f[k];
    f[k] += g * c_old;
  }
  return positive ? positive_loss(x) : negative_loss(x);
}

double sgd_step_relaxed(EmbeddingModel& m, node_id i, node_id j, bool positive, double lr) {
  constexpr auto relaxed = std::memory_order_relaxed;
  auto f = m.focus(i);
  auto c = m.context(j);
  double x = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    x += std::atomic_ref<double>(f[k]).load(relaxed) * std::atomic_ref<double>(c[k]).load(relaxed);
  }
  const double g = lr * ((positive ? 1.0 : 0.0) - sigmoid(x));
  for (std::size_t k = 0; k < f.size(); ++k) {
    std::atomic_ref<double> fk(f[k]);
    std::atomic_ref<double> ck(c[k]);
    const double f_old = fk.load(relaxed);
    const double c_old = ck.load(relaxed);
    ck.store(c_old + g * f_old, relaxed);
    fk.store(f_old + g * c_old, relaxed);
  }
  return positive ? positive_loss(x) : negative_loss(x);
}

UpdateStats update_on_walk(EmbeddingModel& m, const Walk& walk, NegativeTable& tbl,
                           const UpdateOptions& opt, Rng& rng) {
  if (!(opt.learning_rate > 0.0)) throw config_error("learning rate must be positive");
  UpdateStats stats;
  const PairBatch positives = gen_pairs(walk, opt.window, rng);
  if (positives.empty()) return stats;

  PairBatch negatives;
  if (opt.relaxed) {
    tbl.record_concurrent(positives);
    negatives.reserve(positives.size() * opt.negatives);
    for (const auto& [focus, ctx] : positives) {
      for (std::size_t k = 0; k < opt.negatives; ++k) negatives.emplace_back(focus, tbl.sample(rng));
    }
  } else {
    negatives = record_and_sample_negatives(tbl, positives, opt.negatives, rng);
  }

  auto step = opt.relaxed ? &sgd_step_relaxed : &sgd_step;
  for (std::size_t p = 0; p < positives.size(); ++p) {
    const auto [i, j] = positives[p];
    stats.positive_loss_sum += step(m, i, j, true, opt.learning_rate);
    for (std::size_t k = 0; k < opt.negatives; ++k) {
      const auto [ni, nj] = negatives[p * opt.negatives + k];
      step(m, ni, nj, false, opt.learning_rate);
    }
  }
  stats.positive_pairs = positives.size();
  stats.negative_pairs = negatives.size();

  if (!std::isfinite(stats.positive_loss_sum)) {
    throw numeric_error("non-finite loss during training; learning rate too high?");
  }
  auto check = [](std::span<const double> row, const char* which, node_id v) {
    for (double x : row) {
      if (!std::isfinite(x)) {
        throw numeric_error(std::string("non-finite ") + which + " parameter for node " +
                            std::to_string(v) + "; learning rate too high?");
      }
    }
  };
  // Concurrent workers may be writing these rows; the loss sum covers that mode.
  if (!opt.relaxed) {
    for (node_id v : walk.nodes) {
      check(m.focus(v), "focus", v);
      check(m.context(v), "context", v);
    }
    for (const auto& [i, j] : negatives) check(m.context(j), "context", j);
  }
  return stats;
}

double lr_at(double progress, const LearningRateSchedule& schedule) {
  progress = std::clamp(progress, 0.0, 1.0);
  const double lr = schedule.initial + progress * (schedule.minimum - schedule.initial);
  return std::max(lr, schedule.minimum);
}

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  return std::string(buf, ptr);
}

namespace {

void write_rows(std::ostream& out, const EmbeddingModel& m, const IdMap& ids, bool context) {
  out << m.node_count() << ' ' << m.dim() << '\n';
  for (node_id v = 0; v < m.node_count(); ++v) {
    out << ids.name(v);
    for (double x : m.focus(v)) out << ' ' << format_real(x);
    if (context) {
      for (double x : m.context(v)) out << ' ' << format_real(x);
    }
    out << '\n';
  }
}

}  // namespace

void write_embedding(std::ostream& out, const EmbeddingModel& m, const IdMap& ids) {
  write_rows(out, m, ids, false);
}

void write_model(std::ostream& out, const EmbeddingModel& m, const IdMap& ids) {
  write_rows(out, m, ids, true);
}

LoadedEmbedding read_embedding(std::istream& in) {
  std::string line;
  std::size_t n = 0, d = 0;
  if (!std::getline(in, line)) throw data_error("embedding file is empty");
  {
    std::istringstream hdr(line);
    if (!(hdr >> n >> d) || d == 0) throw data_error("embedding header must be \"node_count d\"");
  }
  LoadedEmbedding out;
  out.model = EmbeddingModel(n, d);
  out.ids.reserve(n);
  std::vector<double> values;
  for (std::size_t row = 0; row < n; ++row) {
    if (!std::getline(in, line)) throw data_error("embedding file truncated at row " + std::to_string(row + 1));
    std::istringstream fields(line);
    std::string id, tok;
    fields >> id;
    values.clear();
    while (fields >> tok) {
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw data_error("malformed value \"" + tok + "\" in embedding row " + std::to_string(row + 1));
      }
      values.push_back(x);
    }
    if (values.size() != d && values.size() != 2 * d) {
      throw data_error("embedding row " + std::to_string(row + 1) + " has " +
                       std::to_string(values.size()) + " values, expected " + std::to_string(d));
    }
    if (row == 0) out.has_context = values.size() == 2 * d;
    if (out.has_context != (values.size() == 2 * d)) {
      throw data_error("embedding row " + std::to_string(row + 1) + " mixes row layouts");
    }
    const auto v = static_cast<node_id>(row);
    std::copy_n(values.begin(), d, out.model.focus(v).begin());
    if (values.size() == 2 * d) std::copy_n(values.begin() + d, d, out.model.context(v).begin());
    out.ids.push_back(std::move(id));
  }
  return out;
}

}  // namespace lgw
