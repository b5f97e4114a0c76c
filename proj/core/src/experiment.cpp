#include "lgw/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "lgw/synth.hpp"

#ifndef LGW_VERSION
#define LGW_VERSION "unknown"
#endif

namespace lgw {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw config_error("bad value for '" + key + "': '" + value + "'");
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value);
  return out;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  if (!value.empty() && value.front() == '-') bad_value(key, value);
  return parse_number<std::size_t>(key, value);
}

double parse_real(const std::string& key, const std::string& value) {
  const double x = parse_number<double>(key, value);
  if (!std::isfinite(x)) bad_value(key, value);
  return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

std::string real_text(double x) { return format_real(x); }

}  // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> names{
      "edges",      "labels",       "directed",    "task",        "clusters",
      "train_per_class", "train_fraction", "method", "walk",      "node2vec_p",
      "node2vec_q", "walk_power",   "walk_length", "window",      "negatives",
      "dim",        "epochs",       "rounds",      "score",       "prefix_edges",
      "score_power", "repetitions", "seed",        "workers",     "model_read",
      "lr_initial", "lr_min",       "diagnostics", "background_pairs", "peak_fraction"};
  return names;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "edges") {
    edges_path = value;
  } else if (key == "labels") {
    labels_path = value;
  } else if (key == "directed") {
    directed = parse_bool(key, value);
  } else if (key == "task") {
    if (value == "clustering") task = TaskKind::clustering;
    else if (value == "multiclass") task = TaskKind::multiclass;
    else if (value == "multilabel") task = TaskKind::multilabel;
    else bad_value(key, value);
  } else if (key == "clusters") {
    clusters = parse_size(key, value);
  } else if (key == "train_per_class") {
    train_per_class = parse_size(key, value);
  } else if (key == "train_fraction") {
    train_fraction = parse_real(key, value);
  } else if (key == "method") {
    if (value == "baseline") method = Method::baseline;
    else if (value == "loss_guided") method = Method::loss_guided;
    else if (value == "loss_guided_walks") method = Method::loss_guided_walks;
    else bad_value(key, value);
  } else if (key == "walk") {
    if (value == "simple") node2vec = false;
    else if (value == "node2vec") node2vec = true;
    else bad_value(key, value);
  } else if (key == "node2vec_p") {
    node2vec_p = parse_real(key, value);
  } else if (key == "node2vec_q") {
    node2vec_q = parse_real(key, value);
  } else if (key == "walk_power") {
    walk_power = parse_real(key, value);
  } else if (key == "walk_length") {
    walk_length = parse_size(key, value);
  } else if (key == "window") {
    window = parse_size(key, value);
  } else if (key == "negatives") {
    negatives = parse_size(key, value);
  } else if (key == "dim") {
    if (value == "auto") dim.reset();
    else dim = parse_size(key, value);
  } else if (key == "epochs") {
    epochs = parse_size(key, value);
  } else if (key == "rounds") {
    rounds = parse_size(key, value);
  } else if (key == "score") {
    if (value == "prefix") score.kind = ScoreFn::Kind::prefix;
    else if (value == "all") score.kind = ScoreFn::Kind::all;
    else bad_value(key, value);
  } else if (key == "prefix_edges") {
    score.prefix_edges = parse_size(key, value);
  } else if (key == "score_power") {
    score.power = parse_real(key, value);
  } else if (key == "repetitions") {
    repetitions = parse_size(key, value);
  } else if (key == "seed") {
    if (!value.empty() && value.front() == '-') bad_value(key, value);
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "workers") {
    workers = parse_size(key, value);
  } else if (key == "model_read") {
    if (value == "relaxed") model_read = ModelRead::relaxed;
    else if (value == "consistent") model_read = ModelRead::consistent;
    else bad_value(key, value);
  } else if (key == "lr_initial") {
    lr.initial = parse_real(key, value);
  } else if (key == "lr_min") {
    lr.minimum = parse_real(key, value);
  } else if (key == "diagnostics") {
    diagnostics = parse_bool(key, value);
  } else if (key == "background_pairs") {
    background_pairs = parse_size(key, value);
  } else if (key == "peak_fraction") {
    peak_fraction = parse_real(key, value);
  } else {
    throw config_error("unknown config key '" + key + "'");
  }
}

void ExperimentConfig::load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw config_error("config line " + std::to_string(line_no) + ": expected key=value");
    }
    set(trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
  }
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path);
  load(in);
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["edges"] = edges_path;
  m["labels"] = labels_path;
  m["directed"] = directed ? "true" : "false";
  m["task"] = to_string(task);
  m["clusters"] = std::to_string(clusters);
  m["train_per_class"] = std::to_string(train_per_class);
  m["train_fraction"] = real_text(train_fraction);
  m["method"] = to_string(method);
  m["walk"] = node2vec ? "node2vec" : "simple";
  m["node2vec_p"] = real_text(node2vec_p);
  m["node2vec_q"] = real_text(node2vec_q);
  m["walk_power"] = real_text(walk_power);
  m["walk_length"] = std::to_string(walk_length);
  m["window"] = std::to_string(window);
  m["negatives"] = std::to_string(negatives);
  m["dim"] = dim ? std::to_string(*dim) : "auto";
  m["epochs"] = std::to_string(epochs);
  m["rounds"] = std::to_string(rounds);
  m["score"] = score.kind == ScoreFn::Kind::prefix ? "prefix" : "all";
  m["prefix_edges"] = std::to_string(score.prefix_edges);
  m["score_power"] = real_text(score.power);
  m["repetitions"] = std::to_string(repetitions);
  m["seed"] = std::to_string(seed);
  m["workers"] = std::to_string(workers);
  m["model_read"] = model_read == ModelRead::relaxed ? "relaxed" : "consistent";
  m["lr_initial"] = real_text(lr.initial);
  m["lr_min"] = real_text(lr.minimum);
  m["diagnostics"] = diagnostics ? "true" : "false";
  m["background_pairs"] = std::to_string(background_pairs);
  m["peak_fraction"] = real_text(peak_fraction);
  return m;
}

std::string to_string(TaskKind task) {
  switch (task) {
    case TaskKind::clustering: return "clustering";
    case TaskKind::multiclass: return "multiclass";
    case TaskKind::multilabel: return "multilabel";
  }
  return "?";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::baseline: return "baseline";
    case Method::loss_guided: return "loss_guided";
    case Method::loss_guided_walks: return "loss_guided_walks";
  }
  return "?";
}

std::string describe(const ScoreFn& score) {
  if (score.kind == ScoreFn::Kind::all) return "all^" + real_text(score.power);
  return "prefix" + std::to_string(score.prefix_edges) + "^" + real_text(score.power);
}

namespace {

TrainConfig train_config(const ExperimentConfig& cfg) {
  TrainConfig tc;
  tc.walk_length = cfg.walk_length;
  tc.window = cfg.window;
  tc.negatives = cfg.negatives;
  tc.dim = cfg.effective_dim();
  tc.epochs = cfg.epochs;
  tc.lr = cfg.lr;
  tc.walk_kind = cfg.base_walk();
  tc.workers = cfg.workers;
  tc.model_read = cfg.model_read;
  return tc;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  validate(train_config(cfg));
  if (cfg.epochs == 0) throw config_error("epochs must be at least 1");
  if (cfg.repetitions == 0) throw config_error("repetitions must be at least 1");
  if (cfg.method == Method::loss_guided) {
    if (cfg.rounds == 0) throw config_error("rounds must be at least 1");
    validate(cfg.score, cfg.walk_length);
  }
  if (cfg.method == Method::loss_guided_walks) validate(WalkKind{LossGuidedWalkKind{cfg.walk_power}});
  if (cfg.task == TaskKind::clustering && cfg.clusters == 0) {
    throw config_error("clusters must be at least 1");
  }
  if (cfg.task == TaskKind::multiclass && cfg.train_per_class == 0) {
    throw config_error("train_per_class must be at least 1");
  }
  if (cfg.task == TaskKind::multilabel && !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw config_error("train_fraction must lie in (0, 1)");
  }
  if (!(cfg.peak_fraction > 0.0 && cfg.peak_fraction <= 1.0)) {
    throw config_error("peak_fraction must lie in (0, 1]");
  }
}

LabelData ingest_labels(std::istream& in, const IdMap& ids, TaskKind task) {
  LabelData out;
  out.labels.assign(ids.size(), {});
  std::unordered_map<std::string, std::size_t> class_index;
  auto intern_class = [&](const std::string& name) {
    auto [it, fresh] = class_index.try_emplace(name, out.class_names.size());
    if (fresh) out.class_names.push_back(name);
    return it->second;
  };
  std::vector<bool> seen(ids.size(), false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string node;
    if (!(fields >> node)) continue;
    const auto where = " (labels line " + std::to_string(line_no) + ")";
    const auto id = ids.find(node);
    if (!id) throw data_error("label for unknown node '" + node + "'" + where);
    std::vector<std::string> names;
    std::string token;
    while (fields >> token) {
      std::istringstream parts(token);
      std::string part;
      while (std::getline(parts, part, ',')) {
        if (!part.empty()) names.push_back(part);
      }
    }
    auto& mine = out.labels[*id];
    if (task == TaskKind::multilabel) {
      for (const auto& n : names) {
        const std::size_t c = intern_class(n);
        if (std::find(mine.begin(), mine.end(), c) == mine.end()) mine.push_back(c);
      }
    } else {
      if (names.size() != 1) throw data_error("expected exactly one class" + where);
      const std::size_t c = intern_class(names.front());
      if (seen[*id] && mine.front() != c) {
        throw data_error("conflicting classes for node '" + node + "'" + where);
      }
      mine.assign(1, c);
    }
    seen[*id] = true;
  }
  if (task == TaskKind::multiclass) {
    for (node_id u = 0; u < ids.size(); ++u) {
      if (!seen[u]) throw data_error("node '" + ids.name(u) + "' has no label");
    }
  }
  for (auto& l : out.labels) std::sort(l.begin(), l.end());
  return out;
}

LabelData ingest_labels_file(const std::string& path, const IdMap& ids, TaskKind task) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open labels file " + path);
  return ingest_labels(in, ids, task);
}

Split split_labels(const LabelData& labels, TaskKind task, std::size_t train_per_class,
                   double train_fraction, Rng& rng) {
  Split s;
  const std::size_t n = labels.labels.size();
  std::vector<bool> in_train(n, false);
  if (task == TaskKind::multilabel) {
    std::vector<std::size_t> labelled;
    for (std::size_t i = 0; i < n; ++i) {
      if (!labels.labels[i].empty()) labelled.push_back(i);
    }
    shuffle(labelled, rng);
    const auto take = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(labelled.size())));
    for (std::size_t k = 0; k < take; ++k) in_train[labelled[k]] = true;
  } else {
    std::vector<std::vector<std::size_t>> members(labels.class_count());
    for (std::size_t i = 0; i < n; ++i) {
      if (!labels.labels[i].empty()) members[labels.labels[i].front()].push_back(i);
    }
    for (auto& group : members) {
      shuffle(group, rng);
      const std::size_t take = std::min(train_per_class, group.size());
      for (std::size_t k = 0; k < take; ++k) in_train[group[k]] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels.labels[i].empty()) continue;
    (in_train[i] ? s.train : s.eval).push_back(i);
  }
  return s;
}

Dataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.edges_path.empty()) throw config_error("no edges file configured");
  if (cfg.task != TaskKind::clustering && cfg.labels_path.empty()) {
    throw config_error(to_string(cfg.task) + " task needs a labels file");
  }
  LoadedGraph lg = load_edge_list_file(cfg.edges_path, cfg.directed);
  Dataset d{std::move(lg.graph), std::move(lg.ids), std::nullopt, std::nullopt};
  if (!cfg.labels_path.empty()) {
    const TaskKind as = cfg.task == TaskKind::multilabel ? TaskKind::multilabel : TaskKind::multiclass;
    d.labels = ingest_labels_file(cfg.labels_path, d.ids, as);
    if (as == TaskKind::multiclass) {
      std::vector<std::size_t> c(d.graph.node_count());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = d.labels->labels[i].front();
      d.communities = std::move(c);
    }
  }
  return d;
}

namespace {

// Seed streams within one repetition.
constexpr std::uint64_t kTrainStream = 0;
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kEvalStream = 1000;
constexpr std::uint64_t kDiagnosticStream = 2000000;

}  // namespace

std::uint64_t repetition_seed(const ExperimentConfig& cfg, std::size_t rep) { return cfg.seed + rep; }
std::uint64_t training_seed(std::uint64_t rep_seed) { return derive_seed(rep_seed, kTrainStream); }
std::uint64_t evaluation_seed(std::uint64_t rep_seed, std::size_t epoch) {
  return derive_seed(rep_seed, kEvalStream + epoch);
}

Split repetition_split(const ExperimentConfig& cfg, const Dataset& data, std::uint64_t rep_seed) {
  if (!data.labels || cfg.task == TaskKind::clustering) return {};
  Rng rng(derive_seed(rep_seed, kSplitStream));
  return split_labels(*data.labels, cfg.task, cfg.train_per_class, cfg.train_fraction, rng);
}

double evaluate_quality(const ExperimentConfig& cfg, const Dataset& data,
                        const EmbeddingModel& model, const Split& split, Rng& rng) {
  const FeatureView x{model.focus_matrix(), model.node_count(), model.dim()};
  switch (cfg.task) {
    case TaskKind::clustering: {
      const auto km = kmeans(x, cfg.clusters, rng);
      return modularity(data.graph, km.assignment);
    }
    case TaskKind::multiclass: {
      const auto& l = *data.labels;
      const auto clf = ovr_logreg_fit(x, l.labels, l.class_count(), split.train);
      std::vector<std::size_t> truth(l.labels.size(), 0);
      for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!l.labels[i].empty()) truth[i] = l.labels[i].front();
      }
      return predict_multiclass(clf, x, truth, split.eval);
    }
    case TaskKind::multilabel: {
      const auto& l = *data.labels;
      const auto clf = ovr_logreg_fit(x, l.labels, l.class_count(), split.train);
      return predict_multilabel(clf, x, l.labels, split.eval).f1();
    }
  }
  return 0.0;
}

namespace {

CostModel cost_for(const ExperimentConfig& cfg, Method method, double expected_pairs) {
  CostModel c;
  c.expected_pairs = expected_pairs;
  c.negatives = static_cast<double>(cfg.negatives);
  c.rounds = static_cast<double>(cfg.rounds);
  c.prefix_edges = static_cast<double>(cfg.score.prefix_edges);
  if (method == Method::loss_guided) {
    c.method = cfg.score.kind == ScoreFn::Kind::prefix ? CostModel::Method::prefix
                                                       : CostModel::Method::all;
  }
  return c;
}

MethodResult run_method(const ExperimentConfig& cfg, const Dataset& data, Method method,
                        std::vector<EpochRecord>* sink, EmbeddingModel* keep) {
  MethodResult res;
  res.method = method;
  res.name = to_string(method);
  const double pairs = expected_pair_count(cfg.walk_length + 1, cfg.window);
  res.cost = cost_for(cfg, method, pairs);
  const Graph& g = data.graph;
  const std::size_t k = data.labels ? data.labels->class_count() : 0;
  std::optional<RoundPlan> plan;
  if (method == Method::loss_guided) plan = make_round_plan(g.node_count(), cfg.rounds);
  double walk_evals = 0.0, walks_after_first = 0.0;

  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t rep_seed = repetition_seed(cfg, rep);
    const Split split = repetition_split(cfg, data, rep_seed);
    TrainingState state(g, train_config(cfg), training_seed(rep_seed));
    std::vector<double> curve;
    std::size_t walks = 0;
    for (std::size_t e = 1; e <= cfg.epochs; ++e) {
      EpochStats stats;
      if (e == 1 || method == Method::baseline) {
        stats = run_baseline_epoch(state);
      } else if (method == Method::loss_guided) {
        stats = run_loss_guided_epoch(state, cfg.score, *plan);
      } else {
        if (e == 2) state.set_walk_kind(LossGuidedWalkKind{cfg.walk_power});
        stats = run_baseline_epoch(state);
        walk_evals += static_cast<double>(stats.walk_loss_evaluations);
        walks_after_first += static_cast<double>(stats.walks_trained);
      }
      walks += stats.walks_trained;
      Rng eval_rng(evaluation_seed(rep_seed, e));
      const double q = evaluate_quality(cfg, data, state.model(), split, eval_rng);
      curve.push_back(q);
      if (sink) {
        EpochRecord rec;
        rec.method = res.name;
        rec.repetition = rep;
        rec.epoch = e;
        rec.quality = q;
        if (cfg.diagnostics && g.arc_count() > 0) {
          Rng diag_rng(derive_seed(rep_seed, kDiagnosticStream + e));
          rec.diagnostics = loss_profile(state.model(), g, diag_rng, cfg.background_pairs);
        }
        if (data.communities && k > 0) {
          const std::vector<std::vector<node_id>> starts{stats.start_nodes};
          rec.community_share = community_training_share(starts, *data.communities, k).front();
        }
        rec.stats = std::move(stats);
        rec.stats.start_nodes.clear();
        rec.stats.start_nodes.shrink_to_fit();
        sink->push_back(std::move(rec));
      }
    }
    res.curves.push_back(std::move(curve));
    res.walks_trained.push_back(walks);
    if (rep == 0 && keep) *keep = state.model();
  }
  if (method == Method::loss_guided_walks && walks_after_first > 0.0) {
    res.cost.extra_per_walk = walk_evals / walks_after_first;
  }
  res.peak = epochs_to_peak(res.curves, cfg.peak_fraction);
  return res;
}

}  // namespace

GainRow make_gain_row(const MethodResult& method, const MethodResult& baseline,
                      const ExperimentConfig& cfg) {
  GainRow row;
  row.method = method.name;
  row.rounds = cfg.rounds;
  row.prefix_edges = cfg.score.kind == ScoreFn::Kind::prefix ? cfg.score.prefix_edges : 0;
  row.power = method.method == Method::loss_guided_walks ? cfg.walk_power : cfg.score.power;
  row.score = method.method == Method::loss_guided ? describe(cfg.score) : "-";
  row.epochs_method = method.peak.mean;
  row.epochs_baseline = baseline.peak.mean;
  row.training_gain = training_gain(row.epochs_method, row.epochs_baseline);
  row.training_gain_sd = method.peak.sd / baseline.peak.mean;
  row.computation_gain = computation_gain(row.epochs_method, row.epochs_baseline, method.cost);
  return row;
}

RunReport run_experiment(const ExperimentConfig& cfg, const Dataset& data) {
  validate(cfg);
  if (cfg.task != TaskKind::clustering && !data.labels) {
    throw config_error(to_string(cfg.task) + " task needs labels");
  }
  RunReport report;
  report.expected_pairs = expected_pair_count(cfg.walk_length + 1, cfg.window);
  const bool only_baseline = cfg.method == Method::baseline;
  report.methods.push_back(run_method(cfg, data, Method::baseline, &report.epochs,
                                      only_baseline ? &report.final_model : nullptr));
  if (!only_baseline) {
    report.methods.push_back(
        run_method(cfg, data, cfg.method, &report.epochs, &report.final_model));
    report.gains.push_back(make_gain_row(report.methods[1], report.methods[0], cfg));
  }
  return report;
}

SweepReport run_sweep(const ExperimentConfig& base, const Dataset& data, const SweepGrid& grid) {
  ExperimentConfig cfg = base;
  cfg.method = Method::baseline;
  validate(cfg);
  SweepReport out;
  out.baseline = run_method(cfg, data, Method::baseline, nullptr, nullptr);
  cfg.method = Method::loss_guided;
  const bool prefix = base.score.kind == ScoreFn::Kind::prefix;
  const std::vector<std::size_t> edges =
      prefix ? grid.prefix_edges : std::vector<std::size_t>{base.score.prefix_edges};
  for (std::size_t f : grid.rounds) {
    for (double p : grid.powers) {
      for (std::size_t t : edges) {
        cfg.rounds = f;
        cfg.score.power = p;
        cfg.score.prefix_edges = t;
        validate(cfg);
        const MethodResult m = run_method(cfg, data, Method::loss_guided, nullptr, nullptr);
        out.rows.push_back(make_gain_row(m, out.baseline, cfg));
      }
    }
  }
  return out;
}

std::vector<Node2VecGridRow> run_node2vec_grid(const ExperimentConfig& base, const Dataset& data,
                                               const std::vector<double>& values) {
  std::vector<Node2VecGridRow> rows;
  ExperimentConfig cfg = base;
  cfg.method = Method::baseline;
  cfg.node2vec = true;
  for (double p : values) {
    for (double q : values) {
      cfg.node2vec_p = p;
      cfg.node2vec_q = q;
      validate(cfg);
      const MethodResult m = run_method(cfg, data, Method::baseline, nullptr, nullptr);
      Node2VecGridRow row{p, q, 0.0, m.peak};
      for (const auto& c : m.curves) row.peak_quality += *std::max_element(c.begin(), c.end());
      row.peak_quality /= static_cast<double>(m.curves.size());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_epoch_csv(std::ostream& out, const RunReport& report) {
  std::size_t k = 0;
  for (const auto& e : report.epochs) k = std::max(k, e.community_share.size());
  out << "method,repetition,epoch,quality,walks_trained,candidates_scored,"
         "score_loss_evaluations,walk_loss_evaluations,mean_positive_loss,learning_rate,"
         "edge_loss,background_loss,edge_background_ratio,q90_edge_loss,q90_mean_ratio";
  for (std::size_t c = 0; c < k; ++c) out << ",share_" << c;
  out << '\n';
  for (const auto& e : report.epochs) {
    out << e.method << ',' << e.repetition << ',' << e.epoch << ',' << format_real(e.quality) << ','
        << e.stats.walks_trained << ',' << e.stats.candidates_scored << ','
        << e.stats.score_loss_evaluations << ',' << e.stats.walk_loss_evaluations << ','
        << format_real(e.stats.updates.mean_positive_loss()) << ','
        << format_real(e.stats.final_learning_rate);
    if (e.diagnostics) {
      const auto& d = *e.diagnostics;
      out << ',' << format_real(d.edge_loss) << ','
          << (d.background_defined ? format_real(d.background_loss) : "") << ','
          << (d.background_defined ? format_real(d.edge_background_ratio) : "") << ','
          << format_real(d.q90_edge_loss) << ',' << format_real(d.q90_mean_ratio);
    } else {
      out << ",,,,,";
    }
    for (std::size_t c = 0; c < k; ++c) {
      out << ',';
      if (c < e.community_share.size()) out << format_real(e.community_share[c]);
    }
    out << '\n';
  }
}

void write_gain_csv(std::ostream& out, const std::vector<GainRow>& rows) {
  out << "method,score,rounds,prefix_edges,power,epochs_method,epochs_baseline,training_gain,"
         "training_gain_sd,computation_gain\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.score << ',' << r.rounds << ',' << r.prefix_edges << ','
        << format_real(r.power) << ',' << format_real(r.epochs_method) << ','
        << format_real(r.epochs_baseline) << ',' << format_real(r.training_gain) << ','
        << format_real(r.training_gain_sd) << ',' << format_real(r.computation_gain) << '\n';
  }
}

void write_node2vec_csv(std::ostream& out, const std::vector<Node2VecGridRow>& rows) {
  out << "p,q,peak_quality,epochs_to_peak,epochs_to_peak_sd\n";
  for (const auto& r : rows) {
    out << format_real(r.p) << ',' << format_real(r.q) << ',' << format_real(r.peak_quality) << ','
        << format_real(r.peak.mean) << ',' << format_real(r.peak.sd) << '\n';
  }
}

std::string version_string() { return LGW_VERSION; }

}  // namespace lgw
