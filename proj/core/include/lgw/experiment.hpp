#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lgw/diagnostics.hpp"
#include "lgw/eval.hpp"
#include "lgw/graph.hpp"
#include "lgw/selector.hpp"

namespace lgw {

enum class TaskKind { clustering, multiclass, multilabel };
enum class Method { baseline, loss_guided, loss_guided_walks };

struct ExperimentConfig {
  std::string edges_path;
  std::string labels_path;
  bool directed = false;

  TaskKind task = TaskKind::clustering;
  std::size_t clusters = 2;          // k for clustering
  std::size_t train_per_class = 20;  // multiclass split
  double train_fraction = 0.5;       // multilabel split

  Method method = Method::loss_guided;
  bool node2vec = false;  // base walk: simple unless set
  double node2vec_p = 1.0;
  double node2vec_q = 1.0;
  std::size_t walk_length = 10;
  std::size_t window = 10;
  std::size_t negatives = 5;
  std::optional<std::size_t> dim;  // 16 for clustering, 128 otherwise
  std::size_t epochs = 10;
  std::size_t rounds = 10;
  ScoreFn score = ScoreFn::prefix(1, 32.0);
  double walk_power = 1.0;  // loss-guided-walks method
  std::size_t repetitions = 1;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  ModelRead model_read = ModelRead::relaxed;
  LearningRateSchedule lr;
  bool diagnostics = true;
  std::size_t background_pairs = 1000;
  double peak_fraction = 0.95;

  WalkKind base_walk() const {
    return node2vec ? WalkKind{Node2VecWalkKind{node2vec_p, node2vec_q}} : WalkKind{SimpleWalkKind{}};
  }
  std::size_t effective_dim() const { return dim.value_or(task == TaskKind::clustering ? 16 : 128); }

  /// Applies one key=value setting; throws config_error on an unknown key or
  /// a malformed value.
  void set(const std::string& key, const std::string& value);
  /// Reads a flat key=value file ('#' comments, blank lines ignored).
  void load(std::istream& in);
  void load_file(const std::string& path);
  /// All settings as key=value strings, the inverse of set().
  std::map<std::string, std::string> to_map() const;

  static const std::vector<std::string>& keys();
};

void validate(const ExperimentConfig& cfg);
std::string to_string(TaskKind task);
std::string to_string(Method method);
std::string describe(const ScoreFn& score);

/// Per-node labels: one class for multiclass and clustering, a set for multilabel.
struct LabelData {
  std::vector<std::vector<std::size_t>> labels;
  std::vector<std::string> class_names;
  std::size_t class_count() const { return class_names.size(); }
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> eval;
};

/// Multiclass: "node class" per line. Multilabel: "node l1,l2,..." per line.
/// Throws data_error naming any node id absent from the graph, and for
/// multiclass tasks any graph node without a label.
LabelData ingest_labels(std::istream& in, const IdMap& ids, TaskKind task);
LabelData ingest_labels_file(const std::string& path, const IdMap& ids, TaskKind task);

/// Multiclass: `train_per_class` random nodes of every class (all of a class
/// when it is smaller). Multilabel: floor(fraction * labelled nodes) uniformly.
Split split_labels(const LabelData& labels, TaskKind task, std::size_t train_per_class,
                   double train_fraction, Rng& rng);

struct Dataset {
  Graph graph;
  IdMap ids;
  std::optional<LabelData> labels;
  // Ground-truth communities for training-share tracking, when known.
  std::optional<std::vector<std::size_t>> communities;
};

/// Loads edges and, when configured, labels.
Dataset load_dataset(const ExperimentConfig& cfg);

struct EpochRecord {
  std::string method;
  std::size_t repetition = 0;
  std::size_t epoch = 0;  // 1-based
  double quality = 0.0;
  EpochStats stats;
  std::optional<LossProfile> diagnostics;
  std::vector<double> community_share;
};

struct MethodResult {
  std::string name;
  Method method = Method::baseline;
  QualityCurve curves;  // repetition x epoch
  PeakEpochs peak;
  std::vector<std::size_t> walks_trained;  // per repetition, total
  CostModel cost;
};

struct GainRow {
  std::string method;
  std::size_t rounds = 0;
  std::size_t prefix_edges = 0;
  double power = 0.0;
  std::string score;
  double epochs_method = 0.0;
  double epochs_baseline = 0.0;
  double training_gain = 0.0;
  double training_gain_sd = 0.0;  // method SD / baseline mean epochs
  double computation_gain = 0.0;
};

struct RunReport {
  std::vector<MethodResult> methods;  // baseline first
  std::vector<EpochRecord> epochs;
  std::vector<GainRow> gains;
  double expected_pairs = 0.0;
  EmbeddingModel final_model;  // repetition 0 of the configured method
};

/// Runs the configured method and, for comparison, the baseline with the same
/// repetition seeds. Epoch 1 of every method is a baseline epoch; loss-guided
/// selection runs from epoch 2. Quality is evaluated at every epoch boundary.
RunReport run_experiment(const ExperimentConfig& cfg, const Dataset& data);

/// Seeds of repetition `rep`; any repetition can be rerun on its own.
std::uint64_t repetition_seed(const ExperimentConfig& cfg, std::size_t rep);
std::uint64_t training_seed(std::uint64_t rep_seed);
std::uint64_t evaluation_seed(std::uint64_t rep_seed, std::size_t epoch);

/// The train/eval split repetition seed `rep_seed` uses; empty for clustering.
Split repetition_split(const ExperimentConfig& cfg, const Dataset& data, std::uint64_t rep_seed);

/// Quality of an embedding on the configured task.
double evaluate_quality(const ExperimentConfig& cfg, const Dataset& data,
                        const EmbeddingModel& model, const Split& split, Rng& rng);

GainRow make_gain_row(const MethodResult& method, const MethodResult& baseline,
                      const ExperimentConfig& cfg);

struct SweepGrid {
  std::vector<std::size_t> rounds{2, 5, 10, 20};
  std::vector<double> powers{1.0, 4.0, 32.0};
  std::vector<std::size_t> prefix_edges{1, 2, 3, 5, 10};
};

struct SweepReport {
  MethodResult baseline;
  std::vector<GainRow> rows;
};

/// One loss-guided run per grid point against a single shared baseline.
SweepReport run_sweep(const ExperimentConfig& base, const Dataset& data, const SweepGrid& grid);

struct Node2VecGridRow {
  double p = 1.0;
  double q = 1.0;
  double peak_quality = 0.0;  // mean over repetitions of the per-run peak
  PeakEpochs peak;
};

/// Baseline runs over the node2vec (p, q) grid.
std::vector<Node2VecGridRow> run_node2vec_grid(const ExperimentConfig& base, const Dataset& data,
                                               const std::vector<double>& values = {0.25, 0.5,
                                                                                    1.0, 2.0});

void write_epoch_csv(std::ostream& out, const RunReport& report);
void write_gain_csv(std::ostream& out, const std::vector<GainRow>& rows);
void write_node2vec_csv(std::ostream& out, const std::vector<Node2VecGridRow>& rows);

/// Version string baked in at build time.
std::string version_string();

}  // namespace lgw
