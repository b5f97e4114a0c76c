// lgwalk: train, evaluate and probe node embeddings with loss-guided walks.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lgw/diagnostics.hpp"
#include "lgw/experiment.hpp"
#include "lgw/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Config file plus one flag per config key; flags win.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App& cmd) {
    cmd.add_option("-c,--config", file, "flat key=value config file");
    for (const auto& key : lgw::ExperimentConfig::keys()) {
      cmd.add_option("--" + key, overrides[key], "override config key '" + key + "'");
    }
  }

  lgw::ExperimentConfig resolve(const CLI::App& cmd) const {
    lgw::ExperimentConfig cfg;
    if (!file.empty()) cfg.load_file(file);
    for (const auto& key : lgw::ExperimentConfig::keys()) {
      if (cmd.count("--" + key) > 0) cfg.set(key, overrides.at(key));
    }
    return cfg;
  }
};

std::ofstream open_output(const std::string& path) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream out(path);
  if (!out) throw lgw::data_error("cannot write " + path);
  return out;
}

std::string in_dir(const std::string& dir, const std::string& explicit_path, const char* name) {
  return explicit_path.empty() ? (fs::path(dir) / name).string() : explicit_path;
}

json manifest_base(const std::string& command, const lgw::ExperimentConfig& cfg) {
  json m;
  m["command"] = command;
  m["version"] = lgw::version_string();
  m["config"] = cfg.to_map();
  json seeds = json::array();
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    const auto s = lgw::repetition_seed(cfg, rep);
    seeds.push_back({{"repetition", rep}, {"seed", s}, {"training_seed", lgw::training_seed(s)}});
  }
  m["seeds"] = seeds;
  return m;
}

void write_manifest(const std::string& path, const json& m) {
  auto out = open_output(path);
  out << m.dump(2) << '\n';
}

// Reorders a loaded embedding to the graph's node numbering.
lgw::EmbeddingModel align_to_graph(const lgw::LoadedEmbedding& e, const lgw::IdMap& ids) {
  if (e.ids.size() != ids.size()) {
    throw lgw::data_error("embedding has " + std::to_string(e.ids.size()) + " rows, graph has " +
                          std::to_string(ids.size()) + " nodes");
  }
  lgw::EmbeddingModel m(ids.size(), e.model.dim());
  for (std::size_t row = 0; row < e.ids.size(); ++row) {
    const auto id = ids.find(e.ids[row]);
    if (!id) throw lgw::data_error("embedding node '" + e.ids[row] + "' is not in the graph");
    const auto src = static_cast<lgw::node_id>(row);
    std::copy_n(e.model.focus(src).begin(), m.dim(), m.focus(*id).begin());
    std::copy_n(e.model.context(src).begin(), m.dim(), m.context(*id).begin());
  }
  return m;
}

lgw::LoadedEmbedding read_embedding_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lgw::data_error("cannot open embedding file " + path);
  return lgw::read_embedding(in);
}

json profile_json(const lgw::LossProfile& p) {
  json j{{"edge_loss", p.edge_loss},
         {"q90_edge_loss", p.q90_edge_loss},
         {"q90_mean_ratio", p.q90_mean_ratio},
         {"background_defined", p.background_defined}};
  if (p.background_defined) {
    j["background_loss"] = p.background_loss;
    j["edge_background_ratio"] = p.edge_background_ratio;
    j["background_pairs"] = p.background_pairs;
  }
  return j;
}

json gain_json(const lgw::GainRow& r) {
  return {{"method", r.method},
          {"score", r.score},
          {"rounds", r.rounds},
          {"prefix_edges", r.prefix_edges},
          {"power", r.power},
          {"epochs_method", r.epochs_method},
          {"epochs_baseline", r.epochs_baseline},
          {"training_gain", r.training_gain},
          {"training_gain_sd", r.training_gain_sd},
          {"computation_gain", r.computation_gain}};
}

int run(int argc, char** argv) {
  CLI::App app{"Node embeddings with loss-guided walk selection"};
  app.set_version_flag("--version", lgw::version_string());
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "run the configured method against the baseline");
  ConfigFlags train_cfg;
  train_cfg.attach(*train);
  std::string out_dir = ".";
  std::string epochs_csv, gains_csv, embedding_out, model_out, manifest_out;
  train->add_option("-o,--out-dir", out_dir, "directory for every output not given explicitly");
  train->add_option("--epochs-csv", epochs_csv, "per-epoch CSV path");
  train->add_option("--gains-csv", gains_csv, "gain table CSV path");
  train->add_option("--embedding-out", embedding_out, "focus-vector export path");
  train->add_option("--model-out", model_out, "focus plus context export path");
  train->add_option("--manifest", manifest_out, "manifest JSON path");

  // eval
  auto* eval = app.add_subcommand("eval", "score an exported embedding on the configured task");
  ConfigFlags eval_cfg;
  eval_cfg.attach(*eval);
  std::string eval_embedding;
  eval->add_option("-e,--embedding", eval_embedding, "embedding or model file")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "generate the three-community benchmark graph");
  std::string scale = "desk", synth_edges = "synthetic.edges", synth_labels = "synthetic.labels";
  std::string synth_manifest;
  std::optional<std::size_t> size;
  std::optional<double> intra, cross;
  std::uint64_t synth_seed = 1;
  synth->add_option("--scale", scale, "desk (3 x 600) or full (3 x 10^4)")
      ->check(CLI::IsMember({"desk", "full"}));
  synth->add_option("--size", size, "nodes per community");
  synth->add_option("--intra", intra, "same-community edge probability");
  synth->add_option("--cross", cross, "probability between the two linked communities");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--edges-out", synth_edges, "edge-list output path");
  synth->add_option("--labels-out", synth_labels, "community label output path");
  synth->add_option("--manifest", synth_manifest, "manifest JSON path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid of loss-guided runs, or the node2vec (p, q) grid");
  ConfigFlags sweep_cfg;
  sweep_cfg.attach(*sweep);
  std::string preset = "loss_guided", sweep_dir = ".", sweep_csv, sweep_manifest;
  lgw::SweepGrid grid;
  std::vector<double> n2v_values{0.25, 0.5, 1.0, 2.0};
  sweep->add_option("--preset", preset, "loss_guided or node2vec")
      ->check(CLI::IsMember({"loss_guided", "node2vec"}));
  sweep->add_option("--grid-rounds", grid.rounds, "rounds per epoch values")->delimiter(',');
  sweep->add_option("--grid-powers", grid.powers, "score power values")->delimiter(',');
  sweep->add_option("--grid-prefix-edges", grid.prefix_edges, "prefix length values")
      ->delimiter(',');
  sweep->add_option("--grid-node2vec", n2v_values, "p and q values for the node2vec preset")
      ->delimiter(',');
  sweep->add_option("-o,--out-dir", sweep_dir, "output directory");
  sweep->add_option("--csv", sweep_csv, "sweep CSV path");
  sweep->add_option("--manifest", sweep_manifest, "manifest JSON path");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "loss profile of a model on its graph");
  ConfigFlags diag_cfg;
  diag_cfg.attach(*diagnose);
  std::string diag_model;
  diagnose->add_option("-m,--model", diag_model, "model file with context vectors")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*train) {
    const auto cfg = train_cfg.resolve(*train);
    lgw::validate(cfg);
    const auto data = lgw::load_dataset(cfg);
    const auto report = lgw::run_experiment(cfg, data);
    const auto epochs_path = in_dir(out_dir, epochs_csv, "epochs.csv");
    const auto gains_path = in_dir(out_dir, gains_csv, "gains.csv");
    const auto embedding_path = in_dir(out_dir, embedding_out, "embedding.txt");
    const auto model_path = in_dir(out_dir, model_out, "model.txt");
    const auto manifest_path = in_dir(out_dir, manifest_out, "manifest.json");
    {
      auto out = open_output(epochs_path);
      lgw::write_epoch_csv(out, report);
    }
    {
      auto out = open_output(gains_path);
      lgw::write_gain_csv(out, report.gains);
    }
    {
      auto out = open_output(embedding_path);
      lgw::write_embedding(out, report.final_model, data.ids);
    }
    {
      auto out = open_output(model_path);
      lgw::write_model(out, report.final_model, data.ids);
    }
    json m = manifest_base("train", cfg);
    m["outputs"] = {{"epochs_csv", epochs_path},
                    {"gains_csv", gains_path},
                    {"embedding", embedding_path},
                    {"model", model_path}};
    m["expected_pairs"] = report.expected_pairs;
    json methods = json::array();
    for (const auto& r : report.methods) {
      methods.push_back({{"method", r.name},
                         {"epochs_to_peak", r.peak.mean},
                         {"epochs_to_peak_sd", r.peak.sd},
                         {"walks_trained", r.walks_trained}});
    }
    m["methods"] = methods;
    json gains = json::array();
    for (const auto& g : report.gains) gains.push_back(gain_json(g));
    m["gains"] = gains;
    write_manifest(manifest_path, m);
    for (const auto& r : report.methods) {
      std::cout << r.name << ": epochs to peak " << r.peak.mean << " (sd " << r.peak.sd << ")\n";
    }
    for (const auto& g : report.gains) {
      std::cout << "training gain " << g.training_gain << ", computation gain "
                << g.computation_gain << '\n';
    }
    return 0;
  }

  if (*eval) {
    const auto cfg = eval_cfg.resolve(*eval);
    lgw::validate(cfg);
    const auto data = lgw::load_dataset(cfg);
    const auto model = align_to_graph(read_embedding_file(eval_embedding), data.ids);
    const auto rep_seed = lgw::repetition_seed(cfg, 0);
    const auto split = lgw::repetition_split(cfg, data, rep_seed);
    lgw::Rng rng(lgw::evaluation_seed(rep_seed, 0));
    const double q = lgw::evaluate_quality(cfg, data, model, split, rng);
    std::cout << lgw::to_string(cfg.task) << " quality " << lgw::format_real(q) << '\n';
    return 0;
  }

  if (*synth) {
    auto spec = scale == "full" ? lgw::PlantedPartitionSpec::full_scale()
                                : lgw::PlantedPartitionSpec::desk_scale();
    if (size || intra || cross) {
      spec = lgw::PlantedPartitionSpec::three_communities(size.value_or(spec.sizes.front()),
                                                          intra.value_or(spec.intra),
                                                          cross.value_or(spec.inter[0][1]));
    }
    lgw::validate(spec);
    lgw::Rng rng(synth_seed);
    const auto g = lgw::generate(spec, rng);
    {
      auto out = open_output(synth_edges);
      lgw::write_edge_list(out, g);
    }
    {
      auto out = open_output(synth_labels);
      lgw::write_labels(out, g);
    }
    if (!synth_manifest.empty()) {
      json m{{"command", "synth"},
             {"version", lgw::version_string()},
             {"seed", synth_seed},
             {"sizes", spec.sizes},
             {"intra", spec.intra},
             {"inter", spec.inter},
             {"block_edges", g.block_edges},
             {"outputs", {{"edges", synth_edges}, {"labels", synth_labels}}}};
      write_manifest(synth_manifest, m);
    }
    std::cout << g.graph.node_count() << " nodes, " << g.edges.size() << " edges\n";
    return 0;
  }

  if (*sweep) {
    const auto cfg = sweep_cfg.resolve(*sweep);
    const auto data = lgw::load_dataset(cfg);
    json m = manifest_base("sweep", cfg);
    m["preset"] = preset;
    std::string csv_path;
    if (preset == "node2vec") {
      lgw::validate(cfg);
      const auto rows = lgw::run_node2vec_grid(cfg, data, n2v_values);
      csv_path = in_dir(sweep_dir, sweep_csv, "node2vec.csv");
      auto out = open_output(csv_path);
      lgw::write_node2vec_csv(out, rows);
      m["grid"] = {{"values", n2v_values}};
      std::cout << rows.size() << " (p, q) settings\n";
    } else {
      const auto report = lgw::run_sweep(cfg, data, grid);
      csv_path = in_dir(sweep_dir, sweep_csv, "sweep.csv");
      auto out = open_output(csv_path);
      lgw::write_gain_csv(out, report.rows);
      m["grid"] = {{"rounds", grid.rounds},
                   {"powers", grid.powers},
                   {"prefix_edges", grid.prefix_edges}};
      m["baseline_epochs_to_peak"] = report.baseline.peak.mean;
      std::cout << report.rows.size() << " grid points\n";
    }
    m["outputs"] = {{"csv", csv_path}};
    write_manifest(in_dir(sweep_dir, sweep_manifest, "manifest.json"), m);
    return 0;
  }

  if (*diagnose) {
    const auto cfg = diag_cfg.resolve(*diagnose);
    if (cfg.edges_path.empty()) throw lgw::config_error("no edges file configured");
    auto loaded = lgw::load_edge_list_file(cfg.edges_path, cfg.directed);
    const auto file = read_embedding_file(diag_model);
    if (!file.has_context) {
      throw lgw::data_error("diagnose needs context vectors; pass a model file written by train");
    }
    const auto model = align_to_graph(file, loaded.ids);
    lgw::Rng rng(cfg.seed);
    const auto p = lgw::loss_profile(model, loaded.graph, rng, cfg.background_pairs);
    std::cout << profile_json(p).dump(2) << '\n';
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lgw::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const lgw::data_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const lgw::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
