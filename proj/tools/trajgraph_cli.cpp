// Copyright 2026 The trajgraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trajgraph/checkpoint.hpp"
#include "trajgraph/config.hpp"
#include "trajgraph/experiments.hpp"
#include "trajgraph/play.hpp"
#include "trajgraph/synth.hpp"

namespace fs = std::filesystem;
using namespace trajgraph;

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> radius;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> history;
};

void add_common(CLI::App * cmd, CommonOptions & o, const std::string & out_help)
{
  cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Seed for data generation, initialisation and training");
  cmd->add_option("--out", o.out, out_help);
  cmd->add_option("--radius", o.radius, "Edge radius in meters");
  cmd->add_option("--steps", o.steps, "Training steps");
  cmd->add_option("--horizon", o.horizon, "Prediction horizon S in steps");
  cmd->add_option("--history", o.history, "History length H in steps");
}

RunConfig resolve(const CommonOptions & o)
{
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.seed) {
    c.seed = *o.seed;
    c.propagate_seed();
  }
  if (o.radius) c.data.window.radius = *o.radius;
  if (o.steps) c.train.steps = *o.steps;
  if (o.horizon) c.data.window.horizon = *o.horizon;
  if (o.history) c.data.window.history = *o.history;
  c.validate();
  return c;
}

fs::path out_dir(const CommonOptions & o, const char * fallback)
{
  const fs::path p = o.out.empty() ? fs::path(fallback) : fs::path(o.out);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot write " + path.string());
  out << text;
}

void log_line(const std::string & s) { std::cerr << s << "\n"; }

void write_report(const fs::path & dir, const ExperimentReport & report, const std::vector<std::string> & columns)
{
  write_file(dir / "report.json", report.to_json().dump(2) + "\n");
  write_file(dir / "report.csv", report.to_csv(columns));
  std::cout << report.to_csv(columns);
  if (!report.summary.empty()) std::cout << report.summary.dump(2) << "\n";
}

template <typename T>
std::vector<T> parse_list(const std::string & text)
{
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw ConfigError("cannot parse list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Graph-structured CVAE trajectory prediction"};
  app.require_subcommand(1);

  CommonOptions train_o;
  auto * train_cmd = app.add_subcommand("train", "Train a model and write checkpoint plus metrics logs");
  add_common(train_cmd, train_o, "Output directory (default runs/train)");

  CommonOptions eval_o;
  std::string eval_ckpt;
  auto * eval_cmd = app.add_subcommand("eval", "Validation NLL of a checkpoint");
  add_common(eval_cmd, eval_o, "Unused");
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);

  CommonOptions ablate_o;
  auto * ablate_cmd = app.add_subcommand("ablate", "Latent/mixture ablation over four variants");
  add_common(ablate_cmd, ablate_o, "Output directory (default runs/ablate)");

  CommonOptions sweep_o;
  std::string radii_text = "1,2,3,4,5";
  auto * sweep_cmd = app.add_subcommand("sweep-radius", "One model per edge radius");
  add_common(sweep_cmd, sweep_o, "Output directory (default runs/sweep-radius)");
  sweep_cmd->add_option("--radii", radii_text, "Comma-separated radii in meters");

  CommonOptions agg_o;
  auto * agg_cmd = app.add_subcommand("compare-aggregation", "Edge input and influence reducer variants");
  add_common(agg_cmd, agg_o, "Output directory (default runs/compare-aggregation)");

  CommonOptions prof_o;
  std::string nodes_text = "5,10,20,40,80";
  std::string prof_types;
  ProfileConfig prof;
  auto * prof_cmd = app.add_subcommand("profile", "Forward-pass time and memory against scene size");
  add_common(prof_cmd, prof_o, "Output directory (default runs/profile)");
  prof_cmd->add_option("--nodes", nodes_text, "Comma-separated node counts");
  prof_cmd->add_option("--repeats", prof.repeats, "Timed passes per size");
  prof_cmd->add_option("--warmups", prof.warmups, "Untimed passes per size");
  prof_cmd->add_option("--types", prof_types, "Comma-separated human node types, e.g. Home-PG,Away-PG");
  prof_cmd->add_option("--per-edge-size", prof.per_edge_size, "Scene size for the per-edge encoder comparison (0 skips)");

  CommonOptions sample_o;
  std::string sample_ckpt;
  std::string sample_play;
  std::size_t sample_t = 0;
  std::vector<int> sample_nodes;
  std::size_t sample_count = 100;
  std::vector<std::string> sample_futures{"observed"};
  auto * sample_cmd = app.add_subcommand("sample", "Sampled futures as JSON-lines and an SVG overlay");
  add_common(sample_cmd, sample_o, "Output directory (default runs/sample)");
  sample_cmd->add_option("--checkpoint", sample_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--play", sample_play, "Play id (default: first validation play)");
  sample_cmd->add_option("--t", sample_t, "Prediction timestep (default: first valid)");
  sample_cmd->add_option("--node", sample_nodes, "Node id to sample (repeatable; default all)");
  sample_cmd->add_option("--count", sample_count, "Samples per node");
  sample_cmd->add_option("--agent-future", sample_futures, "observed, stop or reverse; two values give two panels")
    ->expected(1, 2);

  CommonOptions synth_o;
  auto * synth_cmd = app.add_subcommand("synth-gen", "Write a synthetic play file");
  add_common(synth_cmd, synth_o, "Output play file (default plays.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (train_cmd->parsed()) {
      const RunConfig cfg = resolve(train_o);
      const fs::path dir = out_dir(train_o, "runs/train");
      const TrainSummary s = cmd_train(cfg, dir, {dir, log_line});
      std::cout << nlohmann::json{
                     {"checkpoint", s.checkpoint.string()},
                     {"metrics", s.metrics.string()},
                     {"initial_val_nll", s.result.initial_val_nll ? nlohmann::json(*s.result.initial_val_nll) : nlohmann::json(nullptr)},
                     {"final_val_nll", s.result.final_val_nll ? nlohmann::json(*s.result.final_val_nll) : nlohmann::json(nullptr)}}
                     .dump()
                << "\n";
    } else if (eval_cmd->parsed()) {
      const RunConfig cfg = resolve(eval_o);
      std::cout << nlohmann::json{{"val_nll", cmd_eval(cfg, eval_ckpt)}}.dump() << "\n";
    } else if (ablate_cmd->parsed()) {
      const RunConfig cfg = resolve(ablate_o);
      const fs::path dir = out_dir(ablate_o, "runs/ablate");
      const auto report = cmd_ablate(cfg, {dir, log_line});
      write_report(
        dir, report,
        {"variant", "latent_variables", "latent_categories", "gmm_components", "initial_val_nll", "val_nll",
         "parameters", "train_ms", "diverged"});
    } else if (sweep_cmd->parsed()) {
      const RunConfig cfg = resolve(sweep_o);
      const fs::path dir = out_dir(sweep_o, "runs/sweep-radius");
      const auto report = cmd_sweep_radius(cfg, parse_list<double>(radii_text), {dir, log_line});
      write_report(
        dir, report,
        {"radius", "val_nll", "parameters", "mean_edges", "complete_graph_fraction", "forward_ms", "memory_bytes",
         "train_ms", "diverged"});
    } else if (agg_cmd->parsed()) {
      const RunConfig cfg = resolve(agg_o);
      const fs::path dir = out_dir(agg_o, "runs/compare-aggregation");
      const auto report = cmd_compare_aggregation(cfg, {dir, log_line});
      write_report(
        dir, report, {"variant", "edge_input", "influence_reducer", "val_nll", "parameters", "train_ms", "diverged"});
    } else if (prof_cmd->parsed()) {
      const RunConfig cfg = resolve(prof_o);
      prof.node_counts = parse_list<std::size_t>(nodes_text);
      prof.model = cfg.model;
      prof.seed = cfg.seed;
      prof.history = cfg.data.window.history;
      prof.horizon = cfg.data.window.horizon;
      if (prof_types.size()) {
        prof.types.clear();
        for (const auto & n : parse_list<std::string>(prof_types)) prof.types.push_back(NodeType::parse(n));
      }
      const fs::path dir = out_dir(prof_o, "runs/profile");
      const auto report = cmd_profile(prof);
      write_report(dir, report, {"mode", "nodes", "edges", "parameters", "median_ms", "memory_bytes", "tape_records"});
    } else if (sample_cmd->parsed()) {
      const RunConfig cfg = resolve(sample_o);
      const GraphCvae model = GraphCvae::from_checkpoint(load_checkpoint(sample_ckpt));
      const SplitDataset data = prepare_dataset(cfg.data);
      std::vector<TrainingExample> all = data.train;
      all.insert(all.end(), data.val.begin(), data.val.end());
      const TrainingExample * example = nullptr;
      if (sample_play.empty()) {
        if (data.val.empty()) throw ConfigError("sample: no validation examples to default to");
        example = &data.val.front();
      } else {
        const bool t_given = sample_cmd->count("--t") > 0;
        if (t_given) {
          example = &find_example(all, sample_play, sample_t);
        } else {
          for (const auto & ex : all)
            if (ex.play_id == sample_play) {
              example = &ex;
              break;
            }
          if (!example) throw ContractError("sample: unknown play id '" + sample_play + "'");
        }
      }
      SampleRequest req;
      req.nodes.assign(sample_nodes.begin(), sample_nodes.end());
      req.count = sample_count;
      req.seed = cfg.seed;
      req.agent_futures.clear();
      for (const auto & f : sample_futures) req.agent_futures.push_back(parse_agent_future(f));
      const fs::path dir = out_dir(sample_o, "runs/sample");
      const SampleOutput out = cmd_sample(model, *example, req, cfg.data.synth.court);
      write_file(dir / "samples.jsonl", out.jsonl);
      write_file(dir / "samples.svg", out.svg);
      std::cout << nlohmann::json{{"play_id", example->play_id}, {"t", example->t}, {"svg", (dir / "samples.svg").string()}}
                     .dump()
                << "\n";
    } else if (synth_cmd->parsed()) {
      const RunConfig cfg = resolve(synth_o);
      const fs::path path = synth_o.out.empty() ? fs::path("plays.json") : fs::path(synth_o.out);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      write_plays(path, synth_generate(cfg.data.synth));
      std::cout << path.string() << "\n";
    }
  } catch (const ConfigError & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractError & e) {
    std::cerr << "invalid request: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
