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

#ifndef TRAJGRAPH__EXPERIMENTS_HPP_
#define TRAJGRAPH__EXPERIMENTS_HPP_

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trajgraph/config.hpp"
#include "trajgraph/cvae.hpp"
#include "trajgraph/model.hpp"
#include "trajgraph/svg.hpp"

namespace trajgraph
{

struct ExperimentReport
{
  std::string experiment;
  std::string config_hash;
  std::uint64_t seed{0};
  nlohmann::json environment = nlohmann::json::object();
  /// One object per variant.
  nlohmann::json rows = nlohmann::json::array();
  /// Experiment-level summary values.
  nlohmann::json summary = nlohmann::json::object();

  nlohmann::json to_json() const;
  /// Header plus one line per row, in the given column order.
  std::string to_csv(const std::vector<std::string> & columns) const;
};

/// Compiler, build and library facts that do not vary between runs on one build.
nlohmann::json environment_info();

/// Output sink shared by the experiment commands.
struct ExperimentIo
{
  /// When set, per-variant metrics logs are written here.
  std::optional<std::filesystem::path> out_dir;
  std::function<void(const std::string &)> log;
};

/// {"step", "beta", "train_elbo", "val_nll"}; no timing, so equal runs give
/// equal lines.
std::string metrics_line(const MetricsRecord & record);
/// {"step", "wall_ms"}.
std::string timing_line(const MetricsRecord & record);

struct VariantOutcome
{
  std::string name;
  TrainResult result;
  std::size_t parameters{0};
  double train_ms{0.0};
  bool diverged{false};
  std::string error;
};

/// Trains one model on `data` under `config`. Divergence is reported in the
/// outcome instead of thrown. When `model_out` is given the trained model is
/// stored there.
VariantOutcome run_variant(
  const SplitDataset & data, const RunConfig & config, const std::string & name, const ExperimentIo & io,
  std::optional<GraphCvae> * model_out = nullptr);

struct TrainSummary
{
  TrainResult result;
  std::filesystem::path checkpoint;
  std::filesystem::path metrics;
  std::filesystem::path timing;
};

/// Trains under `config` and writes config.json, checkpoint.tgck,
/// metrics.jsonl and timing.jsonl into `out_dir`.
TrainSummary cmd_train(const RunConfig & config, const std::filesystem::path & out_dir, const ExperimentIo & io = {});

/// Validation NLL of a checkpoint on the dataset described by `config`.
double cmd_eval(const RunConfig & config, const std::filesystem::path & checkpoint);

/// Latent/mixture settings of the four Table-style variants, in report order:
/// (1,1,1), (2,5,1), (1,1,16), (2,5,16) as (variables, categories, components).
std::vector<std::array<std::size_t, 3>> ablation_variants();

/// When `models` is given it receives the trained variants in report order.
ExperimentReport cmd_ablate(
  const RunConfig & base, const ExperimentIo & io = {}, std::vector<GraphCvae> * models = nullptr);
ExperimentReport cmd_sweep_radius(const RunConfig & base, const std::vector<double> & radii, const ExperimentIo & io = {});
/// EE input sum vs mean (bi-LSTM EIE) and EIE sum / max / bi-LSTM (sum input).
ExperimentReport cmd_compare_aggregation(const RunConfig & base, const ExperimentIo & io = {});

struct ProfileConfig
{
  std::vector<std::size_t> node_counts{5, 10, 20, 40, 80};
  std::size_t repeats{30};
  std::size_t warmups{3};
  /// Nodes sit on a ring this far apart; with radius 2.2 * spacing every
  /// node has four neighbours once the ring has eight or more nodes.
  double spacing{1.0};
  double radius{2.2};
  std::vector<NodeType> types{
    NodeType::human(Team::kHome, Role::kPG), NodeType::human(Team::kAway, Role::kPG)};
  std::size_t history{8};
  std::size_t horizon{15};
  ModelConfig model;
  std::uint64_t seed{1};
  /// Scene size for the one-EE-per-edge comparison; 0 skips it.
  std::size_t per_edge_size{10};
};

/// Ring scene of `nodes` nodes (node 0 is the agent) with smooth histories.
TrainingExample make_profile_scene(std::size_t nodes, const ProfileConfig & config);

struct ForwardProfile
{
  double median_ms{0.0};
  /// Parameter bytes plus the peak of live tensor bytes allocated by one pass.
  std::size_t memory_bytes{0};
  std::size_t tape_records{0};
};

/// Times one full training-mode forward pass (ELBO over every node, recorded
/// on a tape) after warmups.
ForwardProfile profile_forward(const GraphCvae & model, const TrainingExample & example, std::size_t repeats, std::size_t warmups);

/// Rows: nodes, edges, parameters, median_ms, memory_bytes, mode. Summary
/// holds the linear fit of time against node count.
ExperimentReport cmd_profile(const ProfileConfig & config);

enum class AgentFutureKind { kObserved, kStop, kReverse };
std::string to_string(AgentFutureKind k);
AgentFutureKind parse_agent_future(const std::string & s);
/// The example with its agent future replaced: observed as recorded, stop
/// (zero actions) or reverse (negated actions), integrated from x^(t+1).
TrainingExample with_agent_future_kind(const TrainingExample & example, AgentFutureKind kind);

struct SampleRequest
{
  std::vector<NodeId> nodes;
  std::size_t count{100};
  std::uint64_t seed{1};
  /// One panel per entry; two give the side-by-side comparison.
  std::vector<AgentFutureKind> agent_futures{AgentFutureKind::kObserved};
};

struct SampleOutput
{
  std::vector<SvgPanel> panels;
  /// One JSON object per sampled trajectory.
  std::string jsonl;
  std::string svg;
};

SampleOutput cmd_sample(
  const GraphCvae & model, const TrainingExample & example, const SampleRequest & request, const CourtSpec & court = {});

/// Example at timestep `t` of play `play_id`; ContractError when absent.
const TrainingExample & find_example(const std::vector<TrainingExample> & examples, const std::string & play_id, std::size_t t);

}  // namespace trajgraph

#endif  // TRAJGRAPH__EXPERIMENTS_HPP_
