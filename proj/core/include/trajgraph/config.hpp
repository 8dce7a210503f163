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

#ifndef TRAJGRAPH__CONFIG_HPP_
#define TRAJGRAPH__CONFIG_HPP_

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trajgraph/cvae.hpp"
#include "trajgraph/dataset.hpp"
#include "trajgraph/model.hpp"
#include "trajgraph/synth.hpp"

namespace trajgraph
{

/// Where examples come from: a play file, or the synthetic generator.
struct DataConfig
{
  std::optional<std::filesystem::path> plays;
  SynthConfig synth;
  /// Trailing share of plays held out for validation (whole plays only).
  double val_fraction{0.2};
  WindowConfig window;
};

struct RunConfig
{
  std::uint64_t seed{1};
  DataConfig data;
  ModelConfig model;
  TrainConfig train;

  /// Copies the top-level seed into the train and synth sections.
  void propagate_seed();
  void validate() const;
};

// nlohmann::json conversions. Reading accepts partial objects (absent keys
// keep their defaults) and rejects unknown keys with ConfigError.
void to_json(nlohmann::json & j, const LatentSpec & v);
void from_json(const nlohmann::json & j, LatentSpec & v);
void to_json(nlohmann::json & j, const FeatureScaling & v);
void from_json(const nlohmann::json & j, FeatureScaling & v);
void to_json(nlohmann::json & j, const ModelConfig & v);
void from_json(const nlohmann::json & j, ModelConfig & v);
void to_json(nlohmann::json & j, const TrainConfig & v);
void from_json(const nlohmann::json & j, TrainConfig & v);
void to_json(nlohmann::json & j, const WindowConfig & v);
void from_json(const nlohmann::json & j, WindowConfig & v);
void to_json(nlohmann::json & j, const SynthConfig & v);
void from_json(const nlohmann::json & j, SynthConfig & v);
void to_json(nlohmann::json & j, const DataConfig & v);
void from_json(const nlohmann::json & j, DataConfig & v);
void to_json(nlohmann::json & j, const RunConfig & v);
void from_json(const nlohmann::json & j, RunConfig & v);

RunConfig parse_run_config(const std::string & text);
RunConfig load_run_config(const std::filesystem::path & path);
std::string dump_run_config(const RunConfig & config);

/// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const RunConfig & config);
std::uint64_t fnv1a(const std::string & bytes);

struct SplitDataset
{
  std::vector<Play> train_plays;
  std::vector<Play> val_plays;
  std::vector<TrainingExample> train;
  std::vector<TrainingExample> val;
  TypeSet types;
  double dt{0.04};
};

/// Loads or generates plays, splits them by play and windows each side.
/// The type set covers both splits.
SplitDataset prepare_dataset(const DataConfig & config, const std::function<void(const std::string &)> & warn = {});

}  // namespace trajgraph

#endif  // TRAJGRAPH__CONFIG_HPP_
