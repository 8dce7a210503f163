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

#include "trajgraph/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace trajgraph
{

using nlohmann::json;

namespace
{

void reject_unknown(const json & j, const char * section, std::initializer_list<const char *> known)
{
  if (!j.is_object()) throw ConfigError(std::string(section) + ": expected a JSON object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto & [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(std::string(section) + ": unknown key '" + k + "'");
  }
}

template <typename T>
void read(const json & j, const char * section, const char * key, T & out)
{
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception & e) {
    throw ConfigError(std::string(section) + "." + key + ": " + e.what());
  }
}

}  // namespace

void to_json(json & j, const LatentSpec & v) { j = {{"variables", v.variables}, {"categories", v.categories}}; }

void from_json(const json & j, LatentSpec & v)
{
  reject_unknown(j, "latent", {"variables", "categories"});
  read(j, "latent", "variables", v.variables);
  read(j, "latent", "categories", v.categories);
}

void to_json(json & j, const FeatureScaling & v)
{
  j = {
    {"center_l", v.center_l},
    {"center_w", v.center_w},
    {"position_scale", v.position_scale},
    {"velocity_scale", v.velocity_scale}};
}

void from_json(const json & j, FeatureScaling & v)
{
  reject_unknown(j, "scaling", {"center_l", "center_w", "position_scale", "velocity_scale"});
  read(j, "scaling", "center_l", v.center_l);
  read(j, "scaling", "center_w", v.center_w);
  read(j, "scaling", "position_scale", v.position_scale);
  read(j, "scaling", "velocity_scale", v.velocity_scale);
}

void to_json(json & j, const ModelConfig & v)
{
  j = {
    {"ee_hidden", v.ee_hidden},
    {"eie_hidden", v.eie_hidden},
    {"nhe_hidden", v.nhe_hidden},
    {"fce_hidden", v.fce_hidden},
    {"nfe_hidden", v.nfe_hidden},
    {"decoder_hidden", v.decoder_hidden},
    {"gmm_components", v.gmm_components},
    {"latent", v.latent},
    {"aggregation", to_string(v.aggregation)},
    {"reducer", to_string(v.reducer)},
    {"scaling", v.scaling},
    {"log_scale_min", v.log_scale_min},
    {"log_scale_max", v.log_scale_max}};
}

void from_json(const json & j, ModelConfig & v)
{
  reject_unknown(
    j, "model",
    {"ee_hidden", "eie_hidden", "nhe_hidden", "fce_hidden", "nfe_hidden", "decoder_hidden", "gmm_components",
     "latent", "aggregation", "reducer", "scaling", "log_scale_min", "log_scale_max"});
  read(j, "model", "ee_hidden", v.ee_hidden);
  read(j, "model", "eie_hidden", v.eie_hidden);
  read(j, "model", "nhe_hidden", v.nhe_hidden);
  read(j, "model", "fce_hidden", v.fce_hidden);
  read(j, "model", "nfe_hidden", v.nfe_hidden);
  read(j, "model", "decoder_hidden", v.decoder_hidden);
  read(j, "model", "gmm_components", v.gmm_components);
  if (j.contains("latent")) v.latent = j.at("latent").get<LatentSpec>();
  if (j.contains("scaling")) v.scaling = j.at("scaling").get<FeatureScaling>();
  std::string s;
  if (j.contains("aggregation")) {
    read(j, "model", "aggregation", s);
    v.aggregation = parse_aggregation(s);
  }
  if (j.contains("reducer")) {
    read(j, "model", "reducer", s);
    v.reducer = parse_reducer(s);
  }
  read(j, "model", "log_scale_min", v.log_scale_min);
  read(j, "model", "log_scale_max", v.log_scale_max);
}

void to_json(json & j, const TrainConfig & v)
{
  j = {
    {"seed", v.seed},
    {"learning_rate", v.learning_rate},
    {"batch_size", v.batch_size},
    {"steps", v.steps},
    {"kl_anneal_steps", v.kl_anneal_steps},
    {"eval_every", v.eval_every},
    {"clip_norm", v.clip_norm},
    {"val_max_examples", v.val_max_examples}};
}

void from_json(const json & j, TrainConfig & v)
{
  reject_unknown(
    j, "train",
    {"seed", "learning_rate", "batch_size", "steps", "kl_anneal_steps", "eval_every", "clip_norm",
     "val_max_examples"});
  read(j, "train", "seed", v.seed);
  read(j, "train", "learning_rate", v.learning_rate);
  read(j, "train", "batch_size", v.batch_size);
  read(j, "train", "steps", v.steps);
  read(j, "train", "kl_anneal_steps", v.kl_anneal_steps);
  read(j, "train", "eval_every", v.eval_every);
  read(j, "train", "clip_norm", v.clip_norm);
  read(j, "train", "val_max_examples", v.val_max_examples);
}

void to_json(json & j, const WindowConfig & v)
{
  j = {{"history", v.history}, {"horizon", v.horizon}, {"radius", v.radius}};
}

void from_json(const json & j, WindowConfig & v)
{
  reject_unknown(j, "window", {"history", "horizon", "radius"});
  read(j, "window", "history", v.history);
  read(j, "window", "horizon", v.horizon);
  read(j, "window", "radius", v.radius);
}

void to_json(json & j, const SynthConfig & v)
{
  json attractors = json::array();
  for (const auto & a : v.attractors) attractors.push_back({a.l, a.w});
  json types = json::array();
  for (const auto & t : v.types) types.push_back(t.name());
  j = {
    {"seed", v.seed},
    {"plays", v.plays},
    {"frames", v.frames},
    {"dt", v.dt},
    {"min_players", v.min_players},
    {"max_players", v.max_players},
    {"modes", v.modes},
    {"attractors", attractors},
    {"switch_prob", v.switch_prob},
    {"noise", v.noise},
    {"speed", v.speed},
    {"arrive_radius", v.arrive_radius},
    {"repulsion_radius", v.repulsion_radius},
    {"repulsion_gain", v.repulsion_gain},
    {"herd_radius", v.herd_radius},
    {"herd_gain", v.herd_gain},
    {"types", types}};
}

void from_json(const json & j, SynthConfig & v)
{
  reject_unknown(
    j, "synth",
    {"seed", "plays", "frames", "dt", "min_players", "max_players", "modes", "attractors", "switch_prob", "noise",
     "speed", "arrive_radius", "repulsion_radius", "repulsion_gain", "herd_radius", "herd_gain", "types"});
  read(j, "synth", "seed", v.seed);
  read(j, "synth", "plays", v.plays);
  read(j, "synth", "frames", v.frames);
  read(j, "synth", "dt", v.dt);
  read(j, "synth", "min_players", v.min_players);
  read(j, "synth", "max_players", v.max_players);
  read(j, "synth", "modes", v.modes);
  read(j, "synth", "switch_prob", v.switch_prob);
  read(j, "synth", "noise", v.noise);
  read(j, "synth", "speed", v.speed);
  read(j, "synth", "arrive_radius", v.arrive_radius);
  read(j, "synth", "repulsion_radius", v.repulsion_radius);
  read(j, "synth", "repulsion_gain", v.repulsion_gain);
  read(j, "synth", "herd_radius", v.herd_radius);
  read(j, "synth", "herd_gain", v.herd_gain);
  if (j.contains("attractors")) {
    std::vector<std::array<double, 2>> pts;
    read(j, "synth", "attractors", pts);
    v.attractors.clear();
    for (const auto & p : pts) v.attractors.push_back({p[0], p[1]});
  }
  if (j.contains("types")) {
    std::vector<std::string> names;
    read(j, "synth", "types", names);
    v.types.clear();
    for (const auto & n : names) v.types.push_back(NodeType::parse(n));
  }
}

void to_json(json & j, const DataConfig & v)
{
  j = {{"val_fraction", v.val_fraction}, {"window", v.window}};
  if (v.plays) {
    j["plays"] = v.plays->string();
  } else {
    j["synth"] = v.synth;
  }
}

void from_json(const json & j, DataConfig & v)
{
  reject_unknown(j, "data", {"plays", "synth", "val_fraction", "window"});
  if (j.contains("plays")) {
    std::string p;
    read(j, "data", "plays", p);
    v.plays = p;
  }
  if (j.contains("synth")) v.synth = j.at("synth").get<SynthConfig>();
  read(j, "data", "val_fraction", v.val_fraction);
  if (j.contains("window")) v.window = j.at("window").get<WindowConfig>();
}

void to_json(json & j, const RunConfig & v)
{
  j = {{"seed", v.seed}, {"data", v.data}, {"model", v.model}, {"train", v.train}};
}

void from_json(const json & j, RunConfig & v)
{
  reject_unknown(j, "config", {"seed", "data", "model", "train"});
  read(j, "config", "seed", v.seed);
  if (j.contains("data")) v.data = j.at("data").get<DataConfig>();
  if (j.contains("model")) v.model = j.at("model").get<ModelConfig>();
  if (j.contains("train")) v.train = j.at("train").get<TrainConfig>();
}

void RunConfig::propagate_seed()
{
  train.seed = seed;
  data.synth.seed = seed;
}

void RunConfig::validate() const
{
  model.validate();
  train.validate();
  if (!(data.val_fraction > 0.0 && data.val_fraction < 1.0)) {
    throw ConfigError("data.val_fraction must lie strictly between 0 and 1");
  }
  if (data.window.history < 1 || data.window.horizon < 1) throw ConfigError("data.window: history and horizon must be >= 1");
  if (!(data.window.radius > 0.0)) throw ConfigError("data.window.radius must be positive");
  if (!data.plays) trajgraph::validate(data.synth);
}

RunConfig parse_run_config(const std::string & text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error & e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig c = j.get<RunConfig>();
  // Sections that were not given a seed of their own follow the top-level one.
  const bool train_seed = j.contains("train") && j["train"].contains("seed");
  const bool synth_seed = j.contains("data") && j["data"].contains("synth") && j["data"]["synth"].contains("seed");
  if (!train_seed) c.train.seed = c.seed;
  if (!synth_seed) c.data.synth.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string dump_run_config(const RunConfig & config) { return json(config).dump(2); }

std::uint64_t fnv1a(const std::string & bytes)
{
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const RunConfig & config)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(json(config).dump())));
  return buf;
}

SplitDataset prepare_dataset(const DataConfig & config, const std::function<void(const std::string &)> & warn)
{
  const PlayFile file = config.plays ? parse_plays(*config.plays) : synth_generate(config.synth);
  if (file.plays.size() < 2) throw ConfigError("data: need at least two plays to hold one out for validation");
  std::size_t n_val = static_cast<std::size_t>(std::ceil(config.val_fraction * static_cast<double>(file.plays.size())));
  n_val = std::clamp<std::size_t>(n_val, 1, file.plays.size() - 1);
  SplitDataset out;
  out.dt = file.dt_ms / 1000.0;
  const std::size_t n_train = file.plays.size() - n_val;
  out.train_plays.assign(file.plays.begin(), file.plays.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.val_plays.assign(file.plays.begin() + static_cast<std::ptrdiff_t>(n_train), file.plays.end());
  out.train = window_dataset(out.train_plays, config.window, warn);
  out.val = window_dataset(out.val_plays, config.window, warn);
  if (out.train.empty()) throw ConfigError("data: no training examples after windowing");
  out.types = TypeSet::from_plays(file.plays);
  return out;
}

}  // namespace trajgraph
