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

#include "trajgraph/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "trajgraph/config.hpp"

namespace trajgraph
{

// ---- enums -----------------------------------------------------------------------

std::string to_string(EdgeAggregation a) { return a == EdgeAggregation::kSum ? "sum" : "mean"; }

std::string to_string(InfluenceReducer r)
{
  switch (r) {
    case InfluenceReducer::kBiLstm: return "bilstm";
    case InfluenceReducer::kSum: return "sum";
    case InfluenceReducer::kMax: return "max";
  }
  return "?";
}

EdgeAggregation parse_aggregation(const std::string & s)
{
  if (s == "sum") return EdgeAggregation::kSum;
  if (s == "mean") return EdgeAggregation::kMean;
  throw ConfigError("unknown edge aggregation '" + s + "' (expected sum or mean)");
}

InfluenceReducer parse_reducer(const std::string & s)
{
  if (s == "bilstm") return InfluenceReducer::kBiLstm;
  if (s == "sum") return InfluenceReducer::kSum;
  if (s == "max") return InfluenceReducer::kMax;
  throw ConfigError("unknown influence reducer '" + s + "' (expected bilstm, sum or max)");
}

// ---- LatentSpec --------------------------------------------------------------------

std::size_t LatentSpec::joint_size() const
{
  std::size_t n = 1;
  for (std::size_t v = 0; v < variables; ++v) {
    n *= categories;
    if (n > kMaxJointAssignments) return n;
  }
  return n;
}

void LatentSpec::validate() const
{
  if (variables < 1 || categories < 1) throw ConfigError("latent: variables and categories must be at least 1");
  if (joint_size() > kMaxJointAssignments) {
    throw ConfigError(
      "latent: " + std::to_string(categories) + "^" + std::to_string(variables) +
      " joint assignments exceed the enumeration bound " + std::to_string(kMaxJointAssignments));
  }
}

std::vector<std::size_t> LatentSpec::assignment(std::size_t joint) const
{
  if (joint >= joint_size()) throw ContractError("latent: joint index " + std::to_string(joint) + " out of range");
  std::vector<std::size_t> out(variables);
  for (std::size_t v = variables; v-- > 0;) {
    out[v] = joint % categories;
    joint /= categories;
  }
  return out;
}

std::size_t LatentSpec::joint_index(std::span<const std::size_t> a) const
{
  if (a.size() != variables) throw ContractError("latent: assignment has wrong arity");
  std::size_t j = 0;
  for (std::size_t v = 0; v < variables; ++v) {
    if (a[v] >= categories) throw ContractError("latent: category index out of range");
    j = j * categories + a[v];
  }
  return j;
}

Tensor LatentSpec::one_hot(std::span<const std::size_t> joint_indices) const
{
  const std::size_t width = variables * categories;
  std::vector<double> data(joint_indices.size() * width, 0.0);
  for (std::size_t r = 0; r < joint_indices.size(); ++r) {
    const auto a = assignment(joint_indices[r]);
    for (std::size_t v = 0; v < variables; ++v) data[r * width + v * categories + a[v]] = 1.0;
  }
  return Tensor::constant({joint_indices.size(), width}, std::move(data));
}

Tensor LatentSpec::enumerate() const
{
  std::vector<std::size_t> all(joint_size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return one_hot(all);
}

// ---- scaling / config --------------------------------------------------------------

Feature FeatureScaling::apply(const Feature & f) const
{
  return {
    (f[0] - center_l) / position_scale, (f[1] - center_w) / position_scale, f[2] / velocity_scale,
    f[3] / velocity_scale};
}

std::size_t ModelConfig::influence_width() const
{
  return reducer == InfluenceReducer::kBiLstm ? 4 * eie_hidden : ee_hidden;
}

std::size_t ModelConfig::context_width() const
{
  return influence_width() + nhe_hidden + future_conditional_width();
}

void ModelConfig::validate() const
{
  latent.validate();
  if (!ee_hidden || !eie_hidden || !nhe_hidden || !fce_hidden || !nfe_hidden || !decoder_hidden) {
    throw ConfigError("model: hidden sizes must be positive");
  }
  if (gmm_components < 1) throw ConfigError("model: gmm_components must be at least 1");
  if (!(log_scale_min < log_scale_max)) throw ConfigError("model: log_scale_min must be below log_scale_max");
  if (!(scaling.position_scale > 0.0 && scaling.velocity_scale > 0.0)) {
    throw ConfigError("model: feature scales must be positive");
  }
}

// ---- TypeSet -----------------------------------------------------------------------

void TypeSet::normalize()
{
  std::erase_if(humans, [](const NodeType & t) { return t.agent; });
  std::sort(humans.begin(), humans.end());
  humans.erase(std::unique(humans.begin(), humans.end()), humans.end());
}

TypeSet TypeSet::from_plays(const std::vector<Play> & plays)
{
  TypeSet s;
  for (const auto & p : plays)
    for (const auto & t : p.players)
      if (t.id != p.agent_id) s.humans.push_back(t.type());
  s.normalize();
  return s;
}

TypeSet TypeSet::from_examples(const std::vector<TrainingExample> & examples)
{
  TypeSet s;
  for (const auto & ex : examples)
    for (const auto & n : ex.nodes)
      if (n.id != ex.agent_id) s.humans.push_back(n.type);
  s.normalize();
  return s;
}

std::vector<EdgeType> TypeSet::edge_types() const
{
  std::set<EdgeType> out;
  for (std::size_t a = 0; a < humans.size(); ++a) {
    for (std::size_t b = a; b < humans.size(); ++b) out.insert(EdgeType(humans[a], humans[b]));
    out.insert(EdgeType(humans[a], NodeType::conditioning_agent()));
  }
  return {out.begin(), out.end()};
}

bool TypeSet::contains(const NodeType & t) const
{
  return std::binary_search(humans.begin(), humans.end(), t);
}

// ---- bundle / factors ----------------------------------------------------------------

Tensor EncodingBundle::context() const { return concat({edge_influence, history, future_conditional}, 1); }

std::vector<double> CategoricalFactors::probabilities(std::size_t variable) const
{
  if (variable >= variables()) throw ContractError("categorical: variable index out of range");
  std::vector<double> out(categories());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::exp(log_probs.at(variable, k));
  return out;
}

Tensor CategoricalFactors::joint_log_prob(const Tensor & one_hot) const
{
  const Tensor flat = reshape(log_probs, {variables() * categories(), 1});
  const Tensor joint = matmul(one_hot, flat);
  return reshape(joint, {one_hot.dim(0)});
}

// ---- GraphCvae -----------------------------------------------------------------------

GraphCvae::GraphCvae(ModelConfig config, TypeSet types, std::uint64_t seed)
: config_(std::move(config)), types_(std::move(types)), seed_(seed), registry_(seed)
{
  config_.validate();
  types_.normalize();
  if (types_.humans.empty()) throw ConfigError("model: type set declares no human node types");
  const std::size_t zw = config_.latent.variables * config_.latent.categories;
  const std::size_t C = config_.context_width();
  for (const auto & e : types_.edge_types()) registry_.add_lstm(ee_key(e), 4, config_.ee_hidden);
  registry_.add_bilstm(fce_key(), 4, config_.fce_hidden);
  for (const auto & t : types_.humans) {
    if (config_.reducer == InfluenceReducer::kBiLstm) {
      registry_.add_bilstm(eie_key(t), config_.ee_hidden, config_.eie_hidden);
    }
    registry_.add_lstm(nhe_key(t), 4, config_.nhe_hidden);
    registry_.add_bilstm(nfe_key(t), 4, config_.nfe_hidden);
    registry_.add_dense(prior_key(t), C, zw);
    registry_.add_dense(posterior_key(t), C + config_.node_future_width(), zw);
    registry_.add_dense(decoder_key(t) + "/init", C + zw, 2 * config_.decoder_hidden);
    registry_.add_lstm(decoder_key(t) + "/cell", 2, config_.decoder_hidden);
    registry_.add_dense(decoder_key(t) + "/head", config_.decoder_hidden, 5 * config_.gmm_components);
  }
}

const NodeType & GraphCvae::require_type(const NodeType & t) const
{
  if (t.agent || !types_.contains(t)) {
    throw ContractError("model: node type '" + t.name() + "' is not in the declared type set");
  }
  return t;
}

Tensor GraphCvae::feature_row(const Feature & f) const
{
  const Feature s = config_.scaling.apply(f);
  return Tensor::row(std::span<const double>(s));
}

Tensor GraphCvae::action_row(const CourtAction & u, std::size_t rows) const
{
  const double v = config_.scaling.velocity_scale;
  std::vector<double> data(rows * 2);
  for (std::size_t r = 0; r < rows; ++r) {
    data[2 * r] = u.dl / v;
    data[2 * r + 1] = u.dw / v;
  }
  return Tensor::constant({rows, 2}, std::move(data));
}

std::map<EdgeType, std::vector<Feature>> GraphCvae::edge_inputs(const TrainingExample & example, NodeId node) const
{
  const std::size_t H = example.node(node).history.size();
  std::map<EdgeType, std::vector<Feature>> out;
  for (const auto & [etype, nbrs] : neighbors_by_edge_type(example.graph, node)) {
    std::vector<Feature> seq(H, Feature{0.0, 0.0, 0.0, 0.0});
    for (NodeId n : nbrs) {
      const auto & hist = example.node(n).history;
      if (hist.size() != H) {
        throw DimensionError(
          "encode_edges: neighbor " + std::to_string(n) + " history length " + std::to_string(hist.size()) +
          " differs from node history length " + std::to_string(H));
      }
      for (std::size_t k = 0; k < H; ++k) {
        const Feature s = config_.scaling.apply(hist[k]);
        for (std::size_t d = 0; d < 4; ++d) seq[k][d] += s[d];
      }
    }
    if (config_.aggregation == EdgeAggregation::kMean) {
      const double inv = 1.0 / static_cast<double>(nbrs.size());
      for (auto & f : seq)
        for (double & v : f) v *= inv;
    }
    out.emplace(etype, std::move(seq));
  }
  return out;
}

std::map<EdgeType, Tensor> GraphCvae::encode_edges(const TrainingExample & example, NodeId node) const
{
  std::map<EdgeType, Tensor> out;
  for (const auto & [etype, seq] : edge_inputs(example, node)) {
    std::vector<Tensor> rows;
    rows.reserve(seq.size());
    for (const auto & f : seq) rows.push_back(Tensor::row(std::span<const double>(f)));
    out.emplace(etype, run_lstm(registry_.lstm(ee_key(etype)), rows).h);
  }
  return out;
}

Tensor GraphCvae::encode_edge_influence(const std::map<EdgeType, Tensor> & edge_encodings, const NodeType & type) const
{
  std::vector<Tensor> seq;
  for (const auto & [k, v] : edge_encodings) seq.push_back(v);
  return encode_edge_influence(seq, type);
}

Tensor GraphCvae::encode_edge_influence(std::span<const Tensor> seq, const NodeType & type) const
{
  if (seq.empty()) return Tensor::zeros({1, config_.influence_width()});
  switch (config_.reducer) {
    case InfluenceReducer::kBiLstm:
      return run_bilstm(registry_.bilstm(eie_key(require_type(type))), seq);
    case InfluenceReducer::kSum:
      return reshape(sum(concat(seq, 0), 0), {1, config_.ee_hidden});
    case InfluenceReducer::kMax:
      return reshape(max(concat(seq, 0), 0), {1, config_.ee_hidden});
  }
  throw ContractError("encode_edge_influence: unknown reducer");
}

Tensor GraphCvae::encode_history(const NodeWindow & node) const
{
  if (node.history.empty()) throw ContractError("encode_history: empty history for node " + std::to_string(node.id));
  std::vector<Tensor> rows;
  rows.reserve(node.history.size());
  for (const auto & f : node.history) rows.push_back(feature_row(f));
  return run_lstm(registry_.lstm(nhe_key(require_type(node.type))), rows).h;
}

Tensor GraphCvae::encode_future_conditional(std::span<const Feature> agent_future, bool adjacent) const
{
  if (!adjacent) return Tensor::zeros({1, config_.future_conditional_width()});
  if (agent_future.empty()) throw ContractError("encode_future_conditional: empty agent future");
  std::vector<Tensor> rows;
  for (const auto & f : agent_future) rows.push_back(feature_row(f));
  return run_bilstm(registry_.bilstm(fce_key()), rows);
}

Tensor GraphCvae::encode_node_future(const NodeWindow & node, Phase phase) const
{
  if (phase != Phase::kTraining) {
    throw ContractError("encode_node_future: the node future encoder is only available during training");
  }
  if (node.future_features.empty()) throw ContractError("encode_node_future: empty future");
  std::vector<Tensor> rows;
  for (const auto & f : node.future_features) rows.push_back(feature_row(f));
  return run_bilstm(registry_.bilstm(nfe_key(require_type(node.type))), rows);
}

EncodingBundle GraphCvae::encode(
  const TrainingExample & example, NodeId node, Phase phase, const std::optional<Tensor> & fce) const
{
  const NodeWindow & w = example.node(node);
  require_type(w.type);
  EncodingBundle b;
  if (per_edge_) {
    std::vector<Tensor> encs;
    for (NodeId n : example.graph.neighbors(node)) {
      std::vector<Tensor> rows;
      for (const auto & f : example.node(n).history) rows.push_back(feature_row(f));
      const std::string key =
        "EEedge/" + std::to_string(std::min(node, n)) + "-" + std::to_string(std::max(node, n));
      encs.push_back(run_lstm(registry_.lstm(key), rows).h);
    }
    b.edge_influence = encode_edge_influence(encs, w.type);
  } else {
    b.edge_influence = encode_edge_influence(encode_edges(example, node), w.type);
  }
  b.history = encode_history(w);
  const bool adjacent = agent_adjacent(example.graph, node, example.agent_id);
  if (adjacent && fce) {
    b.future_conditional = *fce;
  } else {
    b.future_conditional = encode_future_conditional(example.agent_future, adjacent);
  }
  if (phase == Phase::kTraining) b.node_future = encode_node_future(w, phase);
  return b;
}

CategoricalFactors GraphCvae::prior(const EncodingBundle & bundle, const NodeType & type) const
{
  const auto & L = config_.latent;
  const Tensor logits = registry_.dense(prior_key(require_type(type))).apply(bundle.context());
  return {log_softmax(reshape(logits, {L.variables, L.categories}), 1)};
}

CategoricalFactors GraphCvae::posterior(const EncodingBundle & bundle, const NodeType & type) const
{
  if (!bundle.node_future) throw ContractError("posterior: bundle carries no node-future encoding");
  const auto & L = config_.latent;
  const Tensor input = concat({bundle.context(), *bundle.node_future}, 1);
  const Tensor logits = registry_.dense(posterior_key(require_type(type))).apply(input);
  return {log_softmax(reshape(logits, {L.variables, L.categories}), 1)};
}

LstmState GraphCvae::decoder_initial_state(
  const EncodingBundle & bundle, const Tensor & z_one_hot, const NodeType & type) const
{
  const std::size_t zw = config_.latent.variables * config_.latent.categories;
  if (z_one_hot.rank() != 2 || z_one_hot.dim(1) != zw) {
    throw ContractError("decoder: latent block " + shape_to_string(z_one_hot.shape()) + " has wrong width");
  }
  const std::size_t rows = z_one_hot.dim(0);
  const Tensor input = concat({repeat_rows(bundle.context(), rows), z_one_hot}, 1);
  const Tensor proj = registry_.dense(decoder_key(require_type(type)) + "/init").apply(input);
  const std::size_t Hd = config_.decoder_hidden;
  return {tanh(slice(proj, 1, 0, Hd)), slice(proj, 1, Hd, 2 * Hd)};
}

GmmHead GraphCvae::head(const Tensor & hidden, const NodeType & type) const
{
  const std::size_t G = config_.gmm_components;
  const std::size_t rows = hidden.dim(0);
  const Tensor out = registry_.dense(decoder_key(type) + "/head").apply(hidden);
  GmmHead h;
  h.log_weights = log_softmax(slice(out, 1, 0, G), 1);
  h.means = reshape(scale(slice(out, 1, G, 3 * G), config_.scaling.velocity_scale), {rows, G, 2});
  h.log_scales = reshape(clamp(slice(out, 1, 3 * G, 5 * G), config_.log_scale_min, config_.log_scale_max), {rows, G, 2});
  return h;
}

std::vector<GmmHead> GraphCvae::decode_teacher_forced(
  const EncodingBundle & bundle, const Tensor & z_one_hot, const CourtAction & last_action,
  std::span<const CourtAction> future, const NodeType & type) const
{
  const std::size_t rows = z_one_hot.dim(0);
  LstmState s = decoder_initial_state(bundle, z_one_hot, type);
  const FusedLstm cell(registry_.lstm(decoder_key(type) + "/cell"));
  std::vector<GmmHead> out;
  out.reserve(future.size());
  CourtAction prev = last_action;
  for (const auto & u : future) {
    s = cell.step(action_row(prev, rows), s);
    out.push_back(head(s.h, type));
    prev = u;
  }
  return out;
}

std::vector<std::vector<CourtAction>> GraphCvae::decode_sample(
  const EncodingBundle & bundle, const Tensor & z_one_hot, const CourtAction & last_action, std::size_t horizon,
  const NodeType & type, std::mt19937_64 & rng) const
{
  const std::size_t rows = z_one_hot.dim(0);
  std::vector<std::vector<CourtAction>> out(rows);
  if (rows == 0) return out;
  LstmState s = decoder_initial_state(bundle, z_one_hot, type);
  const FusedLstm cell(registry_.lstm(decoder_key(type) + "/cell"));
  Tensor input = action_row(last_action, rows);
  const double v = config_.scaling.velocity_scale;
  for (std::size_t k = 0; k < horizon; ++k) {
    s = cell.step(input, s);
    const GmmHead h = head(s.h, type);
    std::vector<double> next(rows * 2);
    for (std::size_t r = 0; r < rows; ++r) {
      const CourtAction u = gmm_sample(h.row(r), rng);
      out[r].push_back(u);
      next[2 * r] = u.dl / v;
      next[2 * r + 1] = u.dw / v;
    }
    input = Tensor::constant({rows, 2}, std::move(next));
  }
  return out;
}

GMMParams GraphCvae::decode_gmm(
  const EncodingBundle & bundle, std::size_t joint_z, const CourtAction & last_action, std::size_t horizon,
  const NodeType & type, std::optional<std::span<const CourtAction>> teacher, std::mt19937_64 * rng) const
{
  if (joint_z >= config_.latent.joint_size()) {
    throw ContractError("decode_gmm: latent index " + std::to_string(joint_z) + " out of range");
  }
  if (teacher && teacher->size() < horizon) throw ContractError("decode_gmm: teacher sequence shorter than horizon");
  if (!teacher && rng == nullptr) throw ContractError("decode_gmm: sampling feedback needs an rng");
  const std::size_t idx[1] = {joint_z};
  const Tensor z = config_.latent.one_hot(idx);
  LstmState s = decoder_initial_state(bundle, z, type);
  const FusedLstm cell(registry_.lstm(decoder_key(type) + "/cell"));
  GMMParams out;
  CourtAction prev = last_action;
  for (std::size_t k = 0; k < horizon; ++k) {
    s = cell.step(action_row(prev, 1), s);
    const GmmStep step = head(s.h, type).row(0);
    prev = teacher ? (*teacher)[k] : gmm_sample(step, *rng);
    out.push_back(step);
  }
  return out;
}

void GraphCvae::enable_per_edge_encoders(const std::vector<TrainingExample> & scenes)
{
  for (const auto & ex : scenes) {
    for (const auto & [a, b] : ex.graph.edges()) {
      const std::string key = "EEedge/" + std::to_string(a) + "-" + std::to_string(b);
      if (!registry_.has_key(key)) registry_.add_lstm(key, 4, config_.ee_hidden);
    }
  }
  per_edge_ = true;
}

std::string GraphCvae::metadata_json() const
{
  nlohmann::json meta;
  meta["model"] = config_;
  std::vector<std::string> names;
  for (const auto & t : types_.humans) names.push_back(t.name());
  meta["types"] = names;
  meta["seed"] = seed_;
  return meta.dump();
}

Checkpoint GraphCvae::to_checkpoint() const
{
  Checkpoint ckpt;
  ckpt.metadata = metadata_json();
  registry_.export_to(ckpt);
  return ckpt;
}

GraphCvae GraphCvae::from_checkpoint(const Checkpoint & ckpt)
{
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ckpt.metadata);
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(std::string("checkpoint: unreadable metadata (") + e.what() + ")");
  }
  if (!meta.contains("model") || !meta.contains("types")) throw ConfigError("checkpoint: metadata lacks model/types");
  TypeSet types;
  for (const auto & n : meta["types"]) types.humans.push_back(NodeType::parse(n.get<std::string>()));
  GraphCvae model(meta["model"].get<ModelConfig>(), types, meta.value("seed", std::uint64_t{0}));
  model.registry_.import_from(ckpt);
  return model;
}

}  // namespace trajgraph
