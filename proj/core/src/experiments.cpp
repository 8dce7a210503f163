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

#include "trajgraph/experiments.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "trajgraph/checkpoint.hpp"
#include "trajgraph/stats.hpp"

#ifndef TRAJGRAPH_VERSION
#define TRAJGRAPH_VERSION "unknown"
#endif

namespace trajgraph
{

using nlohmann::json;

namespace
{

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void say(const ExperimentIo & io, const std::string & msg)
{
  if (io.log) io.log(msg);
}

void write_text(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot write " + path.string());
  out << text;
  if (!out) throw RunError("write failed for " + path.string());
}

json nullable(const std::optional<double> & v) { return v ? json(*v) : json(nullptr); }

std::string csv_cell(const json & v)
{
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

json outcome_row(const VariantOutcome & o)
{
  return {
    {"variant", o.name},
    {"initial_val_nll", nullable(o.result.initial_val_nll)},
    {"val_nll", nullable(o.result.final_val_nll)},
    {"parameters", o.parameters},
    {"train_ms", o.train_ms},
    {"diverged", o.diverged},
    {"error", o.error}};
}

ExperimentReport make_report(const std::string & name, const RunConfig & config)
{
  ExperimentReport r;
  r.experiment = name;
  r.config_hash = config_hash(config);
  r.seed = config.seed;
  r.environment = environment_info();
  return r;
}

double mean_edges(const std::vector<TrainingExample> & examples)
{
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto & ex : examples) total += static_cast<double>(ex.graph.edges().size());
  return total / static_cast<double>(examples.size());
}

double complete_fraction(const std::vector<TrainingExample> & examples)
{
  if (examples.empty()) return 0.0;
  std::size_t complete = 0;
  for (const auto & ex : examples) {
    const std::size_t n = ex.nodes.size();
    if (ex.graph.edges().size() == n * (n - 1) / 2) ++complete;
  }
  return static_cast<double>(complete) / static_cast<double>(examples.size());
}

}  // namespace

json ExperimentReport::to_json() const
{
  return {
    {"experiment", experiment},
    {"config_hash", config_hash},
    {"seed", seed},
    {"environment", environment},
    {"rows", rows},
    {"summary", summary}};
}

std::string ExperimentReport::to_csv(const std::vector<std::string> & columns) const
{
  std::ostringstream o;
  for (std::size_t c = 0; c < columns.size(); ++c) o << (c ? "," : "") << columns[c];
  o << "\n";
  for (const auto & row : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      o << (c ? "," : "") << (row.contains(columns[c]) ? csv_cell(row[columns[c]]) : "");
    }
    o << "\n";
  }
  return o.str();
}

json environment_info()
{
  return {
    {"trajgraph", TRAJGRAPH_VERSION},
#if defined(__clang__)
    {"compiler", std::string("clang ") + __clang_version__},
#elif defined(__GNUC__)
    {"compiler", std::string("gcc ") + __VERSION__},
#else
    {"compiler", "unknown"},
#endif
    {"cplusplus", static_cast<long>(__cplusplus)},
#ifdef NDEBUG
    {"assertions", false},
#else
    {"assertions", true},
#endif
    {"eigen",
     std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
       std::to_string(EIGEN_MINOR_VERSION)},
    {"nlohmann_json",
     std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
       std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

std::string metrics_line(const MetricsRecord & r)
{
  return json{{"step", r.step}, {"beta", r.beta}, {"train_elbo", nullable(r.train_elbo)}, {"val_nll", nullable(r.val_nll)}}
    .dump();
}

std::string timing_line(const MetricsRecord & r) { return json{{"step", r.step}, {"wall_ms", r.wall_ms}}.dump(); }

VariantOutcome run_variant(
  const SplitDataset & data, const RunConfig & config, const std::string & name, const ExperimentIo & io,
  std::optional<GraphCvae> * model_out)
{
  VariantOutcome out;
  out.name = name;
  GraphCvae model(config.model, data.types, config.seed);
  out.parameters = model.registry().parameter_count();

  std::ofstream metrics;
  std::ofstream timing;
  if (io.out_dir) {
    std::filesystem::create_directories(*io.out_dir);
    metrics.open(*io.out_dir / (name + ".metrics.jsonl"), std::ios::binary);
    timing.open(*io.out_dir / (name + ".timing.jsonl"), std::ios::binary);
  }
  say(io, "[" + name + "] training " + std::to_string(config.train.steps) + " steps on " +
            std::to_string(data.train.size()) + " examples");
  const auto start = Clock::now();
  try {
    out.result = train(model, data.train, data.val, config.train, [&](const MetricsRecord & r) {
      if (metrics.is_open()) metrics << metrics_line(r) << "\n";
      if (timing.is_open()) timing << timing_line(r) << "\n";
    });
  } catch (const RunError & e) {
    out.diverged = true;
    out.error = e.what();
  }
  out.train_ms = ms_since(start);
  std::ostringstream msg;
  msg << "[" << name << "] ";
  if (out.diverged) {
    msg << "diverged: " << out.error;
  } else if (out.result.final_val_nll) {
    msg << "val NLL " << *out.result.initial_val_nll << " -> " << *out.result.final_val_nll;
  }
  msg << " (" << static_cast<long>(out.train_ms) << " ms)";
  say(io, msg.str());
  if (model_out) model_out->emplace(std::move(model));
  return out;
}

TrainSummary cmd_train(const RunConfig & config, const std::filesystem::path & out_dir, const ExperimentIo & io)
{
  config.validate();
  const SplitDataset data = prepare_dataset(config.data, io.log);
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "config.json", dump_run_config(config) + "\n");

  GraphCvae model(config.model, data.types, config.seed);
  TrainSummary s;
  s.checkpoint = out_dir / "checkpoint.tgck";
  s.metrics = out_dir / "metrics.jsonl";
  s.timing = out_dir / "timing.jsonl";
  std::ofstream metrics(s.metrics, std::ios::binary);
  std::ofstream timing(s.timing, std::ios::binary);
  if (!metrics || !timing) throw RunError("cannot write logs in " + out_dir.string());
  say(io, "training " + std::to_string(config.train.steps) + " steps on " + std::to_string(data.train.size()) +
            " examples (" + std::to_string(data.val.size()) + " validation)");
  s.result = train(model, data.train, data.val, config.train, [&](const MetricsRecord & r) {
    metrics << metrics_line(r) << "\n";
    timing << timing_line(r) << "\n";
    metrics.flush();
    if (r.val_nll) {
      std::ostringstream m;
      m << "step " << r.step << " val NLL " << *r.val_nll;
      say(io, m.str());
    }
  });
  save_checkpoint(s.checkpoint, model.to_checkpoint());
  return s;
}

double cmd_eval(const RunConfig & config, const std::filesystem::path & checkpoint)
{
  const GraphCvae model = GraphCvae::from_checkpoint(load_checkpoint(checkpoint));
  const SplitDataset data = prepare_dataset(config.data);
  const auto val = strided_subset(data.val, config.train.val_max_examples);
  if (val.empty()) throw ConfigError("eval: no validation examples");
  return eval_nll(model, val);
}

std::vector<std::array<std::size_t, 3>> ablation_variants()
{
  return {{1, 1, 1}, {2, 5, 1}, {1, 1, 16}, {2, 5, 16}};
}

ExperimentReport cmd_ablate(const RunConfig & base, const ExperimentIo & io, std::vector<GraphCvae> * models)
{
  base.validate();
  ExperimentReport report = make_report("ablate", base);
  const SplitDataset data = prepare_dataset(base.data, io.log);
  std::optional<double> worst;
  std::string worst_name;
  for (const auto & [nk, kz, ng] : ablation_variants()) {
    RunConfig cfg = base;
    cfg.model.latent = {nk, kz};
    cfg.model.gmm_components = ng;
    const std::string name =
      "nk" + std::to_string(nk) + "-kz" + std::to_string(kz) + "-gmm" + std::to_string(ng);
    std::optional<GraphCvae> model;
    const VariantOutcome o = run_variant(data, cfg, name, io, &model);
    if (models && model) models->push_back(std::move(*model));
    json row = outcome_row(o);
    row["latent_variables"] = nk;
    row["latent_categories"] = kz;
    row["gmm_components"] = ng;
    if (o.result.final_val_nll && (!worst || *o.result.final_val_nll > *worst)) {
      worst = o.result.final_val_nll;
      worst_name = name;
    }
    report.rows.push_back(row);
  }
  report.summary["worst_variant"] = worst_name;
  const auto & first = report.rows.front()["val_nll"];
  const auto & last = report.rows.back()["val_nll"];
  if (!first.is_null() && !last.is_null()) {
    report.summary["full_minus_unimodal"] = last.get<double>() - first.get<double>();
  }
  report.summary["train_examples"] = data.train.size();
  report.summary["val_examples"] = data.val.size();
  return report;
}

ExperimentReport cmd_sweep_radius(const RunConfig & base, const std::vector<double> & radii, const ExperimentIo & io)
{
  base.validate();
  if (radii.empty()) throw ConfigError("sweep-radius: no radii given");
  for (double r : radii)
    if (!(r > 0.0)) throw ConfigError("sweep-radius: radii must be positive");
  ExperimentReport report = make_report("sweep-radius", base);
  SplitDataset data = prepare_dataset(base.data, io.log);
  for (double r : radii) {
    RunConfig cfg = base;
    cfg.data.window.radius = r;
    data.train = window_dataset(data.train_plays, cfg.data.window);
    data.val = window_dataset(data.val_plays, cfg.data.window);
    std::ostringstream name;
    name << "radius-" << r;
    std::optional<GraphCvae> model;
    const VariantOutcome o = run_variant(data, cfg, name.str(), io, &model);
    json row = outcome_row(o);
    row["radius"] = r;
    row["mean_edges"] = mean_edges(data.val);
    row["complete_graph_fraction"] = complete_fraction(data.val);
    if (!data.val.empty()) {
      const ForwardProfile fp = profile_forward(*model, data.val.front(), 5, 1);
      row["forward_ms"] = fp.median_ms;
      row["memory_bytes"] = fp.memory_bytes;
    }
    report.rows.push_back(row);
  }
  return report;
}

ExperimentReport cmd_compare_aggregation(const RunConfig & base, const ExperimentIo & io)
{
  base.validate();
  ExperimentReport report = make_report("compare-aggregation", base);
  const SplitDataset data = prepare_dataset(base.data, io.log);
  struct Variant
  {
    EdgeAggregation aggregation;
    InfluenceReducer reducer;
  };
  const Variant variants[] = {
    {EdgeAggregation::kSum, InfluenceReducer::kBiLstm},
    {EdgeAggregation::kMean, InfluenceReducer::kBiLstm},
    {EdgeAggregation::kSum, InfluenceReducer::kSum},
    {EdgeAggregation::kSum, InfluenceReducer::kMax},
  };
  for (const auto & v : variants) {
    RunConfig cfg = base;
    cfg.model.aggregation = v.aggregation;
    cfg.model.reducer = v.reducer;
    const std::string name = "ee-" + to_string(v.aggregation) + "-eie-" + to_string(v.reducer);
    const VariantOutcome o = run_variant(data, cfg, name, io);
    json row = outcome_row(o);
    row["edge_input"] = to_string(v.aggregation);
    row["influence_reducer"] = to_string(v.reducer);
    report.rows.push_back(row);
  }
  const auto & sum_nll = report.rows[0]["val_nll"];
  const auto & mean_nll = report.rows[1]["val_nll"];
  if (!sum_nll.is_null() && !mean_nll.is_null()) {
    report.summary["sum_minus_mean"] = sum_nll.get<double>() - mean_nll.get<double>();
  }
  return report;
}

TrainingExample make_profile_scene(std::size_t nodes, const ProfileConfig & config)
{
  if (nodes < 1) throw ConfigError("profile: node count must be at least 1");
  if (config.types.empty()) throw ConfigError("profile: empty type list");
  const double dt = 0.04;
  const double ring = static_cast<double>(nodes) * config.spacing / (2.0 * std::numbers::pi);
  const CourtState centre{14.325, 7.62};
  const std::size_t H = config.history;
  const std::size_t S = config.horizon;

  TrainingExample ex;
  ex.play_id = "profile-" + std::to_string(nodes);
  ex.t = H - 1;
  ex.dt = dt;
  ex.agent_id = 0;
  std::map<NodeId, CourtState> states;
  std::map<NodeId, NodeType> types;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(nodes);
    const CourtState p{centre.l + ring * std::cos(theta), centre.w + ring * std::sin(theta)};
    const double speed = 1.0 + 0.1 * static_cast<double>(i % 3);
    const CourtAction v{-speed * std::sin(theta), speed * std::cos(theta)};
    NodeWindow w;
    w.id = static_cast<NodeId>(i);
    w.type = i == 0 ? NodeType::conditioning_agent() : config.types[(i - 1) % config.types.size()];
    for (std::size_t k = 0; k < H; ++k) {
      const double back = static_cast<double>(H - 1 - k) * dt;
      w.history.push_back(make_feature({p.l - back * v.dl, p.w - back * v.dw}, v));
    }
    for (std::size_t k = 1; k <= S; ++k) {
      const double fwd = static_cast<double>(k) * dt;
      w.future.push_back(v);
      w.future_features.push_back(make_feature({p.l + fwd * v.dl, p.w + fwd * v.dw}, v));
    }
    w.current = p;
    w.last_action = v;
    states.emplace(w.id, p);
    types.emplace(w.id, w.type);
    if (i == 0) ex.agent_future = w.future_features;
    ex.nodes.push_back(std::move(w));
  }
  ex.graph = build_graph(states, types, config.radius);
  return ex;
}

ForwardProfile profile_forward(
  const GraphCvae & model, const TrainingExample & example, std::size_t repeats, std::size_t warmups)
{
  if (repeats == 0) throw ConfigError("profile: repeats must be positive");
  std::size_t param_bytes = 0;
  for (const auto & [name, t] : model.registry().named_parameters()) param_bytes += t.size() * sizeof(double);
  ForwardProfile out;
  std::vector<double> times;
  for (std::size_t r = 0; r < warmups + repeats; ++r) {
    const std::size_t live_before = memory::live_bytes();
    memory::reset_peak();
    const auto start = Clock::now();
    {
      Tape tape;
      TapeScope scope(tape);
      const Tensor e = elbo(model, example, 1.0);
      out.tape_records = tape.size();
    }
    const double ms = ms_since(start);
    const std::size_t used = memory::peak_bytes() - live_before;
    out.memory_bytes = std::max(out.memory_bytes, param_bytes + used);
    if (r >= warmups) times.push_back(ms);
  }
  out.median_ms = median(times);
  return out;
}

ExperimentReport cmd_profile(const ProfileConfig & config)
{
  if (config.node_counts.empty()) throw ConfigError("profile: no node counts given");
  ExperimentReport report;
  report.experiment = "profile";
  report.seed = config.seed;
  report.environment = environment_info();
  {
    json cfg = {
      {"node_counts", config.node_counts}, {"repeats", config.repeats}, {"warmups", config.warmups},
      {"spacing", config.spacing},         {"radius", config.radius},   {"history", config.history},
      {"horizon", config.horizon},         {"model", config.model},     {"seed", config.seed},
      {"per_edge_size", config.per_edge_size}};
    std::vector<std::string> names;
    for (const auto & t : config.types) names.push_back(t.name());
    cfg["types"] = names;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(cfg.dump())));
    report.config_hash = buf;
  }

  TypeSet types{config.types};
  const GraphCvae model(config.model, types, config.seed);
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<std::size_t> memory;
  std::vector<std::size_t> params;
  for (std::size_t n : config.node_counts) {
    const TrainingExample scene = make_profile_scene(n, config);
    const ForwardProfile fp = profile_forward(model, scene, config.repeats, config.warmups);
    report.rows.push_back(
      {{"nodes", n},
       {"edges", scene.graph.edges().size()},
       {"parameters", model.registry().parameter_count()},
       {"median_ms", fp.median_ms},
       {"memory_bytes", fp.memory_bytes},
       {"tape_records", fp.tape_records},
       {"mode", "shared"}});
    xs.push_back(static_cast<double>(n));
    ys.push_back(fp.median_ms);
    memory.push_back(fp.memory_bytes);
    params.push_back(model.registry().parameter_count());
  }
  if (xs.size() >= 2) {
    const LinearFit fit = linear_fit(xs, ys);
    report.summary["time_fit"] = {{"slope_ms_per_node", fit.slope}, {"intercept_ms", fit.intercept}, {"r_squared", fit.r_squared}};
  }
  report.summary["memory_monotone"] = std::is_sorted(memory.begin(), memory.end());
  report.summary["parameters_constant"] = std::adjacent_find(params.begin(), params.end(), std::not_equal_to<>()) == params.end();

  if (config.per_edge_size > 0) {
    const TrainingExample scene = make_profile_scene(config.per_edge_size, config);
    const ForwardProfile shared = profile_forward(model, scene, config.repeats, config.warmups);
    GraphCvae per_edge(config.model, types, config.seed);
    per_edge.enable_per_edge_encoders({scene});
    const ForwardProfile pe = profile_forward(per_edge, scene, config.repeats, config.warmups);
    report.rows.push_back(
      {{"nodes", config.per_edge_size},
       {"edges", scene.graph.edges().size()},
       {"parameters", per_edge.registry().parameter_count()},
       {"median_ms", pe.median_ms},
       {"memory_bytes", pe.memory_bytes},
       {"tape_records", pe.tape_records},
       {"mode", "per-edge"}});
    report.summary["per_edge"] = {
      {"nodes", config.per_edge_size},
      {"shared_ms", shared.median_ms},
      {"per_edge_ms", pe.median_ms},
      {"shared_bytes", shared.memory_bytes},
      {"per_edge_bytes", pe.memory_bytes},
      {"shared_tape_records", shared.tape_records},
      {"per_edge_tape_records", pe.tape_records},
      {"slowdown", pe.median_ms / shared.median_ms}};
  }
  return report;
}

std::string to_string(AgentFutureKind k)
{
  switch (k) {
    case AgentFutureKind::kObserved: return "observed";
    case AgentFutureKind::kStop: return "stop";
    case AgentFutureKind::kReverse: return "reverse";
  }
  return "?";
}

AgentFutureKind parse_agent_future(const std::string & s)
{
  if (s == "observed") return AgentFutureKind::kObserved;
  if (s == "stop") return AgentFutureKind::kStop;
  if (s == "reverse") return AgentFutureKind::kReverse;
  throw ConfigError("unknown agent future '" + s + "' (expected observed, stop or reverse)");
}

TrainingExample with_agent_future_kind(const TrainingExample & example, AgentFutureKind kind)
{
  if (kind == AgentFutureKind::kObserved) return example;
  if (example.agent_future.empty()) throw ContractError("agent future: example has no agent future");
  CourtState x{example.agent_future.front()[0], example.agent_future.front()[1]};
  std::vector<Feature> future;
  for (const auto & f : example.agent_future) {
    const CourtAction u = kind == AgentFutureKind::kStop ? CourtAction{0.0, 0.0} : CourtAction{-f[2], -f[3]};
    future.push_back(make_feature(x, u));
    x = propagate(x, u, example.dt);
  }
  return with_agent_future(example, std::move(future));
}

SampleOutput cmd_sample(
  const GraphCvae & model, const TrainingExample & example, const SampleRequest & request, const CourtSpec & court)
{
  if (request.agent_futures.empty()) throw ConfigError("sample: no agent futures requested");
  for (NodeId n : request.nodes) {
    if (!example.graph.contains(n)) throw ContractError("sample: unknown node id " + std::to_string(n));
  }
  SampleOutput out;
  std::ostringstream lines;
  for (std::size_t p = 0; p < request.agent_futures.size(); ++p) {
    const AgentFutureKind kind = request.agent_futures[p];
    SvgPanel panel;
    panel.example = with_agent_future_kind(example, kind);
    panel.title = example.play_id + " t=" + std::to_string(example.t) + " agent future: " + to_string(kind);
    panel.samples = sample_futures(model, panel.example, request.count, request.seed, request.nodes);
    for (const auto & ns : panel.samples) {
      for (std::size_t s = 0; s < ns.samples.size(); ++s) {
        const auto & f = ns.samples[s];
        json actions = json::array();
        json states = json::array();
        for (const auto & u : f.actions) actions.push_back({u.dl, u.dw});
        for (const auto & x : f.states) states.push_back({x.l, x.w});
        lines << json{{"panel", p},
                      {"agent_future", to_string(kind)},
                      {"play_id", example.play_id},
                      {"t", example.t},
                      {"node", ns.node},
                      {"type", ns.type.name()},
                      {"sample", s},
                      {"z", f.joint_z},
                      {"assignment", f.assignment},
                      {"actions", actions},
                      {"states", states}}
                   .dump()
              << "\n";
      }
    }
    out.panels.push_back(std::move(panel));
  }
  out.jsonl = lines.str();
  out.svg = render_samples_svg(out.panels, court, model.config().latent.joint_size());
  return out;
}

const TrainingExample & find_example(const std::vector<TrainingExample> & examples, const std::string & play_id, std::size_t t)
{
  for (const auto & ex : examples)
    if (ex.play_id == play_id && ex.t == t) return ex;
  throw ContractError("no example for play '" + play_id + "' at t=" + std::to_string(t));
}

}  // namespace trajgraph
