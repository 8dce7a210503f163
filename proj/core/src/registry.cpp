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

#include "trajgraph/registry.hpp"

#include <Eigen/QR>

#include <cmath>
#include <random>

namespace trajgraph
{

namespace
{
const char * const kGateNames[4] = {"i", "f", "o", "c"};

std::uint64_t fnv1a(const std::string & s, std::uint64_t h = 14695981039346656037ULL)
{
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<double> uniform_values(std::size_t n, double bound, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> d(-bound, bound);
  std::vector<double> out(n);
  for (auto & v : out) v = d(rng);
  return out;
}

std::vector<double> glorot(std::size_t in, std::size_t out, std::mt19937_64 & rng)
{
  return uniform_values(in * out, std::sqrt(6.0 / static_cast<double>(in + out)), rng);
}

std::vector<double> orthogonal(std::size_t n, std::mt19937_64 & rng)
{
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = d(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  // Sign-normalise Q against diag(R).
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  std::vector<double> out(n * n);
  for (std::size_t r2 = 0; r2 < n; ++r2)
    for (std::size_t c = 0; c < n; ++c) out[r2 * n + c] = q(static_cast<Eigen::Index>(r2), static_cast<Eigen::Index>(c));
  return out;
}
}  // namespace

Tensor DenseWeights::apply(const Tensor & x) const
{
  return matmul(x, weight) + repeat_rows(bias, x.dim(0));
}

std::uint64_t WeightRegistry::stream_seed(const std::string & name) const
{
  return fnv1a(name, 14695981039346656037ULL ^ (seed_ * 0x9E3779B97F4A7C15ULL));
}

Tensor & WeightRegistry::make(const std::string & key, const std::string & name, Shape shape, std::vector<double> values)
{
  if (params_.count(name)) throw ContractError("registry: parameter '" + name + "' already exists");
  groups_[key].push_back(name);
  return params_.emplace(name, Tensor::parameter(std::move(shape), std::move(values))).first->second;
}

void WeightRegistry::add_lstm_parts(const std::string & key, const std::string & prefix, std::size_t input, std::size_t hidden)
{
  for (std::size_t g = 0; g < 4; ++g) {
    const std::string w = prefix + "/W_" + kGateNames[g];
    const std::string u = prefix + "/U_" + kGateNames[g];
    const std::string b = prefix + "/b_" + kGateNames[g];
    std::mt19937_64 rw(stream_seed(w));
    std::mt19937_64 ru(stream_seed(u));
    make(key, w, {input, hidden}, glorot(input, hidden, rw));
    make(key, u, {hidden, hidden}, orthogonal(hidden, ru));
    make(key, b, {1, hidden}, std::vector<double>(hidden, g == kForgetGate ? 1.0 : 0.0));
  }
}

void WeightRegistry::add_lstm(const std::string & key, std::size_t input, std::size_t hidden)
{
  if (groups_.count(key)) throw ContractError("registry: key '" + key + "' already exists");
  add_lstm_parts(key, key, input, hidden);
}

void WeightRegistry::add_bilstm(const std::string & key, std::size_t input, std::size_t hidden)
{
  if (groups_.count(key)) throw ContractError("registry: key '" + key + "' already exists");
  add_lstm_parts(key, key + "/fwd", input, hidden);
  add_lstm_parts(key, key + "/bwd", input, hidden);
}

void WeightRegistry::add_dense(const std::string & key, std::size_t input, std::size_t output)
{
  if (groups_.count(key)) throw ContractError("registry: key '" + key + "' already exists");
  std::mt19937_64 rw(stream_seed(key + "/weight"));
  make(key, key + "/weight", {input, output}, glorot(input, output, rw));
  make(key, key + "/bias", {1, output}, std::vector<double>(output, 0.0));
}

const std::vector<std::string> & WeightRegistry::group(const std::string & key) const
{
  const auto it = groups_.find(key);
  if (it == groups_.end()) throw ContractError("registry: unknown key '" + key + "'");
  accessed_.insert(key);
  return it->second;
}

const Tensor & WeightRegistry::parameter(const std::string & name) const
{
  const auto it = params_.find(name);
  if (it == params_.end()) throw ContractError("registry: unknown parameter '" + name + "'");
  return it->second;
}

Tensor & WeightRegistry::parameter(const std::string & name)
{
  const auto it = params_.find(name);
  if (it == params_.end()) throw ContractError("registry: unknown parameter '" + name + "'");
  return it->second;
}

namespace
{
LstmCellWeights assemble_lstm(const WeightRegistry & reg, const std::string & prefix)
{
  LstmCellWeights cell;
  for (std::size_t g = 0; g < 4; ++g) {
    cell.input_weights[g] = reg.parameter(prefix + "/W_" + kGateNames[g]);
    cell.recurrent_weights[g] = reg.parameter(prefix + "/U_" + kGateNames[g]);
    cell.biases[g] = reg.parameter(prefix + "/b_" + kGateNames[g]);
  }
  cell.input_size = cell.input_weights[0].dim(0);
  cell.hidden_size = cell.input_weights[0].dim(1);
  return cell;
}
}  // namespace

LstmCellWeights WeightRegistry::lstm(const std::string & key) const
{
  group(key);
  return assemble_lstm(*this, key);
}

BiLstmWeights WeightRegistry::bilstm(const std::string & key) const
{
  group(key);
  return {assemble_lstm(*this, key + "/fwd"), assemble_lstm(*this, key + "/bwd")};
}

DenseWeights WeightRegistry::dense(const std::string & key) const
{
  group(key);
  return {parameter(key + "/weight"), parameter(key + "/bias")};
}

std::vector<std::string> WeightRegistry::keys() const
{
  std::vector<std::string> out;
  for (const auto & [k, v] : groups_) out.push_back(k);
  return out;
}

std::vector<Tensor> WeightRegistry::parameters() const
{
  std::vector<Tensor> out;
  for (const auto & [n, t] : params_) out.push_back(t);
  return out;
}

std::size_t WeightRegistry::parameter_count() const
{
  std::size_t n = 0;
  for (const auto & [name, t] : params_) n += t.size();
  return n;
}

void WeightRegistry::zero_grad()
{
  for (auto & [n, t] : params_) t.zero_grad();
}

bool WeightRegistry::accessed_with_prefix(const std::string & prefix) const
{
  for (const auto & k : accessed_) {
    if (k.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

WeightRegistry WeightRegistry::clone() const
{
  WeightRegistry out(seed_);
  out.groups_ = groups_;
  for (const auto & [n, t] : params_) {
    out.params_.emplace(n, Tensor::parameter(t.shape(), std::vector<double>(t.values().begin(), t.values().end())));
  }
  return out;
}

void WeightRegistry::export_to(Checkpoint & ckpt) const
{
  for (const auto & [n, t] : params_) {
    ckpt.entries[n] = CheckpointEntry{t.shape(), std::vector<double>(t.values().begin(), t.values().end())};
  }
}

void WeightRegistry::import_from(const Checkpoint & ckpt)
{
  for (auto & [n, t] : params_) {
    const auto it = ckpt.entries.find(n);
    if (it == ckpt.entries.end()) throw ConfigError("checkpoint: missing parameter '" + n + "'");
    if (it->second.shape != t.shape()) {
      throw ConfigError(
        "checkpoint: parameter '" + n + "' has shape " + shape_to_string(it->second.shape) + ", model expects " +
        shape_to_string(t.shape()));
    }
    std::copy(it->second.values.begin(), it->second.values.end(), t.mutable_values().begin());
  }
}

}  // namespace trajgraph
