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

#ifndef TRAJGRAPH__REGISTRY_HPP_
#define TRAJGRAPH__REGISTRY_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "trajgraph/checkpoint.hpp"
#include "trajgraph/lstm.hpp"
#include "trajgraph/tensor.hpp"

namespace trajgraph
{

struct DenseWeights
{
  Tensor weight;  // [in x out]
  Tensor bias;    // [1 x out]

  /// x W + b for a [batch x in] block.
  Tensor apply(const Tensor & x) const;
};

/// Named parameter store. A registry key such as "NHE/Home-PG" or
/// "EE/Away-C—Home-PG" owns a group of tensors named "<key>/<part>"; every
/// lookup of a key hands back handles to the same storage, so all graph
/// positions that share a key share weights.
class WeightRegistry
{
public:
  /// Parameters with the same name and seed are initialised identically no
  /// matter what else the registry holds.
  explicit WeightRegistry(std::uint64_t seed = 0) : seed_(seed) {}

  void add_lstm(const std::string & key, std::size_t input, std::size_t hidden);
  void add_bilstm(const std::string & key, std::size_t input, std::size_t hidden);
  void add_dense(const std::string & key, std::size_t input, std::size_t output);

  LstmCellWeights lstm(const std::string & key) const;
  BiLstmWeights bilstm(const std::string & key) const;
  DenseWeights dense(const std::string & key) const;

  bool has_key(const std::string & key) const { return groups_.count(key) != 0; }
  const Tensor & parameter(const std::string & name) const;
  Tensor & parameter(const std::string & name);

  /// Group keys in sorted order.
  std::vector<std::string> keys() const;
  /// Parameter tensors ordered by full name.
  std::vector<Tensor> parameters() const;
  const std::map<std::string, Tensor> & named_parameters() const { return params_; }
  std::size_t parameter_count() const;

  void zero_grad();

  /// Keys looked up since the last reset, for checking which encoders a code
  /// path touched.
  const std::set<std::string> & accessed_keys() const { return accessed_; }
  bool accessed_with_prefix(const std::string & prefix) const;
  void reset_access_log() const { accessed_.clear(); }

  /// Deep copy with fresh storage.
  WeightRegistry clone() const;

  void export_to(Checkpoint & checkpoint) const;
  /// Overwrites values of every registered parameter from `checkpoint`.
  void import_from(const Checkpoint & checkpoint);

private:
  Tensor & make(const std::string & key, const std::string & name, Shape shape, std::vector<double> values);
  void add_lstm_parts(const std::string & key, const std::string & prefix, std::size_t input, std::size_t hidden);
  std::uint64_t stream_seed(const std::string & name) const;
  const std::vector<std::string> & group(const std::string & key) const;

  std::uint64_t seed_;
  std::map<std::string, Tensor> params_;
  std::map<std::string, std::vector<std::string>> groups_;
  mutable std::set<std::string> accessed_;
};

}  // namespace trajgraph

#endif  // TRAJGRAPH__REGISTRY_HPP_
