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

#ifndef TRAJGRAPH__CHECKPOINT_HPP_
#define TRAJGRAPH__CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "trajgraph/tensor.hpp"

namespace trajgraph
{

/// Binary weight container, little-endian:
///
///   magic "TGCKPT\0\0" | u32 format_version | u32 meta_len | meta (UTF-8 JSON)
///   | u64 entry_count | entries...
///   entry: u32 key_len | key | u32 rank | u64 dims[rank] | f64 values[prod(dims)]
///
/// Entries are written in key order, so equal contents give equal bytes.
struct CheckpointEntry
{
  Shape shape;
  std::vector<double> values;
};

struct Checkpoint
{
  static constexpr std::uint32_t kFormatVersion = 1;

  std::uint32_t format_version{kFormatVersion};
  std::string metadata;
  std::map<std::string, CheckpointEntry> entries;
};

void save_checkpoint(const std::filesystem::path & path, const Checkpoint & checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path & path);

std::string encode_checkpoint(const Checkpoint & checkpoint);
Checkpoint decode_checkpoint(const std::string & bytes);

}  // namespace trajgraph

#endif  // TRAJGRAPH__CHECKPOINT_HPP_
