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

#include "trajgraph/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace trajgraph
{

namespace
{
constexpr char kMagic[8] = {'T', 'G', 'C', 'K', 'P', 'T', '\0', '\0'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::string & out, T value)
{
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader
{
public:
  explicit Reader(const std::string & bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char * what)
  {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string(std::size_t n, const char * what)
  {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

private:
  void need(std::size_t n, const char * what)
  {
    if (bytes_.size() - pos_ < n) {
      throw ConfigError(std::string("checkpoint: truncated while reading ") + what + " at byte " + std::to_string(pos_));
    }
  }

  const std::string & bytes_;
  std::size_t pos_{0};
};
}  // namespace

std::string encode_checkpoint(const Checkpoint & ckpt)
{
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, ckpt.format_version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.metadata.size()));
  out += ckpt.metadata;
  put<std::uint64_t>(out, ckpt.entries.size());
  for (const auto & [key, entry] : ckpt.entries) {
    if (shape_numel(entry.shape) != entry.values.size()) {
      throw DimensionError("checkpoint: entry '" + key + "' shape " + shape_to_string(entry.shape) + " mismatches payload");
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(key.size()));
    out += key;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(entry.shape.size()));
    for (auto d : entry.shape) put<std::uint64_t>(out, d);
    for (double v : entry.values) put<double>(out, v);
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string & bytes)
{
  Reader r(bytes);
  if (r.get_string(sizeof(kMagic), "magic") != std::string(kMagic, sizeof(kMagic))) {
    throw ConfigError("checkpoint: bad magic");
  }
  Checkpoint ckpt;
  ckpt.format_version = r.get<std::uint32_t>("format_version");
  if (ckpt.format_version != Checkpoint::kFormatVersion) {
    throw ConfigError("checkpoint: unsupported format_version " + std::to_string(ckpt.format_version));
  }
  const auto meta_len = r.get<std::uint32_t>("metadata length");
  ckpt.metadata = r.get_string(meta_len, "metadata");
  const auto count = r.get<std::uint64_t>("entry count");
  for (std::uint64_t e = 0; e < count; ++e) {
    const auto key_len = r.get<std::uint32_t>("key length");
    std::string key = r.get_string(key_len, "key");
    CheckpointEntry entry;
    const auto rank = r.get<std::uint32_t>("rank");
    for (std::uint32_t d = 0; d < rank; ++d) entry.shape.push_back(r.get<std::uint64_t>("dimension"));
    const std::size_t n = shape_numel(entry.shape);
    entry.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) entry.values[i] = r.get<double>("payload");
    if (!ckpt.entries.emplace(key, std::move(entry)).second) {
      throw ConfigError("checkpoint: duplicate key '" + key + "'");
    }
  }
  if (!r.done()) throw ConfigError("checkpoint: trailing bytes after last entry");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path & path, const Checkpoint & ckpt)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("checkpoint: cannot open '" + path.string() + "' for writing");
  const std::string bytes = encode_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("checkpoint: write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

}  // namespace trajgraph
