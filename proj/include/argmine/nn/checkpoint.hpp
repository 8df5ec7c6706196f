// Copyright 2026 The argmine Authors.
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

// Checkpoint file layout (all integers little-endian):
//
//   char[8]  magic "AMCKPT01"
//   u32      version (1)
//   u32      length of the metadata blob, then that many bytes of UTF-8 JSON
//   u32      tensor count
//   per tensor:
//     u16    name length, name bytes
//     u32    rows, u32 cols
//     rows*cols f32 values, row-major

#pragma once

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "argmine/common.hpp"
#include "argmine/nn/tensor.hpp"

namespace argmine::nn {

inline constexpr char kCheckpointMagic[8] = {'A', 'M', 'C', 'K', 'P', 'T', '0', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

namespace io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

// Sequential reader over an in-memory buffer that reports the byte offset of
// any truncation.
class Reader {
 public:
  Reader(std::string data, std::string what) : data_(std::move(data)), what_(std::move(what)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void read_floats(float* dst, std::size_t count) {
    need(count * sizeof(float));
    std::memcpy(dst, data_.data() + pos_, count * sizeof(float));
    pos_ += count * sizeof(float);
  }

  bool at_end() const { return pos_ >= data_.size(); }
  std::size_t offset() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n)
      throw FormatError(what_ + ": truncated at byte offset " + std::to_string(pos_) + " (need " +
                        std::to_string(n) + " bytes, " + std::to_string(data_.size() - pos_) + " left)");
  }

  std::string data_;
  std::string what_;
  std::size_t pos_ = 0;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace io

inline void write_checkpoint(std::ostream& out, const ParameterList& params, const std::string& metadata) {
  out.write(kCheckpointMagic, 8);
  io::put<std::uint32_t>(out, kCheckpointVersion);
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(metadata.size()));
  out.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    io::put<std::uint16_t>(out, static_cast<std::uint16_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    io::put<std::uint32_t>(out, static_cast<std::uint32_t>(p->value.rows()));
    io::put<std::uint32_t>(out, static_cast<std::uint32_t>(p->value.cols()));
    for (double v : p->value.values()) io::put<float>(out, static_cast<float>(v));
  }
}

inline void save_checkpoint(const std::filesystem::path& path, const ParameterList& params,
                            const std::string& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_checkpoint(out, params, metadata);
}

struct CheckpointData {
  std::string metadata;
  std::map<std::string, Matrix> tensors;
};

inline CheckpointData read_checkpoint(std::string bytes, const std::string& what = "checkpoint") {
  io::Reader r(std::move(bytes), what);
  if (r.bytes(8) != std::string(kCheckpointMagic, 8)) throw FormatError(what + ": bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw CheckpointVersionError(what + ": unsupported version " + std::to_string(version));
  CheckpointData d;
  d.metadata = r.bytes(r.get<std::uint32_t>());
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < count; ++k) {
    std::string name = r.bytes(r.get<std::uint16_t>());
    const auto rows = r.get<std::uint32_t>();
    const auto cols = r.get<std::uint32_t>();
    std::vector<float> buf(static_cast<std::size_t>(rows) * cols);
    r.read_floats(buf.data(), buf.size());
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < buf.size(); ++i) m[i] = buf[i];
    d.tensors.emplace(std::move(name), std::move(m));
  }
  return d;
}

inline CheckpointData load_checkpoint(const std::filesystem::path& path) {
  return read_checkpoint(io::slurp(path), path.string());
}

// Copies tensors into matching parameters; names and shapes must agree.
inline void assign_parameters(const ParameterList& params, const CheckpointData& data) {
  if (data.tensors.size() != params.size())
    throw FormatError("checkpoint has " + std::to_string(data.tensors.size()) + " tensors, model expects " +
                      std::to_string(params.size()));
  for (auto* p : params) {
    auto it = data.tensors.find(p->name);
    if (it == data.tensors.end()) throw FormatError("checkpoint lacks tensor " + p->name);
    if (!it->second.same_shape(p->value)) throw FormatError("shape mismatch for " + p->name);
    p->value = it->second;
  }
}

}  // namespace argmine::nn
