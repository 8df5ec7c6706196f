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

// Frozen per-token embeddings.
//
// Two sources exist: a context-free hash embedding (deterministic, for tests
// and desk-scale runs) and precomputed contextual vectors read from an
// embedding file. Embedding file layout, all integers little-endian:
//
//   char[8]  magic "AMEMBED\0"
//   u32      version (1)
//   u32      dim
//   records until end of file:
//     u16    doc id length, doc id bytes (UTF-8)
//     u32    section index
//     u32    token count
//     token_count * dim f32, row-major

#pragma once

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "argmine/common.hpp"
#include "argmine/nn/checkpoint.hpp"
#include "argmine/nn/tensor.hpp"
#include "argmine/tagging.hpp"

namespace argmine {

using nn::Matrix;

inline constexpr char kEmbeddingMagic[8] = {'A', 'M', 'E', 'M', 'B', 'E', 'D', '\0'};
inline constexpr std::uint32_t kEmbeddingVersion = 1;
inline constexpr std::size_t kDefaultMaxPieceLength = 512;

class TokenCountError : public Error {
 public:
  using Error::Error;
};

class NonFiniteEmbeddingError : public FormatError {
 public:
  using FormatError::FormatError;
};

class EmbeddingVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

// One unit-norm vector per token, a function of the lowercased token text
// and the seed only.
inline Matrix hash_embed(std::span<const std::string> tokens, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error("embedding dim must be positive");
  Matrix out(tokens.size(), dim);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Rng rng(detail::fnv1a(detail::ascii_lower(tokens[i])) ^ mix_seed(seed, 0x5EED));
    auto row = out.row(i);
    double sq = 0.0;
    for (auto& v : row) {
      v = rng.normal();
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    for (auto& v : row) v /= norm;
  }
  return out;
}

using EmbedFn = std::function<Matrix(std::span<const std::string>)>;

// Embeds consecutive non-overlapping pieces of at most max_len tokens and
// stacks the results.
inline Matrix embed_piecewise(const EmbedFn& fn, std::span<const std::string> tokens, std::size_t max_len) {
  if (max_len == 0) throw Error("max_len must be at least 1");
  if (tokens.size() <= max_len) return fn(tokens);
  std::vector<Matrix> parts;
  std::size_t cols = 0;
  for (std::size_t b = 0; b < tokens.size(); b += max_len) {
    const std::size_t e = std::min(tokens.size(), b + max_len);
    parts.push_back(fn(tokens.subspan(b, e - b)));
    if (parts.back().rows() != e - b) throw Error("embedder returned wrong number of rows for a piece");
    cols = parts.back().cols();
  }
  return nn::vstack(parts, cols);
}

// ---------------------------------------------------------------------------
// Embedding file

struct EmbeddingRecord {
  std::string doc_id;
  std::uint32_t section_index = 0;
  std::uint32_t token_count = 0;
  std::vector<float> values;  // token_count * dim
};

inline void write_embedding_file(std::ostream& out, std::uint32_t dim, const std::vector<EmbeddingRecord>& records) {
  out.write(kEmbeddingMagic, 8);
  nn::io::put<std::uint32_t>(out, kEmbeddingVersion);
  nn::io::put<std::uint32_t>(out, dim);
  for (const auto& r : records) {
    if (r.values.size() != static_cast<std::size_t>(r.token_count) * dim)
      throw FormatError("record " + r.doc_id + "/" + std::to_string(r.section_index) + " has wrong value count");
    nn::io::put<std::uint16_t>(out, static_cast<std::uint16_t>(r.doc_id.size()));
    out.write(r.doc_id.data(), static_cast<std::streamsize>(r.doc_id.size()));
    nn::io::put<std::uint32_t>(out, r.section_index);
    nn::io::put<std::uint32_t>(out, r.token_count);
    out.write(reinterpret_cast<const char*>(r.values.data()),
              static_cast<std::streamsize>(r.values.size() * sizeof(float)));
  }
}

inline void write_embedding_file(const std::filesystem::path& path, std::uint32_t dim,
                                 const std::vector<EmbeddingRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_embedding_file(out, dim, records);
}

struct EmbeddingFile {
  std::uint32_t dim = 0;
  std::map<std::pair<std::string, std::uint32_t>, EmbeddingRecord> records;
};

inline EmbeddingFile read_embedding_file(std::string bytes, const std::string& what = "embedding file") {
  nn::io::Reader r(std::move(bytes), what);
  if (r.bytes(8) != std::string(kEmbeddingMagic, 8)) throw FormatError(what + ": bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kEmbeddingVersion)
    throw EmbeddingVersionError(what + ": unsupported version " + std::to_string(version));
  EmbeddingFile f;
  f.dim = r.get<std::uint32_t>();
  if (f.dim == 0) throw FormatError(what + ": zero dimension");
  while (!r.at_end()) {
    const std::size_t record_offset = r.offset();
    EmbeddingRecord rec;
    rec.doc_id = r.bytes(r.get<std::uint16_t>());
    rec.section_index = r.get<std::uint32_t>();
    rec.token_count = r.get<std::uint32_t>();
    rec.values.resize(static_cast<std::size_t>(rec.token_count) * f.dim);
    r.read_floats(rec.values.data(), rec.values.size());
    for (float v : rec.values) {
      if (!std::isfinite(v))
        throw NonFiniteEmbeddingError(what + ": non-finite value in record " + rec.doc_id + "/" +
                                      std::to_string(rec.section_index) + " at byte offset " +
                                      std::to_string(record_offset));
    }
    auto key = std::make_pair(rec.doc_id, rec.section_index);
    if (!f.records.emplace(key, std::move(rec)).second)
      throw FormatError(what + ": duplicate record at byte offset " + std::to_string(record_offset));
  }
  return f;
}

// ---------------------------------------------------------------------------

enum class EmbeddingKind { hash, file };

// Read-only after construction; safe to share across threads.
class EmbeddingSource {
 public:
  static EmbeddingSource hash(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw Error("embedding dim must be positive");
    EmbeddingSource s;
    s.kind_ = EmbeddingKind::hash;
    s.dim_ = dim;
    s.seed_ = seed;
    return s;
  }

  static EmbeddingSource from_file(EmbeddingFile file) {
    EmbeddingSource s;
    s.kind_ = EmbeddingKind::file;
    s.dim_ = file.dim;
    s.file_ = std::make_shared<const EmbeddingFile>(std::move(file));
    return s;
  }

  // Parses "hash:<dim>:<seed>" or "file:<path>".
  static EmbeddingSource parse(const std::string& spec) {
    if (spec.rfind("hash:", 0) == 0) {
      const auto rest = spec.substr(5);
      const auto colon = rest.find(':');
      try {
        const std::size_t dim = std::stoul(rest.substr(0, colon));
        const std::uint64_t seed = colon == std::string::npos ? 0 : std::stoull(rest.substr(colon + 1));
        return hash(dim, seed);
      } catch (const std::logic_error&) {
        throw Error("bad embedding spec '" + spec + "'");
      }
    }
    if (spec.rfind("file:", 0) == 0) return from_file(load_embedding_file(spec.substr(5)));
    throw Error("bad embedding spec '" + spec + "' (expected hash:DIM:SEED or file:PATH)");
  }

  static EmbeddingFile load_embedding_file(const std::filesystem::path& path) {
    return read_embedding_file(nn::io::slurp(path), path.string());
  }

  EmbeddingKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }

  std::string describe() const {
    if (kind_ == EmbeddingKind::hash) return "hash:" + std::to_string(dim_) + ":" + std::to_string(seed_);
    return "file(dim=" + std::to_string(dim_) + ", records=" + std::to_string(file_->records.size()) + ")";
  }

  // Hash embedding of bare token strings.
  Matrix embed_tokens(std::span<const std::string> tokens) const {
    if (kind_ != EmbeddingKind::hash) throw Error("file embeddings need a section key");
    return hash_embed(tokens, dim_, seed_);
  }

  Matrix embed(const TokenizedSection& tok, std::size_t max_len = kDefaultMaxPieceLength) const {
    if (kind_ == EmbeddingKind::hash) {
      const auto texts = tok.texts();
      return embed_piecewise([this](std::span<const std::string> t) { return embed_tokens(t); }, texts, max_len);
    }
    auto it = file_->records.find({tok.doc_id, static_cast<std::uint32_t>(tok.section_index)});
    if (it == file_->records.end())
      throw Error("no embeddings for " + tok.doc_id + "/" + std::to_string(tok.section_index));
    const auto& rec = it->second;
    if (rec.token_count != tok.size())
      throw TokenCountError("token count mismatch for " + tok.doc_id + "/" + std::to_string(tok.section_index) +
                            ": file has " + std::to_string(rec.token_count) + ", tokenizer produced " +
                            std::to_string(tok.size()));
    Matrix out(rec.token_count, dim_);
    for (std::size_t i = 0; i < rec.values.size(); ++i) out[i] = rec.values[i];
    return out;
  }

  // Checks every section against the tokenizer; throws on the first mismatch.
  void validate(const std::vector<Section>& sections) const {
    if (kind_ != EmbeddingKind::file) return;
    for (const auto& s : sections) (void)embed(tokenize(s));
  }

 private:
  EmbeddingKind kind_ = EmbeddingKind::hash;
  std::size_t dim_ = 0;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const EmbeddingFile> file_;
};

}  // namespace argmine
