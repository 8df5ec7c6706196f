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

#include "argmine/embed.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "argmine/corpus.hpp"
#include "support.hpp"

namespace argmine {
namespace {

const std::filesystem::path kFixture = std::filesystem::path(ARGMINE_TEST_DATA) / "fixture_corpus";

std::vector<std::string> words(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(i % 37));
  return out;
}

bool bitwise_equal(const Matrix& a, const std::vector<float>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const float f = static_cast<float>(a[i]);
    if (std::memcmp(&f, &b[i], sizeof f) != 0) return false;
  }
  return true;
}

std::string bytes_of(std::uint32_t dim, const std::vector<EmbeddingRecord>& recs) {
  std::ostringstream out;
  write_embedding_file(out, dim, recs);
  return out.str();
}

TEST(HashEmbed, UnitNormDeterministicCaseInsensitive) {
  const std::vector<std::string> toks{"Cell", "cell", "growth", "CELL"};
  const Matrix m = hash_embed(toks, 16, 3);
  ASSERT_EQ(m.rows(), 4u);
  ASSERT_EQ(m.cols(), 16u);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sq = 0;
    for (double v : m.row(r)) sq += v * v;
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-6);
  }
  for (std::size_t c = 0; c < 16; ++c) {
    EXPECT_EQ(m(0, c), m(1, c));
    EXPECT_EQ(m(0, c), m(3, c));
  }
  const Matrix other = hash_embed(toks, 16, 4);
  bool differs = false;
  for (std::size_t c = 0; c < 16; ++c) differs |= other(0, c) != m(0, c);
  EXPECT_TRUE(differs);
  EXPECT_THROW(hash_embed(toks, 0, 3), Error);
}

TEST(Piecewise, PieceSizesAndRowCount) {
  std::vector<std::size_t> pieces;
  const EmbedFn fn = [&](std::span<const std::string> t) {
    pieces.push_back(t.size());
    return hash_embed(t, 4, 1);
  };
  const auto toks = words(5);
  EXPECT_EQ(embed_piecewise(fn, toks, 2).rows(), 5u);
  EXPECT_EQ(pieces, (std::vector<std::size_t>{2, 2, 1}));
  EXPECT_THROW(embed_piecewise(fn, toks, 0), Error);
}

TEST(Piecewise, EqualsDirectForContextFreeEmbedder) {
  const EmbedFn fn = [](std::span<const std::string> t) { return hash_embed(t, 8, 2); };
  for (std::size_t n : {0u, 1u, 7u, 512u, 700u, 4100u}) {
    const auto toks = words(n);
    const Matrix direct = fn(toks);
    for (std::size_t max_len : {1u, 3u, 512u, 10000u}) {
      const Matrix piecewise = embed_piecewise(fn, toks, max_len);
      ASSERT_EQ(piecewise.rows(), n) << n << "/" << max_len;
      EXPECT_EQ(piecewise.values(), direct.values()) << n << "/" << max_len;
    }
  }
}

TEST(EmbeddingFile, RandomRoundTripIsBitExact) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint32_t dim = 1 + static_cast<std::uint32_t>(rng.below(9));
    std::vector<EmbeddingRecord> recs;
    for (std::uint32_t s = 0; s < 1 + rng.below(4); ++s) {
      EmbeddingRecord r{"D\xc3\xa9" + std::to_string(trial), s, static_cast<std::uint32_t>(rng.below(6)), {}};
      for (std::size_t i = 0; i < r.token_count * dim; ++i) r.values.push_back(static_cast<float>(rng.normal() * 1e3));
      recs.push_back(r);
    }
    const std::string bytes = bytes_of(dim, recs);
    const EmbeddingFile f = read_embedding_file(bytes);
    EXPECT_EQ(f.dim, dim);
    ASSERT_EQ(f.records.size(), recs.size());
    for (const auto& r : recs) {
      const auto& got = f.records.at({r.doc_id, r.section_index});
      EXPECT_EQ(got.token_count, r.token_count);
      EXPECT_EQ(std::memcmp(got.values.data(), r.values.data(), r.values.size() * sizeof(float)), 0);
    }
  }
}

TEST(EmbeddingFile, HeaderLayout) {
  const std::string bytes = bytes_of(3, {{"ab", 7, 1, {1.0f, 2.0f, 3.0f}}});
  ASSERT_EQ(bytes.size(), 8u + 4 + 4 + 2 + 2 + 4 + 4 + 12);
  EXPECT_EQ(bytes.substr(0, 8), std::string("AMEMBED\0", 8));
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[12], 3);
  EXPECT_EQ(bytes[16], 2);
  EXPECT_EQ(bytes.substr(18, 2), "ab");
  EXPECT_EQ(bytes[20], 7);
  EXPECT_EQ(bytes[24], 1);
}

TEST(EmbeddingFile, TruncationNamesByteOffset) {
  const std::string bytes = bytes_of(2, {{"d", 0, 2, {1, 2, 3, 4}}});
  try {
    read_embedding_file(bytes.substr(0, bytes.size() - 3));
    FAIL() << "truncated file accepted";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
  }
}

TEST(EmbeddingFile, DistinctErrorsForMagicVersionAndNonFinite) {
  std::string bytes = bytes_of(1, {{"d", 0, 1, {0.5f}}});
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(read_embedding_file(bad_magic), FormatError);
  std::string bad_version = bytes;
  bad_version[8] = 2;
  EXPECT_THROW(read_embedding_file(bad_version), EmbeddingVersionError);
  const float inf = std::numeric_limits<float>::infinity();
  EXPECT_THROW(read_embedding_file(bytes_of(1, {{"d", 0, 1, {inf}}})), NonFiniteEmbeddingError);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(read_embedding_file(bytes_of(1, {{"d", 0, 1, {nan}}})), NonFiniteEmbeddingError);
  EXPECT_THROW(read_embedding_file(bytes_of(1, {{"d", 0, 1, {1}}, {"d", 0, 1, {2}}})), FormatError);
}

TEST(EmbeddingSource, FileLookupAndTokenCountMismatch) {
  const auto docs = parse_corpus(kFixture);
  const auto sections = all_sections(docs);
  const std::uint32_t dim = 3;
  std::vector<EmbeddingRecord> exact, off_by_one;
  for (const auto& s : sections) {
    const auto n = static_cast<std::uint32_t>(tokenize(s).size());
    EmbeddingRecord r{s.doc_id, static_cast<std::uint32_t>(s.index), n, std::vector<float>(n * dim, 0.25f)};
    exact.push_back(r);
    r.token_count = n + 1;
    r.values.resize((n + 1) * dim, 0.25f);
    off_by_one.push_back(r);
  }
  const auto dir = testing::temp_dir("embed");
  write_embedding_file(dir / "ok.emb", dim, exact);
  write_embedding_file(dir / "bad.emb", dim, off_by_one);

  const auto ok = EmbeddingSource::parse("file:" + (dir / "ok.emb").string());
  EXPECT_EQ(ok.kind(), EmbeddingKind::file);
  EXPECT_EQ(ok.dim(), dim);
  EXPECT_NO_THROW(ok.validate(sections));
  const Matrix m = ok.embed(tokenize(sections.front()));
  EXPECT_TRUE(bitwise_equal(m, exact.front().values));

  const auto bad = EmbeddingSource::parse("file:" + (dir / "bad.emb").string());
  EXPECT_THROW(bad.validate(sections), TokenCountError);
  Section missing = sections.front();
  missing.doc_id = "nowhere";
  EXPECT_THROW(ok.embed(tokenize(missing)), Error);
}

TEST(EmbeddingSource, ParseSpecs) {
  const auto h = EmbeddingSource::parse("hash:32:9");
  EXPECT_EQ(h.kind(), EmbeddingKind::hash);
  EXPECT_EQ(h.dim(), 32u);
  EXPECT_EQ(h.seed(), 9u);
  EXPECT_EQ(h.describe(), "hash:32:9");
  EXPECT_THROW(EmbeddingSource::parse("hash:zero"), Error);
  EXPECT_THROW(EmbeddingSource::parse("hash:0:1"), Error);
  EXPECT_THROW(EmbeddingSource::parse("bert"), Error);
  EXPECT_THROW(EmbeddingSource::parse("file:/nonexistent/x.emb"), Error);
}

TEST(EmbeddingSource, HashSourceHandlesLongSections) {
  Section s;
  s.doc_id = "long";
  for (int i = 0; i < 4500; ++i) s.text += "tok" + std::to_string(i % 50) + " ";
  s.char_end = s.text.size();
  const auto src = EmbeddingSource::hash(8, 1);
  const auto tok = tokenize(s);
  EXPECT_EQ(src.embed(tok).rows(), tok.size());
  EXPECT_EQ(src.embed(tok).values(), hash_embed(tok.texts(), 8, 1).values());
}

}  // namespace
}  // namespace argmine
