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

#include "argmine/tagging.hpp"

#include <gtest/gtest.h>

#include "support.hpp"

namespace argmine {
namespace {

using Spans = std::vector<std::tuple<std::size_t, std::size_t, AduType>>;

Spans strip_ids(const std::vector<TokenSpan>& spans) {
  Spans out;
  for (const auto& s : spans) out.emplace_back(s.begin, s.end, s.type);
  return out;
}

// Repair oracle written per token: a token opens a new span when its tag is
// B/U, or when it is I/L and the previous token is not an open span of the
// same class. A span closes after L/U, before any token that opens a new
// span or is O, and at the end of the sequence.
Spans oracle_decode(const std::vector<int>& tags, const TagSet& ts) {
  const std::size_t n = tags.size();
  std::vector<char> opens(n, 0), inside(n, 0), closes_after(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const TagPrefix p = ts.prefix(tags[t]);
    if (p == TagPrefix::O) continue;
    inside[t] = 1;
    bool prev_open = false;
    if (t > 0 && inside[t - 1] && !closes_after[t - 1] && ts.type(tags[t - 1]) == ts.type(tags[t])) prev_open = true;
    if (t > 0 && inside[t - 1]) {
      const TagPrefix pp = ts.prefix(tags[t - 1]);
      if (pp == TagPrefix::L || pp == TagPrefix::U) prev_open = false;
    }
    opens[t] = p == TagPrefix::B || p == TagPrefix::U || !prev_open;
    if (p == TagPrefix::L || p == TagPrefix::U) closes_after[t] = 1;
  }
  Spans out;
  std::size_t t = 0;
  while (t < n) {
    if (!inside[t]) {
      ++t;
      continue;
    }
    std::size_t e = t + 1;
    while (e < n && inside[e] && !opens[e] && !closes_after[e - 1]) ++e;
    out.emplace_back(t, e, ts.type(tags[t]));
    t = e;
  }
  return out;
}

TEST(Tokenize, SplitsPunctuationWithOffsets) {
  const auto toks = tokenize("a, b");
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_EQ(toks[0].text, "a");
  EXPECT_EQ(toks[1].text, ",");
  EXPECT_EQ(toks[2].text, "b");
  EXPECT_EQ(std::make_pair(toks[0].start, toks[0].end), std::make_pair(std::size_t{0}, std::size_t{1}));
  EXPECT_EQ(std::make_pair(toks[1].start, toks[1].end), std::make_pair(std::size_t{1}, std::size_t{2}));
  EXPECT_EQ(std::make_pair(toks[2].start, toks[2].end), std::make_pair(std::size_t{3}, std::size_t{4}));
}

TEST(Tokenize, EmptyAndWhitespaceOnly) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" \n\t ").empty());
}

TEST(Tokenize, OffsetsSliceBackToTokenText) {
  const std::string text = "<H1>Results</H1> We found (n=12) that\ncells grow; ratio 3.5x \xe2\x80\x94 \xc3\xa9t\xc3\xa9 done.";
  const auto toks = tokenize(text, 100);
  std::size_t prev_end = 100;
  for (const auto& t : toks) {
    EXPECT_EQ(text.substr(t.start - 100, t.end - t.start), t.text);
    EXPECT_GE(t.start, prev_end);
    prev_end = t.end;
  }
  EXPECT_EQ(toks[0].text, "<");
  EXPECT_EQ(toks[1].text, "H1");
}

TEST(Encode, SchemeDefinitions) {
  const std::vector<TokenSpan> three{{0, 3, AduType::data, "a"}};
  TagSet bioul(Scheme::BIOUL), bio2(Scheme::BIO2);
  EXPECT_EQ(tag_strings(encode_token_spans(3, three, Scheme::BIOUL), Scheme::BIOUL).tags,
            (std::vector<std::string>{"B-data", "I-data", "L-data"}));
  const std::vector<TokenSpan> one{{1, 2, AduType::own_claim, "a"}};
  EXPECT_EQ(tag_strings(encode_token_spans(3, one, Scheme::BIOUL), Scheme::BIOUL).tags,
            (std::vector<std::string>{"O", "U-own_claim", "O"}));
  EXPECT_EQ(tag_strings(encode_token_spans(3, one, Scheme::BIO2), Scheme::BIO2).tags,
            (std::vector<std::string>{"O", "B-own_claim", "O"}));
  const std::vector<TokenSpan> adjacent{{0, 2, AduType::data, "a"}, {2, 4, AduType::data, "b"}};
  EXPECT_EQ(tag_strings(encode_token_spans(4, adjacent, Scheme::BIO2), Scheme::BIO2).tags,
            (std::vector<std::string>{"B-data", "I-data", "B-data", "I-data"}));
}

TEST(TagSet, Layout) {
  TagSet bioul(Scheme::BIOUL), bio2(Scheme::BIO2);
  EXPECT_EQ(bioul.size(), 13);
  EXPECT_EQ(bio2.size(), 7);
  EXPECT_EQ(bioul.name(0), "O");
  EXPECT_EQ(bioul.name(1), "B-background_claim");
  EXPECT_EQ(bioul.name(4), "U-background_claim");
  EXPECT_EQ(bioul.name(5), "B-own_claim");
  EXPECT_EQ(bio2.name(6), "I-data");
  for (int i = 0; i < bioul.size(); ++i) EXPECT_EQ(bioul.parse(bioul.name(i)), i);
  for (int i = 0; i < bio2.size(); ++i) EXPECT_EQ(bio2.parse(bio2.name(i)), i);
  EXPECT_EQ(bioul.parse("X-data"), 0);
  EXPECT_EQ(bioul.parse("B-nothing"), 0);
}

TEST(Decode, Examples) {
  TagSet ts(Scheme::BIOUL);
  const int b = ts.index(TagPrefix::B, AduType::data), i = ts.index(TagPrefix::I, AduType::data),
            l = ts.index(TagPrefix::L, AduType::data);
  EXPECT_EQ(strip_ids(decode_token_spans({b, i, l}, Scheme::BIOUL)), (Spans{{0, 3, AduType::data}}));
  EXPECT_EQ(strip_ids(decode_token_spans({i, 0}, Scheme::BIOUL)), (Spans{{0, 1, AduType::data}}));
  EXPECT_TRUE(decode_token_spans({0, 0, 0}, Scheme::BIOUL).empty());
}

TEST(Decode, AllBioulBigramsFollowRepairPolicy) {
  TagSet ts(Scheme::BIOUL);
  int checked = 0;
  for (int a = 0; a < ts.size(); ++a) {
    for (int b = 0; b < ts.size(); ++b) {
      const std::vector<int> tags{a, b};
      std::vector<TokenSpan> got;
      ASSERT_NO_THROW(got = decode_token_spans(tags, Scheme::BIOUL));
      EXPECT_EQ(strip_ids(got), oracle_decode(tags, ts)) << ts.name(a) << " " << ts.name(b);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 169);
}

TEST(Decode, AllBio2BigramsFollowRepairPolicy) {
  TagSet ts(Scheme::BIO2);
  for (int a = 0; a < ts.size(); ++a)
    for (int b = 0; b < ts.size(); ++b)
      EXPECT_EQ(strip_ids(decode_token_spans({a, b}, Scheme::BIO2)), oracle_decode({a, b}, ts))
          << ts.name(a) << " " << ts.name(b);
}

TEST(Decode, RandomSequencesFollowRepairPolicy) {
  Rng rng(21);
  TagSet ts(Scheme::BIOUL);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> tags(1 + rng.below(10));
    for (auto& t : tags) t = static_cast<int>(rng.below(ts.size()));
    EXPECT_EQ(strip_ids(decode_token_spans(tags, Scheme::BIOUL)), oracle_decode(tags, ts));
  }
}

TEST(RoundTrip, RandomSpanSetsBothSchemes) {
  Rng rng(22);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(30);
    const auto spans = testing::random_spans(n, rng);
    for (Scheme scheme : {Scheme::BIO2, Scheme::BIOUL}) {
      const auto tags = encode_token_spans(n, spans, scheme);
      EXPECT_EQ(strip_ids(decode_token_spans(tags, scheme)), strip_ids(spans));
    }
  }
}

TEST(RoundTrip, SchemeConversionPreservesSpans) {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    std::vector<int> tags(n);
    for (auto& t : tags) t = static_cast<int>(rng.below(13));
    const TagSequence seq = tag_strings(tags, Scheme::BIOUL);
    const TagSequence bio2 = convert_scheme(seq, Scheme::BIO2);
    EXPECT_EQ(strip_ids(decode_token_spans(tag_indices(bio2), Scheme::BIO2)),
              strip_ids(decode_token_spans(tags, Scheme::BIOUL)));
  }
}

TEST(Align, WidensPartialTokensWithWarning) {
  const auto toks = tokenize("alpha beta gamma");
  Warnings w;
  const auto spans = align_spans(toks, {{"T1", AduType::data, 2, 8}}, &w);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].begin, 0u);
  EXPECT_EQ(spans[0].end, 2u);
  EXPECT_EQ(w.size(), 1u);
}

TEST(Align, OverlapNamesBothIds) {
  const auto toks = tokenize("alpha beta gamma");
  try {
    align_spans(toks, {{"T1", AduType::data, 0, 10}, {"T2", AduType::data, 6, 16}});
    FAIL() << "overlap not rejected";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("T1"), std::string::npos);
    EXPECT_NE(msg.find("T2"), std::string::npos);
  }
}

TEST(Align, EncodeDecodeOnTextRecoversCharacterSpans) {
  Section s;
  s.doc_id = "d";
  s.text = "We show that cells grow, because data suggest it.";
  s.char_end = s.text.size();
  s.adus = {{"T1", AduType::own_claim, 8, 23}, {"T2", AduType::data, 33, 48}};
  const auto tok = tokenize(s);
  const auto tags = encode_spans(tok, s.adus, Scheme::BIOUL);
  const auto back = decode_tags(tags, tok);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].start, 8u);
  EXPECT_EQ(back[0].end, 23u);
  EXPECT_EQ(back[0].type, AduType::own_claim);
  EXPECT_EQ(back[1].start, 33u);
  EXPECT_EQ(back[1].end, 48u);
}

TEST(TokenClasses, FromTagsAndFromSpansAgree) {
  Rng rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    const auto spans = testing::random_spans(n, rng);
    EXPECT_EQ(token_classes(encode_token_spans(n, spans, Scheme::BIOUL), Scheme::BIOUL), token_classes(spans, n));
  }
}

}  // namespace
}  // namespace argmine
