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

// Tokenization and span <-> tag sequence conversion (BIO2 and BIOUL).

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argmine/common.hpp"
#include "argmine/corpus.hpp"

namespace argmine {

struct Token {
  std::string text;
  std::size_t start = 0;  // document byte offsets
  std::size_t end = 0;
};

struct TokenizedSection {
  std::string doc_id;
  std::size_t section_index = 0;
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.text);
    return out;
  }
};

// Runs of letters/digits (any non-ASCII byte counts as a letter) form one
// token; every other non-space byte is a token on its own.
inline std::vector<Token> tokenize(std::string_view text, std::size_t offset = 0) {
  std::vector<Token> out;
  auto is_word = [](unsigned char c) { return c >= 0x80 || std::isalnum(c); };
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (is_word(c)) {
      std::size_t j = i;
      while (j < text.size() && is_word(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({std::string(text.substr(i, j - i)), offset + i, offset + j});
      i = j;
    } else {
      out.push_back({std::string(1, text[i]), offset + i, offset + i + 1});
      ++i;
    }
  }
  return out;
}

inline TokenizedSection tokenize(const Section& s) {
  return {s.doc_id, s.index, tokenize(s.text, s.char_start)};
}

// ---------------------------------------------------------------------------
// Tag vocabulary

enum class Scheme { BIO2, BIOUL };
enum class TagPrefix { O, B, I, L, U };

// Index layout: 0 = O, then for each ADU class in enum order the prefixes
// B, I (BIO2) or B, I, L, U (BIOUL). BIOUL has 13 tags, BIO2 has 7.
class TagSet {
 public:
  explicit TagSet(Scheme scheme) : scheme_(scheme) {}

  Scheme scheme() const { return scheme_; }
  int per_class() const { return scheme_ == Scheme::BIOUL ? 4 : 2; }
  int size() const { return 1 + kNumAduTypes * per_class(); }

  int index(TagPrefix p, AduType t) const {
    if (p == TagPrefix::O) return 0;
    int k = 0;
    switch (p) {
      case TagPrefix::B: k = 0; break;
      case TagPrefix::I: k = 1; break;
      case TagPrefix::L: k = scheme_ == Scheme::BIOUL ? 2 : 1; break;
      case TagPrefix::U: k = scheme_ == Scheme::BIOUL ? 3 : 0; break;
      default: break;
    }
    return 1 + static_cast<int>(t) * per_class() + k;
  }

  TagPrefix prefix(int idx) const {
    if (idx <= 0) return TagPrefix::O;
    static constexpr TagPrefix order[] = {TagPrefix::B, TagPrefix::I, TagPrefix::L, TagPrefix::U};
    return order[(idx - 1) % per_class()];
  }

  // Class of a non-O tag.
  AduType type(int idx) const { return static_cast<AduType>((idx - 1) / per_class()); }

  std::string name(int idx) const {
    if (idx <= 0) return "O";
    static constexpr const char* letters = "BILU";
    return std::string(1, letters[(idx - 1) % per_class()]) + "-" + std::string(to_string(type(idx)));
  }

  // Unknown or malformed tag strings map to O.
  int parse(std::string_view tag) const {
    if (tag.size() < 3 || tag[1] != '-') return 0;
    const auto t = parse_adu_type(tag.substr(2));
    if (!t) return 0;
    switch (tag[0]) {
      case 'B': return index(TagPrefix::B, *t);
      case 'I': return index(TagPrefix::I, *t);
      case 'L': return scheme_ == Scheme::BIOUL ? index(TagPrefix::L, *t) : 0;
      case 'U': return scheme_ == Scheme::BIOUL ? index(TagPrefix::U, *t) : 0;
      default: return 0;
    }
  }

  // Whether tag `to` may follow tag `from` in a well-formed sequence.
  bool allowed(int from, int to) const {
    const TagPrefix pf = prefix(from), pt = prefix(to);
    if (scheme_ == Scheme::BIO2) {
      if (pt == TagPrefix::I) return pf != TagPrefix::O && type(from) == type(to);
      return true;
    }
    const bool open = pf == TagPrefix::B || pf == TagPrefix::I;
    const bool continues = pt == TagPrefix::I || pt == TagPrefix::L;
    if (open) return continues && type(from) == type(to);
    return !continues;
  }

  bool allowed_start(int to) const {
    const TagPrefix p = prefix(to);
    return !(p == TagPrefix::I || p == TagPrefix::L);
  }

  bool allowed_end(int from) const {
    if (scheme_ == Scheme::BIO2) return true;
    const TagPrefix p = prefix(from);
    return !(p == TagPrefix::B || p == TagPrefix::I);
  }

 private:
  Scheme scheme_;
};

struct TagSequence {
  Scheme scheme = Scheme::BIOUL;
  std::vector<std::string> tags;

  std::size_t size() const { return tags.size(); }
  friend bool operator==(const TagSequence&, const TagSequence&) = default;
};

// A span over token indices [begin, end).
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  AduType type = AduType::own_claim;
  std::string id;

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// Maps character spans onto covering tokens. Overlapping character spans are
// an error; spans whose boundaries fall inside a token are widened with a
// warning.
inline std::vector<TokenSpan> align_spans(const std::vector<Token>& tokens, std::vector<AduSpan> adus,
                                          Warnings* warnings = nullptr) {
  std::sort(adus.begin(), adus.end(),
            [](const AduSpan& a, const AduSpan& b) { return std::tie(a.start, a.end) < std::tie(b.start, b.end); });
  for (std::size_t i = 1; i < adus.size(); ++i) {
    if (adus[i].start < adus[i - 1].end)
      throw Error("overlapping ADUs " + adus[i - 1].id + " and " + adus[i].id);
  }
  std::vector<TokenSpan> out;
  for (const auto& a : adus) {
    auto first = std::find_if(tokens.begin(), tokens.end(), [&](const Token& t) { return t.end > a.start; });
    std::size_t b = static_cast<std::size_t>(first - tokens.begin());
    std::size_t e = b;
    while (e < tokens.size() && tokens[e].start < a.end) ++e;
    if (b == e) {
      warn(warnings, "ADU " + a.id + " covers no token; skipped");
      continue;
    }
    if (tokens[b].start != a.start || tokens[e - 1].end != a.end)
      warn(warnings, "ADU " + a.id + " widened to token boundaries");
    if (!out.empty() && b < out.back().end) {
      b = out.back().end;
      warn(warnings, "ADU " + a.id + " shares a token with " + out.back().id + "; trimmed");
      if (b >= e) continue;
    }
    out.push_back({b, e, a.type, a.id});
  }
  return out;
}

inline std::vector<int> encode_token_spans(std::size_t n, const std::vector<TokenSpan>& spans, Scheme scheme) {
  const TagSet ts(scheme);
  std::vector<int> tags(n, 0);
  for (const auto& s : spans) {
    if (s.end > n || s.begin >= s.end) throw Error("span " + s.id + " outside token range");
    for (std::size_t i = s.begin; i < s.end; ++i) {
      if (tags[i] != 0) throw Error("overlapping spans at token " + std::to_string(i));
    }
    if (s.end - s.begin == 1) {
      tags[s.begin] = ts.index(TagPrefix::U, s.type);
      continue;
    }
    tags[s.begin] = ts.index(TagPrefix::B, s.type);
    for (std::size_t i = s.begin + 1; i + 1 < s.end; ++i) tags[i] = ts.index(TagPrefix::I, s.type);
    tags[s.end - 1] = ts.index(TagPrefix::L, s.type);
  }
  return tags;
}

// Extracts spans from tag indices. Repairs: an I/L that does not continue an
// open span of its class opens a new span (acting as B/U); a class change
// closes the open span.
inline std::vector<TokenSpan> decode_token_spans(const std::vector<int>& tags, Scheme scheme) {
  const TagSet ts(scheme);
  std::vector<TokenSpan> out;
  std::optional<TokenSpan> open;
  auto close = [&](std::size_t end) {
    if (open) {
      open->end = end;
      out.push_back(*open);
      open.reset();
    }
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const int tag = (tags[i] < 0 || tags[i] >= ts.size()) ? 0 : tags[i];
    const TagPrefix p = ts.prefix(tag);
    if (p == TagPrefix::O) {
      close(i);
      continue;
    }
    const AduType t = ts.type(tag);
    const bool continues = open && open->type == t;
    switch (p) {
      case TagPrefix::B:
        close(i);
        open = TokenSpan{i, i, t, {}};
        break;
      case TagPrefix::I:
        if (!continues) {
          close(i);
          open = TokenSpan{i, i, t, {}};
        }
        break;
      case TagPrefix::L:
        if (!continues) {
          close(i);
          open = TokenSpan{i, i, t, {}};
        }
        close(i + 1);
        break;
      case TagPrefix::U:
        close(i);
        open = TokenSpan{i, i, t, {}};
        close(i + 1);
        break;
      default:
        break;
    }
  }
  close(tags.size());
  return out;
}

inline std::vector<int> tag_indices(const TagSequence& seq) {
  const TagSet ts(seq.scheme);
  std::vector<int> out;
  out.reserve(seq.tags.size());
  for (const auto& t : seq.tags) out.push_back(ts.parse(t));
  return out;
}

inline TagSequence tag_strings(const std::vector<int>& tags, Scheme scheme) {
  const TagSet ts(scheme);
  TagSequence seq{scheme, {}};
  seq.tags.reserve(tags.size());
  for (int t : tags) seq.tags.push_back(ts.name(t));
  return seq;
}

inline TagSequence encode_spans(const TokenizedSection& tok, const std::vector<AduSpan>& adus, Scheme scheme,
                                Warnings* warnings = nullptr) {
  return tag_strings(encode_token_spans(tok.size(), align_spans(tok.tokens, adus, warnings), scheme), scheme);
}

// Converts token spans back to character spans named p0, p1, ...
inline std::vector<AduSpan> spans_to_adus(const std::vector<TokenSpan>& spans, const std::vector<Token>& tokens,
                                          std::string_view id_prefix = "p") {
  std::vector<AduSpan> out;
  out.reserve(spans.size());
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto& s = spans[k];
    out.push_back({std::string(id_prefix) + std::to_string(k), s.type, tokens[s.begin].start, tokens[s.end - 1].end});
  }
  return out;
}

inline std::vector<AduSpan> decode_tags(const TagSequence& tags, const TokenizedSection& tok) {
  if (tags.size() != tok.size()) throw Error("tag sequence length does not match token count");
  return spans_to_adus(decode_token_spans(tag_indices(tags), tags.scheme), tok.tokens);
}

inline TagSequence convert_scheme(const TagSequence& seq, Scheme to) {
  if (seq.scheme == to) return seq;
  return tag_strings(encode_token_spans(seq.size(), decode_token_spans(tag_indices(seq), seq.scheme), to), to);
}

// Per-token class ids (-1 for outside), the unit of token-level scoring.
inline std::vector<int> token_classes(const std::vector<int>& tags, Scheme scheme) {
  const TagSet ts(scheme);
  std::vector<int> out;
  out.reserve(tags.size());
  for (int t : tags) out.push_back(t <= 0 || t >= ts.size() ? -1 : static_cast<int>(ts.type(t)));
  return out;
}

inline std::vector<int> token_classes(const std::vector<TokenSpan>& spans, std::size_t n) {
  std::vector<int> out(n, -1);
  for (const auto& s : spans)
    for (std::size_t i = s.begin; i < s.end && i < n; ++i) out[i] = static_cast<int>(s.type);
  return out;
}

}  // namespace argmine
