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

// Annotated corpus model and the Sci-Arg reader.
//
// A Sci-Arg document is distributed as a brat standoff pair: `A01.txt` holds
// the GATE-exported body (XML declaration, a GATE `<Document ...>` tag and
// inline markup such as `<H1>...</H1>`), `A01.ann` holds the ADU and relation
// annotations as code point offsets into the .txt file. Reading a document
// removes the XML header, remaps every offset onto the remaining text
// (UTF-8 byte offsets from then on) and splits the text into sections at
// each `<H1>` marker.

#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "argmine/common.hpp"
#include "json.hpp"

namespace argmine {

enum class AduType { background_claim = 0, own_claim = 1, data = 2 };
inline constexpr int kNumAduTypes = 3;

enum class RelationLabel {
  supports = 0,
  contradicts = 1,
  semantically_same = 2,
  parts_of_same = 3
};
inline constexpr int kNumRelationLabels = 4;

inline std::string_view to_string(AduType t) {
  switch (t) {
    case AduType::background_claim: return "background_claim";
    case AduType::own_claim: return "own_claim";
    case AduType::data: return "data";
  }
  return "?";
}

inline std::string_view to_string(RelationLabel l) {
  switch (l) {
    case RelationLabel::supports: return "supports";
    case RelationLabel::contradicts: return "contradicts";
    case RelationLabel::semantically_same: return "semantically_same";
    case RelationLabel::parts_of_same: return "parts_of_same";
  }
  return "?";
}

namespace detail {

// "Own Claim", "own-claim" and "own_claim" all normalize to "own_claim".
inline std::string normalize_label(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == ' ' || c == '-') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

}  // namespace detail

inline std::optional<AduType> parse_adu_type(std::string_view s) {
  const std::string n = detail::normalize_label(s);
  if (n == "background_claim") return AduType::background_claim;
  if (n == "own_claim") return AduType::own_claim;
  if (n == "data") return AduType::data;
  return std::nullopt;
}

inline std::optional<RelationLabel> parse_relation_label(std::string_view s) {
  const std::string n = detail::normalize_label(s);
  if (n == "supports") return RelationLabel::supports;
  if (n == "contradicts") return RelationLabel::contradicts;
  if (n == "semantically_same") return RelationLabel::semantically_same;
  if (n == "parts_of_same") return RelationLabel::parts_of_same;
  return std::nullopt;
}

// Offsets are byte offsets into the header-stripped document text; `end` is
// exclusive.
struct AduSpan {
  std::string id;
  AduType type = AduType::own_claim;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const AduSpan&, const AduSpan&) = default;
};

struct Relation {
  std::string head;
  std::string tail;
  RelationLabel label = RelationLabel::supports;

  friend bool operator==(const Relation&, const Relation&) = default;
};

// One unit after joining fragments linked by parts_of_same. The id is the id
// of the fragment with the smallest start offset.
struct MergedAdu {
  std::string id;
  AduType type = AduType::own_claim;
  std::vector<AduSpan> fragments;

  std::size_t start() const { return fragments.front().start; }
  std::size_t length() const {
    std::size_t n = 0;
    for (const auto& f : fragments) n += f.length();
    return n;
  }
  friend bool operator==(const MergedAdu&, const MergedAdu&) = default;
};

struct Section {
  std::string doc_id;
  std::size_t index = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string text;  // == document text [char_start, char_end)
  std::vector<AduSpan> adus;
  std::vector<Relation> relations;

  const AduSpan* find_adu(std::string_view id) const {
    for (const auto& a : adus)
      if (a.id == id) return &a;
    return nullptr;
  }
};

struct Document {
  std::string id;
  std::string text;              // file body with the XML header removed
  std::size_t header_bytes = 0;  // bytes removed from the front of the file
  std::vector<AduSpan> adus;     // document level, offsets into `text`
  std::vector<Relation> relations;
  std::vector<Section> sections;
  std::size_t dropped_relations = 0;  // relations crossing a section boundary
};

// ---------------------------------------------------------------------------
// Preprocessing

// Pattern matching the XML declaration, the GATE Document open tag and any
// text up to the next tag.
inline const std::regex& header_pattern() {
  static const std::regex re(
      R"(<\?xml[^>]*>[^<]*<Document xmlns:gate="http://www\.gate\.ac\.uk"[^>]*>[^<]*)");
  return re;
}

// Removes the leading header. Text without a header is returned unchanged
// and a warning is recorded.
inline std::string strip_header(const std::string& raw, Warnings* warnings = nullptr,
                                std::size_t* removed = nullptr) {
  std::smatch m;
  if (std::regex_search(raw, m, header_pattern(), std::regex_constants::match_continuous)) {
    const auto n = static_cast<std::size_t>(m.length(0));
    if (removed) *removed = n;
    return raw.substr(n);
  }
  if (removed) *removed = 0;
  warn(warnings, "no XML header found; text left unchanged");
  return raw;
}

// Section boundaries at every case-insensitive "<h1>" marker. The marker
// stays in the section it opens; an empty preamble is dropped.
inline std::vector<std::pair<std::size_t, std::size_t>> split_sections(std::string_view text) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i + 4 <= text.size(); ++i) {
    if (text[i] == '<' && (text[i + 1] == 'h' || text[i + 1] == 'H') && text[i + 2] == '1' &&
        text[i + 3] == '>') {
      starts.push_back(i);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (text.empty()) return out;
  if (starts.empty() || starts.front() != 0) starts.insert(starts.begin(), 0);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const std::size_t end = k + 1 < starts.size() ? starts[k + 1] : text.size();
    out.emplace_back(starts[k], end);
  }
  return out;
}

namespace detail {

// byte offset of every code point boundary; result[i] is the byte offset of
// code point i, result.back() == s.size().
inline std::vector<std::size_t> code_point_offsets(std::string_view s) {
  std::vector<std::size_t> out;
  out.reserve(s.size() + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) out.push_back(i);
  }
  out.push_back(s.size());
  return out;
}

inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(c == '\n' || c == '\r' || c == '\t' ? ' ' : c);
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// Splits `doc.text` into sections and distributes annotations. Relations
// whose endpoints fall in different sections are dropped and counted.
inline void build_sections(Document& doc, Warnings* warnings = nullptr) {
  doc.sections.clear();
  doc.dropped_relations = 0;
  const auto ranges = split_sections(doc.text);
  std::map<std::string, std::size_t> section_of;
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    Section s;
    s.doc_id = doc.id;
    s.index = k;
    s.char_start = ranges[k].first;
    s.char_end = ranges[k].second;
    s.text = doc.text.substr(s.char_start, s.char_end - s.char_start);
    doc.sections.push_back(std::move(s));
  }
  for (const auto& a : doc.adus) {
    bool placed = false;
    for (auto& s : doc.sections) {
      if (a.start >= s.char_start && a.end <= s.char_end) {
        s.adus.push_back(a);
        section_of[a.id] = s.index;
        placed = true;
        break;
      }
    }
    if (!placed) warn(warnings, doc.id + ": ADU " + a.id + " crosses a section boundary; dropped");
  }
  for (auto& s : doc.sections) {
    std::sort(s.adus.begin(), s.adus.end(),
              [](const AduSpan& x, const AduSpan& y) { return std::tie(x.start, x.end) < std::tie(y.start, y.end); });
  }
  for (const auto& r : doc.relations) {
    auto h = section_of.find(r.head);
    auto t = section_of.find(r.tail);
    if (h == section_of.end() || t == section_of.end() || h->second != t->second) {
      ++doc.dropped_relations;
      continue;
    }
    doc.sections[h->second].relations.push_back(r);
  }
}

// Parses one brat pair. `txt` is the full file body, `ann` the annotation
// file content.
inline Document parse_document(const std::string& id, const std::string& txt, const std::string& ann,
                               Warnings* warnings = nullptr) {
  Document doc;
  doc.id = id;
  std::size_t removed = 0;
  Warnings header_warn;
  doc.text = strip_header(txt, &header_warn, &removed);
  if (!header_warn.empty()) warn(warnings, id + ": " + header_warn.messages.front());
  doc.header_bytes = removed;

  const auto cps = detail::code_point_offsets(txt);
  auto to_byte = [&](long long cp, std::size_t line_no) -> std::size_t {
    if (cp < 0 || static_cast<std::size_t>(cp) >= cps.size())
      throw ParseError(id + ": line " + std::to_string(line_no) + ": offset " + std::to_string(cp) +
                       " out of bounds");
    return cps[static_cast<std::size_t>(cp)];
  };

  std::set<std::string> ids;
  std::istringstream lines(ann);
  std::string line;
  std::size_t line_no = 0;
  std::vector<Relation> relations;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw ParseError(id + ": line " + std::to_string(line_no) + ": " + what);
    };
    const auto tab1 = line.find('\t');
    if (tab1 == std::string::npos) fail("missing tab separator");
    const std::string ann_id = line.substr(0, tab1);
    const auto tab2 = line.find('\t', tab1 + 1);
    const std::string body = line.substr(tab1 + 1, tab2 == std::string::npos ? std::string::npos : tab2 - tab1 - 1);
    std::istringstream fields(body);
    std::string type;
    fields >> type;
    if (ann_id.empty()) fail("empty annotation id");
    if (ann_id[0] == 'T') {
      if (body.find(';') != std::string::npos) fail("discontinuous text-bound annotation " + ann_id);
      long long b = -1, e = -1;
      if (!(fields >> b >> e)) fail("malformed offsets for " + ann_id);
      const auto adu_type = parse_adu_type(type);
      if (!adu_type) fail("unknown ADU type '" + type + "'");
      const std::size_t bb = to_byte(b, line_no);
      const std::size_t eb = to_byte(e, line_no);
      if (bb < removed || eb > txt.size() || bb >= eb)
        throw ParseError(id + ": line " + std::to_string(line_no) + ": span of " + ann_id +
                         " out of bounds after header removal");
      AduSpan a{ann_id, *adu_type, bb - removed, eb - removed};
      if (tab2 != std::string::npos) {
        const std::string covered = line.substr(tab2 + 1);
        if (detail::collapse_whitespace(doc.text.substr(a.start, a.length())) !=
            detail::collapse_whitespace(covered))
          warn(warnings, id + ": " + ann_id + " covered text differs from annotation");
      }
      if (!ids.insert(ann_id).second) fail("duplicate id " + ann_id);
      doc.adus.push_back(std::move(a));
    } else if (ann_id[0] == 'R') {
      std::string a1, a2;
      if (!(fields >> a1 >> a2)) fail("malformed relation " + ann_id);
      auto arg = [&](const std::string& f) {
        const auto colon = f.find(':');
        if (colon == std::string::npos) fail("malformed relation argument '" + f + "'");
        return f.substr(colon + 1);
      };
      const auto label = parse_relation_label(type);
      if (!label) fail("unknown relation label '" + type + "'");
      relations.push_back({arg(a1), arg(a2), *label});
    } else {
      warn(warnings, id + ": line " + std::to_string(line_no) + ": ignored annotation " + ann_id);
    }
  }
  for (const auto& r : relations) {
    if (!ids.count(r.head) || !ids.count(r.tail))
      throw ParseError(id + ": relation references unknown ADU " + (ids.count(r.head) ? r.tail : r.head));
    if (r.head == r.tail) throw ParseError(id + ": self relation on " + r.head);
  }
  doc.relations = std::move(relations);
  std::sort(doc.adus.begin(), doc.adus.end(),
            [](const AduSpan& x, const AduSpan& y) { return std::tie(x.start, x.end) < std::tie(y.start, y.end); });
  build_sections(doc, warnings);
  return doc;
}

// Orders ids so that embedded digit runs compare numerically ("A2" < "A10").
inline bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      std::string_view na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return a.size() - i < b.size() - j;
  return a < b;
}

// Ids excluded from the corpus; A28's annotations do not parse.
inline const std::set<std::string>& excluded_documents() {
  static const std::set<std::string> ids{"A28"};
  return ids;
}

// Reads every `<id>.ann`/`<id>.txt` pair in `dir`, in natural id order.
inline std::vector<Document> parse_corpus(const std::filesystem::path& dir, Warnings* warnings = nullptr) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ParseError("corpus directory not found: " + dir.string());
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".ann") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) { return natural_less(a, b); });
  std::vector<Document> docs;
  for (const auto& id : ids) {
    if (excluded_documents().count(id)) continue;
    const fs::path txt = dir / (id + ".txt");
    if (!fs::exists(txt)) throw ParseError(id + ": missing text file");
    docs.push_back(parse_document(id, detail::read_file(txt), detail::read_file(dir / (id + ".ann")), warnings));
  }
  return docs;
}

struct Split {
  std::vector<Document> train;
  std::vector<Document> test;
};

inline constexpr std::size_t kTrainDocuments = 30;

inline Split make_split(std::vector<Document> docs) {
  if (docs.size() <= kTrainDocuments)
    throw Error("split needs more than " + std::to_string(kTrainDocuments) + " documents, got " +
                std::to_string(docs.size()));
  std::stable_sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return natural_less(a.id, b.id); });
  Split s;
  s.train.assign(std::make_move_iterator(docs.begin()),
                 std::make_move_iterator(docs.begin() + kTrainDocuments));
  s.test.assign(std::make_move_iterator(docs.begin() + kTrainDocuments), std::make_move_iterator(docs.end()));
  return s;
}

// ---------------------------------------------------------------------------
// parts_of_same merging

struct MergeResult {
  std::vector<MergedAdu> adus;      // sorted by first fragment start
  std::vector<Relation> relations;  // parts_of_same removed, endpoints rewritten
};

inline MergeResult merge_parts_of_same(const std::vector<AduSpan>& adus, const std::vector<Relation>& relations,
                                       Warnings* warnings = nullptr) {
  const std::size_t n = adus.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(adus[i].id, i);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& r : relations) {
    if (r.label != RelationLabel::parts_of_same) continue;
    auto h = index.find(r.head), t = index.find(r.tail);
    if (h == index.end() || t == index.end()) continue;
    const auto a = find(h->second), b = find(t->second);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }

  auto by_start = [](const AduSpan& x, const AduSpan& y) {
    return std::tie(x.start, x.end, x.id) < std::tie(y.start, y.end, y.id);
  };
  std::map<std::size_t, std::vector<AduSpan>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(adus[i]);

  MergeResult out;
  std::map<std::string, std::string> rep;
  for (auto& [root, frags] : groups) {
    std::sort(frags.begin(), frags.end(), by_start);
    MergedAdu m;
    m.id = frags.front().id;
    m.type = frags.front().type;
    for (const auto& f : frags) {
      if (f.type != m.type)
        warn(warnings, "parts_of_same joins " + std::string(to_string(f.type)) + " fragment " + f.id + " to " +
                           std::string(to_string(m.type)) + " unit " + m.id);
      rep[f.id] = m.id;
    }
    m.fragments = std::move(frags);
    out.adus.push_back(std::move(m));
  }
  std::sort(out.adus.begin(), out.adus.end(),
            [&](const MergedAdu& x, const MergedAdu& y) { return by_start(x.fragments.front(), y.fragments.front()); });

  std::set<std::tuple<std::string, std::string, int>> seen;
  for (const auto& r : relations) {
    if (r.label == RelationLabel::parts_of_same) continue;
    auto h = rep.find(r.head), t = rep.find(r.tail);
    if (h == rep.end() || t == rep.end()) continue;
    if (h->second == t->second) {
      warn(warnings, std::string(to_string(r.label)) + " relation inside merged unit " + h->second + " dropped");
      continue;
    }
    if (seen.emplace(h->second, t->second, static_cast<int>(r.label)).second)
      out.relations.push_back({h->second, t->second, r.label});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

struct LabelStats {
  std::array<std::size_t, kNumAduTypes> adus{};
  std::array<std::size_t, kNumRelationLabels> relations{};

  std::size_t adu(AduType t) const { return adus[static_cast<int>(t)]; }
  std::size_t relation(RelationLabel l) const { return relations[static_cast<int>(l)]; }
  friend bool operator==(const LabelStats&, const LabelStats&) = default;
};

// Counts document-level annotations, i.e. before cross-section relations are
// dropped.
inline LabelStats label_stats(const std::vector<Document>& docs) {
  LabelStats s;
  for (const auto& d : docs) {
    for (const auto& a : d.adus) ++s.adus[static_cast<int>(a.type)];
    for (const auto& r : d.relations) ++s.relations[static_cast<int>(r.label)];
  }
  return s;
}

inline LabelStats operator+(LabelStats a, const LabelStats& b) {
  for (int i = 0; i < kNumAduTypes; ++i) a.adus[i] += b.adus[i];
  for (int i = 0; i < kNumRelationLabels; ++i) a.relations[i] += b.relations[i];
  return a;
}

// Label counts of the published Sci-Arg release after the split above
// (A28 excluded).
struct ReferenceCounts {
  LabelStats train{{2563, 4608, 3346}, {4426, 551, 36, 1000}};
  LabelStats test{{661, 1241, 858}, {1260, 133, 3, 269}};
  std::size_t train_docs = 30;
  std::size_t test_docs = 9;
};

inline nlohmann::json to_json(const LabelStats& s) {
  nlohmann::json j;
  for (int i = 0; i < kNumAduTypes; ++i) j["adus"][std::string(to_string(static_cast<AduType>(i)))] = s.adus[i];
  for (int i = 0; i < kNumRelationLabels; ++i)
    j["relations"][std::string(to_string(static_cast<RelationLabel>(i)))] = s.relations[i];
  return j;
}

// ---------------------------------------------------------------------------
// JSON lines interchange (one section per line)

inline nlohmann::json to_json(const AduSpan& a) {
  return {{"id", a.id}, {"type", to_string(a.type)}, {"start", a.start}, {"end", a.end}};
}

inline nlohmann::json to_json(const Relation& r) {
  return {{"head", r.head}, {"tail", r.tail}, {"label", to_string(r.label)}};
}

inline AduSpan adu_from_json(const nlohmann::json& j) {
  const auto t = parse_adu_type(j.at("type").get<std::string>());
  if (!t) throw ParseError("unknown ADU type " + j.at("type").dump());
  AduSpan a{j.at("id").get<std::string>(), *t, j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
  if (a.start >= a.end) throw ParseError("empty ADU span " + a.id);
  return a;
}

inline Relation relation_from_json(const nlohmann::json& j) {
  const auto l = parse_relation_label(j.at("label").get<std::string>());
  if (!l) throw ParseError("unknown relation label " + j.at("label").dump());
  return {j.at("head").get<std::string>(), j.at("tail").get<std::string>(), *l};
}

inline nlohmann::json to_json(const Section& s) {
  nlohmann::json j{{"doc_id", s.doc_id},
                   {"section_index", s.index},
                   {"char_start", s.char_start},
                   {"char_end", s.char_end},
                   {"text", s.text}};
  j["adus"] = nlohmann::json::array();
  for (const auto& a : s.adus) j["adus"].push_back(to_json(a));
  j["relations"] = nlohmann::json::array();
  for (const auto& r : s.relations) j["relations"].push_back(to_json(r));
  return j;
}

inline Section section_from_json(const nlohmann::json& j) {
  Section s;
  s.doc_id = j.at("doc_id").get<std::string>();
  s.index = j.at("section_index").get<std::size_t>();
  s.char_start = j.at("char_start").get<std::size_t>();
  s.char_end = j.at("char_end").get<std::size_t>();
  s.text = j.at("text").get<std::string>();
  if (s.char_end < s.char_start || s.char_end - s.char_start != s.text.size())
    throw ParseError(s.doc_id + "/" + std::to_string(s.index) + ": range does not match text length");
  for (const auto& a : j.at("adus")) {
    auto adu = adu_from_json(a);
    if (adu.start < s.char_start || adu.end > s.char_end)
      throw ParseError(s.doc_id + "/" + std::to_string(s.index) + ": ADU " + adu.id + " outside section");
    s.adus.push_back(std::move(adu));
  }
  for (const auto& r : j.at("relations")) {
    auto rel = relation_from_json(r);
    if (!s.find_adu(rel.head) || !s.find_adu(rel.tail))
      throw ParseError(s.doc_id + "/" + std::to_string(s.index) + ": relation endpoint not in section");
    s.relations.push_back(std::move(rel));
  }
  return s;
}

inline void write_sections_jsonl(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& d : docs)
    for (const auto& s : d.sections) out << to_json(s).dump() << '\n';
}

inline std::vector<Section> read_sections_jsonl(std::istream& in) {
  std::vector<Section> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(section_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Section> read_sections_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_sections_jsonl(in);
}

inline std::vector<Section> all_sections(const std::vector<Document>& docs) {
  std::vector<Section> out;
  for (const auto& d : docs) out.insert(out.end(), d.sections.begin(), d.sections.end());
  return out;
}

}  // namespace argmine
