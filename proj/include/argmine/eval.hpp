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

// Scoring: token-level and span-level ADU metrics, relation metrics over
// merged units, the detection / classification decomposition, paired
// bootstrap comparison and the relation error-feature report.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "argmine/common.hpp"
#include "argmine/corpus.hpp"
#include "argmine/graph.hpp"
#include "argmine/tagging.hpp"
#include "json.hpp"

namespace argmine {

// ---------------------------------------------------------------------------
// Reports

struct ClassScore {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  void finalize() {
    precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  bool has_support() const { return tp + fp + fn > 0; }
};

// Rows are gold labels, columns predictions; the last row/column is "none"
// (outside / unmatched / no relation).
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;

  explicit ConfusionMatrix(std::vector<std::string> names = {}) : labels(std::move(names)) {
    labels.push_back("none");
    counts.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
  }
  std::size_t none() const { return labels.size() - 1; }
  void add(std::optional<std::size_t> gold, std::optional<std::size_t> pred) {
    ++counts[gold.value_or(none())][pred.value_or(none())];
  }

  std::string csv() const {
    std::ostringstream out;
    out << "gold\\pred";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t r = 0; r < labels.size(); ++r) {
      out << labels[r];
      for (auto c : counts[r]) out << ',' << c;
      out << '\n';
    }
    return out.str();
  }
};

struct ScoreReport {
  std::vector<std::string> classes;
  std::vector<ClassScore> per_class;
  ClassScore micro;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;

  explicit ScoreReport(std::vector<std::string> names = {})
      : classes(names), per_class(names.size()), confusion(names) {}

  // Computes per-class, micro and macro figures from the raw counts. Macro
  // figures average over classes that occur in gold or prediction.
  void finalize() {
    micro = ClassScore{};
    double p = 0, r = 0, f = 0;
    std::size_t k = 0;
    for (auto& c : per_class) {
      c.finalize();
      micro.tp += c.tp;
      micro.fp += c.fp;
      micro.fn += c.fn;
      if (c.has_support()) {
        p += c.precision;
        r += c.recall;
        f += c.f1;
        ++k;
      }
    }
    micro.finalize();
    macro_precision = k ? p / static_cast<double>(k) : 0.0;
    macro_recall = k ? r / static_cast<double>(k) : 0.0;
    macro_f1 = k ? f / static_cast<double>(k) : 0.0;
  }

  const ClassScore& operator[](std::string_view name) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == name) return per_class[i];
    throw Error("no class " + std::string(name) + " in report");
  }

  ScoreReport& operator+=(const ScoreReport& o) {
    for (std::size_t i = 0; i < per_class.size(); ++i) {
      per_class[i].tp += o.per_class[i].tp;
      per_class[i].fp += o.per_class[i].fp;
      per_class[i].fn += o.per_class[i].fn;
    }
    for (std::size_t r = 0; r < confusion.counts.size(); ++r)
      for (std::size_t c = 0; c < confusion.counts.size(); ++c) confusion.counts[r][c] += o.confusion.counts[r][c];
    finalize();
    return *this;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      const auto& c = per_class[i];
      j["classes"][classes[i]] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn},
                                  {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
    }
    j["micro"] = {{"precision", micro.precision}, {"recall", micro.recall}, {"f1", micro.f1}};
    j["macro"] = {{"precision", macro_precision}, {"recall", macro_recall}, {"f1", macro_f1}};
    j["confusion"] = {{"labels", confusion.labels}, {"counts", confusion.counts}};
    return j;
  }

  std::string table(const std::string& title) const {
    std::ostringstream out;
    out << title << '\n';
    out << std::left << std::setw(20) << "" << std::right << std::setw(8) << "P" << std::setw(8) << "R"
        << std::setw(8) << "F1" << std::setw(8) << "TP" << std::setw(8) << "FP" << std::setw(8) << "FN" << '\n';
    out << std::fixed << std::setprecision(3);
    auto line = [&](const std::string& name, double p, double r, double f, std::optional<ClassScore> c) {
      out << std::left << std::setw(20) << name << std::right << std::setw(8) << p << std::setw(8) << r
          << std::setw(8) << f;
      if (c) out << std::setw(8) << c->tp << std::setw(8) << c->fp << std::setw(8) << c->fn;
      out << '\n';
    };
    for (std::size_t i = 0; i < classes.size(); ++i)
      line(classes[i], per_class[i].precision, per_class[i].recall, per_class[i].f1, per_class[i]);
    line("macro", macro_precision, macro_recall, macro_f1, std::nullopt);
    line("micro", micro.precision, micro.recall, micro.f1, micro);
    return out.str();
  }
};

inline std::vector<std::string> adu_class_names() {
  std::vector<std::string> out;
  for (int i = 0; i < kNumAduTypes; ++i) out.emplace_back(to_string(static_cast<AduType>(i)));
  return out;
}

// ---------------------------------------------------------------------------
// Token-level

// Per-token class ids (-1 = outside), scored per class. The outside label
// enters the average only when `include_outside` is set.
inline ScoreReport token_macro_f1(const std::vector<int>& gold, const std::vector<int>& pred,
                                  bool include_outside = false) {
  if (gold.size() != pred.size()) throw Error("token sequences differ in length");
  auto names = adu_class_names();
  if (include_outside) names.emplace_back("O");
  ScoreReport rep(names);
  const int outside = include_outside ? kNumAduTypes : -1;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int g = gold[i] < 0 ? outside : gold[i], p = pred[i] < 0 ? outside : pred[i];
    if (g == p) {
      if (g >= 0) ++rep.per_class[g].tp;
    } else {
      if (p >= 0) ++rep.per_class[p].fp;
      if (g >= 0) ++rep.per_class[g].fn;
    }
    rep.confusion.add(g >= 0 ? std::optional<std::size_t>(g) : std::nullopt,
                      p >= 0 ? std::optional<std::size_t>(p) : std::nullopt);
  }
  rep.finalize();
  return rep;
}

inline ScoreReport token_macro_f1(const TagSequence& gold, const TagSequence& pred, bool include_outside = false) {
  return token_macro_f1(token_classes(tag_indices(gold), gold.scheme), token_classes(tag_indices(pred), pred.scheme),
                        include_outside);
}

// ---------------------------------------------------------------------------
// Span matching

struct MatchMode {
  enum Kind { exact, weak } kind = exact;
  enum Denominator { shorter, longer } denominator = shorter;

  static MatchMode Exact() { return {exact, shorter}; }
  static MatchMode Weak(Denominator d = shorter) { return {weak, d}; }

  std::string name() const {
    if (kind == exact) return "exact";
    return denominator == shorter ? "weak(shorter)" : "weak(longer)";
  }
};

// A possibly non-contiguous unit being scored.
struct ScoredUnit {
  int type = 0;
  std::vector<std::pair<std::size_t, std::size_t>> fragments;  // sorted

  std::size_t start() const { return fragments.front().first; }
  std::size_t end() const { return fragments.back().second; }
  std::size_t length() const {
    std::size_t n = 0;
    for (const auto& [b, e] : fragments) n += e - b;
    return n;
  }
};

inline ScoredUnit to_unit(const AduSpan& a) { return {static_cast<int>(a.type), {{a.start, a.end}}}; }

inline ScoredUnit to_unit(const MergedAdu& m) {
  ScoredUnit u{static_cast<int>(m.type), {}};
  for (const auto& f : m.fragments) u.fragments.emplace_back(f.start, f.end);
  std::sort(u.fragments.begin(), u.fragments.end());
  return u;
}

template <typename T>
std::vector<ScoredUnit> to_units(const std::vector<T>& items) {
  std::vector<ScoredUnit> out;
  out.reserve(items.size());
  for (const auto& i : items) out.push_back(to_unit(i));
  return out;
}

inline std::size_t overlap(const ScoredUnit& a, const ScoredUnit& b) {
  std::size_t n = 0;
  for (const auto& [ab, ae] : a.fragments)
    for (const auto& [bb, be] : b.fragments) {
      const std::size_t lo = std::max(ab, bb), hi = std::min(ae, be);
      if (hi > lo) n += hi - lo;
    }
  return n;
}

// Boundary test only; type agreement is checked by the caller.
inline bool boundaries_match(const ScoredUnit& gold, const ScoredUnit& pred, const MatchMode& mode) {
  if (mode.kind == MatchMode::exact) return gold.fragments == pred.fragments;
  const std::size_t ov = overlap(gold, pred);
  const std::size_t denom = mode.denominator == MatchMode::shorter ? std::min(gold.length(), pred.length())
                                                                   : std::max(gold.length(), pred.length());
  return ov > 0 && 2 * ov >= denom;
}

// Greedy one-to-one matching. Gold units are visited by start offset; each
// takes the unmatched matching prediction with the largest overlap, ties
// going to the earliest-starting prediction.
inline std::vector<std::pair<std::size_t, std::size_t>> match_units(const std::vector<ScoredUnit>& gold,
                                                                    const std::vector<ScoredUnit>& pred,
                                                                    const MatchMode& mode, bool require_type) {
  std::vector<std::size_t> order(gold.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(gold[a].start(), gold[a].end(), a) < std::make_tuple(gold[b].start(), gold[b].end(), b);
  });
  std::vector<char> used(pred.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t gi : order) {
    std::optional<std::size_t> best;
    std::size_t best_ov = 0;
    for (std::size_t pi = 0; pi < pred.size(); ++pi) {
      if (used[pi]) continue;
      if (require_type && pred[pi].type != gold[gi].type) continue;
      if (!boundaries_match(gold[gi], pred[pi], mode)) continue;
      const std::size_t ov = overlap(gold[gi], pred[pi]);
      if (!best || ov > best_ov ||
          (ov == best_ov && std::make_pair(pred[pi].start(), pi) < std::make_pair(pred[*best].start(), *best))) {
        best = pi;
        best_ov = ov;
      }
    }
    if (best) {
      used[*best] = 1;
      out.emplace_back(gi, *best);
    }
  }
  return out;
}

// Span-level P/R/F1 per ADU class. The confusion matrix comes from a
// type-agnostic matching so that label errors on found spans show up
// off-diagonal.
inline ScoreReport span_f1(const std::vector<ScoredUnit>& gold, const std::vector<ScoredUnit>& pred,
                           const MatchMode& mode) {
  ScoreReport rep(adu_class_names());
  const auto matched = match_units(gold, pred, mode, true);
  std::vector<std::size_t> gold_n(kNumAduTypes, 0), pred_n(kNumAduTypes, 0), tp(kNumAduTypes, 0);
  for (const auto& g : gold) ++gold_n[g.type];
  for (const auto& p : pred) ++pred_n[p.type];
  for (const auto& [gi, pi] : matched) ++tp[gold[gi].type];
  for (int c = 0; c < kNumAduTypes; ++c) {
    rep.per_class[c].tp = tp[c];
    rep.per_class[c].fp = pred_n[c] - tp[c];
    rep.per_class[c].fn = gold_n[c] - tp[c];
  }
  const auto any = match_units(gold, pred, mode, false);
  std::vector<char> g_used(gold.size(), 0), p_used(pred.size(), 0);
  for (const auto& [gi, pi] : any) {
    g_used[gi] = p_used[pi] = 1;
    rep.confusion.add(static_cast<std::size_t>(gold[gi].type), static_cast<std::size_t>(pred[pi].type));
  }
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (!g_used[i]) rep.confusion.add(static_cast<std::size_t>(gold[i].type), std::nullopt);
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (!p_used[i]) rep.confusion.add(std::nullopt, static_cast<std::size_t>(pred[i].type));
  rep.finalize();
  return rep;
}

template <typename T>
ScoreReport span_f1(const std::vector<T>& gold, const std::vector<T>& pred, const MatchMode& mode) {
  return span_f1(to_units(gold), to_units(pred), mode);
}

// ---------------------------------------------------------------------------
// Relations

inline const std::vector<RelationLabel>& scored_relation_labels() {
  static const std::vector<RelationLabel> labels{RelationLabel::supports, RelationLabel::contradicts};
  return labels;
}

inline std::vector<std::string> relation_class_names() {
  std::vector<std::string> out;
  for (auto l : scored_relation_labels()) out.emplace_back(to_string(l));
  return out;
}

inline std::optional<std::size_t> scored_index(RelationLabel l) {
  const auto& ls = scored_relation_labels();
  for (std::size_t i = 0; i < ls.size(); ++i)
    if (ls[i] == l) return i;
  return std::nullopt;
}

// Maps predicted unit ids to gold unit ids using the span matching rule.
inline std::map<std::string, std::string> align_units(const std::vector<MergedAdu>& gold,
                                                      const std::vector<MergedAdu>& pred, const MatchMode& mode) {
  std::map<std::string, std::string> out;
  for (const auto& [gi, pi] : match_units(to_units(gold), to_units(pred), mode, true))
    out.emplace(pred[pi].id, gold[gi].id);
  return out;
}

struct RelationOutcome {
  enum Kind { tp, fp, fn } kind = tp;
  Relation relation;  // in pred ids for tp/fp, gold ids for fn
};

struct RelationScore {
  ScoreReport report{relation_class_names()};
  std::vector<RelationOutcome> outcomes;
};

// contradicts is symmetric, so its pairs are compared without orientation.
inline std::pair<std::string, std::string> relation_pair_key(const std::string& head, const std::string& tail,
                                                             RelationLabel label) {
  if (label == RelationLabel::contradicts && tail < head) return {tail, head};
  return {head, tail};
}

namespace detail {

// Ordered gold pair -> label; contradicts is entered in both orientations.
inline std::map<std::pair<std::string, std::string>, RelationLabel> gold_pair_labels(const ArgumentGraph& gold) {
  std::map<std::pair<std::string, std::string>, RelationLabel> out;
  for (const auto& r : gold.relations) {
    if (!scored_index(r.label)) continue;
    out.emplace(std::make_pair(r.head, r.tail), r.label);
  }
  for (const auto& r : gold.relations)
    if (r.label == RelationLabel::contradicts) out.emplace(std::make_pair(r.tail, r.head), r.label);
  return out;
}

}  // namespace detail

// Micro-averaged relation scores over supports and contradicts. A predicted
// relation is correct iff both endpoints align to gold units joined by a
// gold relation with the same label.
inline RelationScore score_relations(const ArgumentGraph& gold, const ArgumentGraph& pred, const MatchMode& mode) {
  RelationScore out;
  auto& rep = out.report;
  const auto align = align_units(gold.adus, pred.adus, mode);
  using Key = std::tuple<std::string, std::string, RelationLabel>;
  std::map<Key, std::pair<bool, Relation>> gold_keys;  // -> (matched, gold relation)
  for (const auto& r : gold.relations) {
    if (!scored_index(r.label)) continue;
    const auto [h, t] = relation_pair_key(r.head, r.tail, r.label);
    gold_keys.emplace(Key{h, t, r.label}, std::make_pair(false, r));
  }
  const auto gold_pairs = detail::gold_pair_labels(gold);
  std::set<std::pair<std::string, std::string>> seen_pairs;
  for (const auto& r : pred.relations) {
    const auto cls = scored_index(r.label);
    if (!cls) continue;
    auto h = align.find(r.head), t = align.find(r.tail);
    bool hit = false;
    if (h != align.end() && t != align.end()) {
      const auto [kh, kt] = relation_pair_key(h->second, t->second, r.label);
      auto it = gold_keys.find(Key{kh, kt, r.label});
      if (it != gold_keys.end() && !it->second.first) {
        it->second.first = true;
        hit = true;
      }
      auto gp = gold_pairs.find({h->second, t->second});
      rep.confusion.add(gp == gold_pairs.end() ? std::nullopt : scored_index(gp->second), cls);
      seen_pairs.emplace(h->second, t->second);
    } else {
      rep.confusion.add(std::nullopt, cls);
    }
    if (hit) {
      ++rep.per_class[*cls].tp;
      out.outcomes.push_back({RelationOutcome::tp, r});
    } else {
      ++rep.per_class[*cls].fp;
      out.outcomes.push_back({RelationOutcome::fp, r});
    }
  }
  for (const auto& [key, state] : gold_keys) {
    if (state.first) continue;
    const auto& [h, t, label] = key;
    ++rep.per_class[*scored_index(label)].fn;
    out.outcomes.push_back({RelationOutcome::fn, state.second});
    const bool seen = seen_pairs.count({h, t}) || (label == RelationLabel::contradicts && seen_pairs.count({t, h}));
    if (!seen) rep.confusion.add(scored_index(label), std::nullopt);
  }
  rep.finalize();
  return out;
}

inline ScoreReport relation_f1(const ArgumentGraph& gold, const ArgumentGraph& pred, const MatchMode& mode) {
  return score_relations(gold, pred, mode).report;
}

// parts_of_same scored on its own, over unmerged fragments and unordered
// fragment pairs.
inline ScoreReport parts_of_same_f1(const ArgumentGraph& gold, const ArgumentGraph& pred, const MatchMode& mode) {
  ScoreReport rep({std::string(to_string(RelationLabel::parts_of_same))});
  std::map<std::string, std::string> align;
  for (const auto& [gi, pi] : match_units(to_units(gold.fragments), to_units(pred.fragments), mode, true))
    align.emplace(pred.fragments[pi].id, gold.fragments[gi].id);
  auto key = [](std::string a, std::string b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); };
  std::map<std::pair<std::string, std::string>, bool> gold_keys;
  for (const auto& r : gold.fragment_relations) gold_keys.emplace(key(r.head, r.tail), false);
  std::set<std::pair<std::string, std::string>> pred_keys;
  for (const auto& r : pred.fragment_relations) pred_keys.insert(key(r.head, r.tail));
  for (const auto& [h, t] : pred_keys) {
    auto ah = align.find(h), at = align.find(t);
    bool hit = false;
    if (ah != align.end() && at != align.end()) {
      auto it = gold_keys.find(key(ah->second, at->second));
      if (it != gold_keys.end() && !it->second) hit = it->second = true;
    }
    hit ? ++rep.per_class[0].tp : ++rep.per_class[0].fp;
    rep.confusion.add(hit ? std::optional<std::size_t>(0) : std::nullopt, 0);
  }
  for (const auto& [k, matched] : gold_keys) {
    if (!matched) {
      ++rep.per_class[0].fn;
      rep.confusion.add(0, std::nullopt);
    }
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Detection vs. classification

struct Decomposition {
  ScoreReport detection{{"unit"}};
  ScoreReport classification;
};

namespace detail {

inline ScoreReport classify_pairs(const std::vector<std::string>& names,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& label_pairs) {
  ScoreReport rep(names);
  for (const auto& [g, p] : label_pairs) {
    if (g == p) {
      ++rep.per_class[g].tp;
    } else {
      ++rep.per_class[p].fp;
      ++rep.per_class[g].fn;
    }
    rep.confusion.add(g, p);
  }
  rep.finalize();
  return rep;
}

}  // namespace detail

// Detection scores spans with all classes collapsed; classification scores
// labels on the detection-matched pairs only.
inline Decomposition detection_vs_classification(const std::vector<ScoredUnit>& gold,
                                                 const std::vector<ScoredUnit>& pred, const MatchMode& mode) {
  Decomposition d;
  const auto matched = match_units(gold, pred, mode, false);
  d.detection.per_class[0].tp = matched.size();
  d.detection.per_class[0].fp = pred.size() - matched.size();
  d.detection.per_class[0].fn = gold.size() - matched.size();
  d.detection.finalize();
  std::vector<std::pair<std::size_t, std::size_t>> labels;
  for (const auto& [gi, pi] : matched)
    labels.emplace_back(static_cast<std::size_t>(gold[gi].type), static_cast<std::size_t>(pred[pi].type));
  d.classification = detail::classify_pairs(adu_class_names(), labels);
  return d;
}

// Relation variant: detection asks whether an aligned pair carries any
// scored relation; classification compares labels on detected pairs.
inline Decomposition detection_vs_classification(const ArgumentGraph& gold, const ArgumentGraph& pred,
                                                 const MatchMode& mode) {
  Decomposition d;
  const auto align = align_units(gold.adus, pred.adus, mode);
  const auto gold_pairs = detail::gold_pair_labels(gold);
  std::set<std::pair<std::string, std::string>> gold_keys;
  for (const auto& [pair, label] : gold_pairs) gold_keys.insert(relation_pair_key(pair.first, pair.second, label));
  std::set<std::pair<std::string, std::string>> used;
  std::vector<std::pair<std::size_t, std::size_t>> labels;
  std::size_t n_pred = 0;
  for (const auto& r : pred.relations) {
    if (!scored_index(r.label)) continue;
    ++n_pred;
    auto h = align.find(r.head), t = align.find(r.tail);
    if (h == align.end() || t == align.end()) continue;
    auto g = gold_pairs.find({h->second, t->second});
    if (g == gold_pairs.end()) continue;
    if (!used.insert(relation_pair_key(h->second, t->second, g->second)).second) continue;
    labels.emplace_back(*scored_index(g->second), *scored_index(r.label));
  }
  d.detection.per_class[0].tp = used.size();
  d.detection.per_class[0].fp = n_pred - used.size();
  d.detection.per_class[0].fn = gold_keys.size() - used.size();
  d.detection.finalize();
  d.classification = detail::classify_pairs(relation_class_names(), labels);
  return d;
}

// ---------------------------------------------------------------------------
// Paired bootstrap

struct BootstrapResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double p_value = 1.0;
  std::vector<double> scores_a;
  std::vector<double> scores_b;
};

// `score` maps a sample of section indices to the scores of systems A and B
// on that sample.
using PairedScoreFn = std::function<std::pair<double, double>(const std::vector<std::size_t>&)>;

inline constexpr std::size_t kSignFlipRounds = 10000;

// Draws n_samples subsets of sample_size sections (without replacement
// within a subset), scores both systems on each and tests the paired
// differences with a sign-flip randomization test.
inline BootstrapResult bootstrap_compare(const PairedScoreFn& score, std::size_t n_sections,
                                         std::size_t n_samples, std::size_t sample_size, Rng& rng) {
  if (sample_size > n_sections)
    throw Error("sample size " + std::to_string(sample_size) + " exceeds " + std::to_string(n_sections) +
                " sections");
  if (n_samples == 0 || sample_size == 0) throw Error("bootstrap needs positive sample counts");
  BootstrapResult res;
  std::vector<std::size_t> pool(n_sections);
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < sample_size; ++i) std::swap(pool[i], pool[i + rng.below(n_sections - i)]);
    std::vector<std::size_t> sample(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(sample_size));
    const auto [a, b] = score(sample);
    res.scores_a.push_back(a);
    res.scores_b.push_back(b);
  }
  const double n = static_cast<double>(n_samples);
  res.mean_a = std::accumulate(res.scores_a.begin(), res.scores_a.end(), 0.0) / n;
  res.mean_b = std::accumulate(res.scores_b.begin(), res.scores_b.end(), 0.0) / n;
  std::vector<double> diff(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) diff[i] = res.scores_b[i] - res.scores_a[i];
  const double observed = std::fabs(std::accumulate(diff.begin(), diff.end(), 0.0));
  std::size_t extreme = 0;
  for (std::size_t round = 0; round < kSignFlipRounds; ++round) {
    double s = 0.0;
    for (double d : diff) s += (rng.next() & 1) ? d : -d;
    if (std::fabs(s) >= observed - 1e-12) ++extreme;
  }
  res.p_value = static_cast<double>(extreme + 1) / static_cast<double>(kSignFlipRounds + 1);
  return res;
}

// ---------------------------------------------------------------------------
// Relation error features

inline const std::vector<std::string>& connector_lexicon() {
  static const std::vector<std::string> lex{"however", "but", "while", "in contrast", "though", "despite",
                                            "even though"};
  return lex;
}

struct RelationFeatures {
  std::string category;  // TP / FP / FN
  Relation relation;
  std::string connector;  // lexicon entry, BRACKETS or NONE
  std::string arg_types;  // "<head type>-><tail type>"
  bool same_sentence = false;
};

struct FeatureDistribution {
  std::size_t count = 0;
  std::map<std::string, std::size_t> connectors;
  std::map<std::string, std::size_t> arg_types;
  std::map<std::string, std::size_t> same_sentence;  // "true" / "false"
};

struct ErrorFeatureReport {
  std::map<std::string, FeatureDistribution> categories;
  std::vector<RelationFeatures> instances;

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (const auto& [name, d] : categories) {
      j[name] = {{"count", d.count},
                 {"connectors", d.connectors},
                 {"arg_types", d.arg_types},
                 {"same_sentence", d.same_sentence}};
    }
    return j;
  }
};

namespace detail {

inline bool is_terminal(std::string_view text, std::size_t i) {
  const char c = text[i];
  if (c != '.' && c != '!' && c != '?') return false;
  return i + 1 >= text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
}

inline std::string ascii_lower_copy(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || (c & 0x80); }

// Earliest lexicon phrase in text[b, e), longest phrase winning at equal
// positions.
inline std::optional<std::string> find_connector(const std::string& lower, std::size_t b, std::size_t e) {
  std::optional<std::pair<std::size_t, std::string>> best;
  for (const auto& phrase : connector_lexicon()) {
    std::size_t pos = lower.find(phrase, b);
    while (pos != std::string::npos && pos + phrase.size() <= e) {
      const bool left = pos == 0 || !word_char(lower[pos - 1]);
      const bool right = pos + phrase.size() >= lower.size() || !word_char(lower[pos + phrase.size()]);
      if (left && right) {
        if (!best || pos < best->first || (pos == best->first && phrase.size() > best->second.size()))
          best = std::make_pair(pos, phrase);
        break;
      }
      pos = lower.find(phrase, pos + 1);
    }
  }
  if (!best) return std::nullopt;
  return best->second;
}

}  // namespace detail

// Features of a unit pair in section text (offsets are document offsets,
// `offset` is the section's char_start).
inline RelationFeatures pair_features(const MergedAdu& head, const MergedAdu& tail, const std::string& text,
                                      std::size_t offset) {
  RelationFeatures f;
  f.arg_types = std::string(to_string(head.type)) + "->" + std::string(to_string(tail.type));
  const auto hu = to_unit(head), tu = to_unit(tail);
  const ScoredUnit& first = hu.start() <= tu.start() ? hu : tu;
  const ScoredUnit& second = hu.start() <= tu.start() ? tu : hu;
  const std::size_t a_begin = first.start() - offset, a_end = first.end() - offset;
  const std::size_t b_begin = second.start() - offset, b_end = second.end() - offset;

  std::size_t sent_start = a_begin;
  while (sent_start > 0 && !detail::is_terminal(text, sent_start - 1)) --sent_start;

  std::string lower = detail::ascii_lower_copy(text);
  std::optional<std::string> conn = detail::find_connector(lower, sent_start, a_begin);
  const std::size_t gap_b = std::min(a_end, b_begin), gap_e = std::max(a_end, b_begin);
  if (auto c = detail::find_connector(lower, gap_b, gap_e); c && !conn) conn = c;
  if (conn) {
    f.connector = *conn;
  } else {
    const std::string_view gap = std::string_view(text).substr(gap_b, gap_e - gap_b);
    f.connector = gap.find_first_of("()[]") != std::string_view::npos ? "BRACKETS" : "NONE";
  }

  const std::size_t lo = std::min(a_begin, b_begin), hi = std::max(a_end, b_end);
  f.same_sentence = true;
  for (std::size_t i = lo; i + 1 < hi; ++i) {
    if (detail::is_terminal(text, i)) {
      f.same_sentence = false;
      break;
    }
  }
  return f;
}

// Categorizes every scored relation as TP, FP or FN and collects connector,
// argument-type and same-sentence features for each category.
inline ErrorFeatureReport error_feature_report(const std::vector<ArgumentGraph>& pred,
                                               const std::vector<ArgumentGraph>& gold,
                                               const std::vector<Section>& sections, const MatchMode& mode) {
  ErrorFeatureReport rep;
  for (const char* c : {"TP", "FP", "FN"}) rep.categories[c];
  for (std::size_t k = 0; k < gold.size(); ++k) {
    const auto scored = score_relations(gold[k], pred[k], mode);
    const Section& s = sections[k];
    for (const auto& o : scored.outcomes) {
      const ArgumentGraph& g = o.kind == RelationOutcome::fn ? gold[k] : pred[k];
      const MergedAdu* h = g.find(o.relation.head);
      const MergedAdu* t = g.find(o.relation.tail);
      if (!h || !t) continue;
      RelationFeatures f = pair_features(*h, *t, s.text, s.char_start);
      f.relation = o.relation;
      f.category = o.kind == RelationOutcome::tp ? "TP" : o.kind == RelationOutcome::fp ? "FP" : "FN";
      auto& d = rep.categories[f.category];
      ++d.count;
      ++d.connectors[f.connector];
      ++d.arg_types[f.arg_types];
      ++d.same_sentence[f.same_sentence ? "true" : "false"];
      rep.instances.push_back(std::move(f));
    }
  }
  return rep;
}

}  // namespace argmine
