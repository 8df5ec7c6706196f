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

#pragma once

#include <functional>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "argmine/adur.hpp"
#include "argmine/are.hpp"
#include "argmine/eval.hpp"
#include "argmine/graph.hpp"
#include "json.hpp"

namespace argmine {

// Labels relation candidates. Wraps the trained ARE model; tests plug in
// oracles through the same interface.
struct RelationPredictor {
  std::size_t max_dist_d = 0;
  std::size_t window_k = 0;
  std::function<AreLabel(const AreSection&, const RelationCandidate&)> classify;
};

inline RelationPredictor model_predictor(const AreModel& model) {
  return {model.config().max_dist_d, model.config().window_k,
          [&model](const AreSection& s, const RelationCandidate& c) {
            return model.predict(candidate_features(s, c));
          }};
}

inline std::vector<Relation> predict_relations(const RelationPredictor& predictor, const AreSection& s,
                                               Warnings* warnings = nullptr) {
  std::vector<Relation> out;
  std::set<std::pair<std::string, std::string>> contradicting;
  for (const auto& c : generate_candidates(s.spans, s.tokens.size(), predictor.max_dist_d, predictor.window_k,
                                           warnings)) {
    auto r = to_relation(c, predictor.classify(s, c));
    if (!r) continue;
    // Both orders of a contradicting pair are classified; keep one.
    if (r->label == RelationLabel::contradicts &&
        !contradicting.insert(relation_pair_key(r->head, r->tail, r->label)).second)
      continue;
    out.push_back(std::move(*r));
  }
  return out;
}

inline std::vector<Relation> predict_relations(const AreModel& model, const AreSection& s,
                                               Warnings* warnings = nullptr) {
  return predict_relations(model_predictor(model), s, warnings);
}

// ADUR, then ARE over the recognised units, then merging. With `gold_adus`
// the ADUR step is skipped and the given units are used instead.
inline ArgumentGraph run_pipeline(const AdurModel& adur, const RelationPredictor& are, const Section& section,
                                  const EmbeddingSource& source, const std::vector<AduSpan>* gold_adus = nullptr,
                                  Warnings* warnings = nullptr) {
  AreSection s;
  s.section = section;
  s.tokens = tokenize(section);
  if (s.tokens.size() == 0) return make_graph(section.doc_id, section.index, {}, {});
  s.embeddings = source.embed(s.tokens);
  std::vector<AduSpan> adus;
  if (gold_adus) {
    adus = *gold_adus;
  } else {
    adus = spans_to_adus(decode_token_spans(adur.predict_tags(s.embeddings), adur.tag_set().scheme()),
                         s.tokens.tokens);
  }
  if (adus.empty()) return make_graph(section.doc_id, section.index, {}, {});
  s.spans = align_spans(s.tokens.tokens, adus, warnings);
  s.adu_tags = encode_token_spans(s.tokens.size(), s.spans, Scheme::BIOUL);
  const auto relations = predict_relations(are, s, warnings);
  return make_graph(section.doc_id, section.index, std::move(adus), relations, warnings);
}

inline ArgumentGraph run_pipeline(const AdurModel& adur, const AreModel& are, const Section& section,
                                  const EmbeddingSource& source, const std::vector<AduSpan>* gold_adus = nullptr,
                                  Warnings* warnings = nullptr) {
  return run_pipeline(adur, model_predictor(are), section, source, gold_adus, warnings);
}

struct SectionResult {
  std::string doc_id;
  std::size_t section_index = 0;
  std::optional<ArgumentGraph> graph;
  std::string error;
};

struct CorpusRun {
  std::vector<SectionResult> results;

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& r : results) n += r.graph ? 0 : 1;
    return n;
  }

  std::vector<ArgumentGraph> graphs() const {
    std::vector<ArgumentGraph> out;
    for (const auto& r : results)
      if (r.graph) out.push_back(*r.graph);
    return out;
  }

  // One line per section: the graph, or an error record.
  void write_jsonl(std::ostream& out) const {
    for (const auto& r : results) {
      if (r.graph) {
        out << to_json(*r.graph).dump() << '\n';
      } else {
        out << nlohmann::json{{"doc_id", r.doc_id}, {"section_index", r.section_index}, {"error", r.error}}.dump()
            << '\n';
      }
    }
  }
};

// Runs every section independently; a failing section yields an error
// record and does not affect the others. Results keep the input order.
inline CorpusRun run_corpus(const AdurModel& adur, const RelationPredictor& are, const std::vector<Section>& sections,
                            const EmbeddingSource& source, bool gold_adus = false, std::size_t threads = 1) {
  CorpusRun run;
  run.results.resize(sections.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Section& s = sections[i];
      auto& r = run.results[i];
      r.doc_id = s.doc_id;
      r.section_index = s.index;
      try {
        r.graph = run_pipeline(adur, are, s, source, gold_adus ? &s.adus : nullptr);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, sections.size()));
  if (threads == 1) {
    work(0, sections.size());
    return run;
  }
  std::vector<std::future<void>> jobs;
  const std::size_t chunk = (sections.size() + threads - 1) / threads;
  for (std::size_t b = 0; b < sections.size(); b += chunk)
    jobs.push_back(std::async(std::launch::async, work, b, std::min(sections.size(), b + chunk)));
  for (auto& j : jobs) j.get();
  return run;
}

inline CorpusRun run_corpus(const AdurModel& adur, const AreModel& are, const std::vector<Section>& sections,
                            const EmbeddingSource& source, bool gold_adus = false, std::size_t threads = 1) {
  return run_corpus(adur, model_predictor(are), sections, source, gold_adus, threads);
}

// ---------------------------------------------------------------------------
// Corpus-level evaluation

struct CorpusEvaluation {
  MatchMode mode;
  std::size_t sections = 0;
  std::size_t missing_predictions = 0;
  ScoreReport tokens{adu_class_names()};
  ScoreReport spans{adu_class_names()};
  ScoreReport relations{relation_class_names()};
  ScoreReport parts_of_same{{std::string(to_string(RelationLabel::parts_of_same))}};
  Decomposition adu_decomposition{ScoreReport{{"unit"}}, ScoreReport{adu_class_names()}};
  Decomposition relation_decomposition{ScoreReport{{"unit"}}, ScoreReport{relation_class_names()}};

  nlohmann::json to_json() const {
    return {{"mode", mode.name()},
            {"sections", sections},
            {"missing_predictions", missing_predictions},
            {"adu_tokens", tokens.to_json()},
            {"adu_spans", spans.to_json()},
            {"relations", relations.to_json()},
            {"parts_of_same", parts_of_same.to_json()},
            {"adu_detection", adu_decomposition.detection.to_json()},
            {"adu_classification", adu_decomposition.classification.to_json()},
            {"relation_detection", relation_decomposition.detection.to_json()},
            {"relation_classification", relation_decomposition.classification.to_json()}};
  }

  std::string tables() const {
    std::string out;
    out += tokens.table("ADU tokens");
    out += '\n' + spans.table("ADU spans, " + mode.name());
    out += '\n' + relations.table("Relations, " + mode.name());
    out += '\n' + parts_of_same.table("parts_of_same, " + mode.name());
    out += '\n' + adu_decomposition.detection.table("ADU detection, " + mode.name());
    out += '\n' + adu_decomposition.classification.table("ADU classification on detected units");
    out += '\n' + relation_decomposition.detection.table("Relation detection, " + mode.name());
    out += '\n' + relation_decomposition.classification.table("Relation classification on detected pairs");
    return out;
  }
};

inline std::vector<int> section_token_classes(const TokenizedSection& tok, const std::vector<AduSpan>& adus) {
  return token_classes(align_spans(tok.tokens, adus), tok.size());
}

inline std::string section_key(const std::string& doc_id, std::size_t index) {
  return doc_id + "#" + std::to_string(index);
}

// Pairs every gold section with its prediction (an empty graph when the
// prediction is missing).
inline std::vector<ArgumentGraph> align_predictions(const std::vector<Section>& gold,
                                                    const std::vector<ArgumentGraph>& pred,
                                                    std::size_t* missing = nullptr) {
  std::map<std::string, const ArgumentGraph*> by_key;
  for (const auto& g : pred) by_key.emplace(section_key(g.doc_id, g.section_index), &g);
  std::vector<ArgumentGraph> out;
  std::size_t n_missing = 0;
  for (const auto& s : gold) {
    auto it = by_key.find(section_key(s.doc_id, s.index));
    if (it == by_key.end()) {
      ++n_missing;
      out.push_back(make_graph(s.doc_id, s.index, {}, {}));
    } else {
      out.push_back(*it->second);
    }
  }
  if (missing) *missing = n_missing;
  return out;
}

inline void add_decomposition(Decomposition& into, const Decomposition& d) {
  into.detection += d.detection;
  into.classification += d.classification;
}

inline CorpusEvaluation evaluate_corpus(const std::vector<Section>& gold, const std::vector<ArgumentGraph>& pred,
                                        const MatchMode& mode, bool include_outside = false) {
  CorpusEvaluation ev;
  ev.mode = mode;
  ev.sections = gold.size();
  const auto aligned = align_predictions(gold, pred, &ev.missing_predictions);
  std::vector<int> gold_tokens, pred_tokens;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    const auto& s = gold[k];
    const auto& p = aligned[k];
    const auto g = gold_graph(s);
    const auto tok = tokenize(s);
    const auto gt = section_token_classes(tok, s.adus);
    const auto pt = section_token_classes(tok, p.fragments);
    gold_tokens.insert(gold_tokens.end(), gt.begin(), gt.end());
    pred_tokens.insert(pred_tokens.end(), pt.begin(), pt.end());
    ev.spans += span_f1(s.adus, p.fragments, mode);
    ev.relations += relation_f1(g, p, mode);
    ev.parts_of_same += parts_of_same_f1(g, p, mode);
    add_decomposition(ev.adu_decomposition, detection_vs_classification(to_units(s.adus), to_units(p.fragments), mode));
    add_decomposition(ev.relation_decomposition, detection_vs_classification(g, p, mode));
  }
  ev.tokens = token_macro_f1(gold_tokens, pred_tokens, include_outside);
  return ev;
}

// Relation micro-F1 of one system on a subset of sections.
inline double relation_micro_f1(const std::vector<ArgumentGraph>& gold, const std::vector<ArgumentGraph>& pred,
                                const std::vector<std::size_t>& sample, const MatchMode& mode) {
  ScoreReport rep(relation_class_names());
  for (auto i : sample) rep += relation_f1(gold[i], pred[i], mode);
  return rep.micro.f1;
}

}  // namespace argmine
