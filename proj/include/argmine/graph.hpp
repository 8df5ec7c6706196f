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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"
#include "json.hpp"

namespace argmine {

// Argumentative structure of one section after parts_of_same merging.
// `fragments` and `fragment_relations` keep the unmerged view, which is
// needed to score parts_of_same on its own.
struct ArgumentGraph {
  std::string doc_id;
  std::size_t section_index = 0;
  std::vector<AduSpan> fragments;
  std::vector<Relation> fragment_relations;  // parts_of_same only
  std::vector<MergedAdu> adus;
  std::vector<Relation> relations;  // supports / contradicts over merged ids

  const MergedAdu* find(std::string_view id) const {
    for (const auto& a : adus)
      if (a.id == id) return &a;
    return nullptr;
  }
};

// Builds a graph from fragments and fragment-level relations.
inline ArgumentGraph make_graph(std::string doc_id, std::size_t section_index, std::vector<AduSpan> fragments,
                                const std::vector<Relation>& relations, Warnings* warnings = nullptr) {
  ArgumentGraph g;
  g.doc_id = std::move(doc_id);
  g.section_index = section_index;
  auto merged = merge_parts_of_same(fragments, relations, warnings);
  for (const auto& r : relations)
    if (r.label == RelationLabel::parts_of_same) g.fragment_relations.push_back(r);
  g.fragments = std::move(fragments);
  g.adus = std::move(merged.adus);
  for (auto& r : merged.relations) {
    if (r.label == RelationLabel::supports || r.label == RelationLabel::contradicts) g.relations.push_back(r);
  }
  return g;
}

inline ArgumentGraph gold_graph(const Section& s, Warnings* warnings = nullptr) {
  return make_graph(s.doc_id, s.index, s.adus, s.relations, warnings);
}

inline nlohmann::json to_json(const ArgumentGraph& g) {
  nlohmann::json j{{"doc_id", g.doc_id}, {"section_index", g.section_index}};
  j["fragments"] = nlohmann::json::array();
  for (const auto& a : g.fragments) j["fragments"].push_back(to_json(a));
  j["fragment_relations"] = nlohmann::json::array();
  for (const auto& r : g.fragment_relations) j["fragment_relations"].push_back(to_json(r));
  j["adus"] = nlohmann::json::array();
  for (const auto& m : g.adus) {
    nlohmann::json mj{{"id", m.id}, {"type", to_string(m.type)}};
    mj["fragments"] = nlohmann::json::array();
    for (const auto& f : m.fragments) mj["fragments"].push_back(f.id);
    j["adus"].push_back(mj);
  }
  j["relations"] = nlohmann::json::array();
  for (const auto& r : g.relations) j["relations"].push_back(to_json(r));
  return j;
}

// Rebuilds a graph from its serialized fragments and relations; merged units
// are recomputed rather than trusted.
inline ArgumentGraph graph_from_json(const nlohmann::json& j) {
  std::vector<AduSpan> fragments;
  for (const auto& a : j.at("fragments")) fragments.push_back(adu_from_json(a));
  std::vector<Relation> rels;
  for (const auto& r : j.at("fragment_relations")) rels.push_back(relation_from_json(r));
  ArgumentGraph g = make_graph(j.at("doc_id").get<std::string>(), j.at("section_index").get<std::size_t>(),
                               std::move(fragments), rels);
  g.relations.clear();
  for (const auto& r : j.at("relations")) {
    auto rel = relation_from_json(r);
    if (!g.find(rel.head) || !g.find(rel.tail))
      throw ParseError(g.doc_id + "/" + std::to_string(g.section_index) + ": relation endpoint " + rel.head + "/" +
                       rel.tail + " is not a merged unit");
    g.relations.push_back(std::move(rel));
  }
  return g;
}

inline void write_graphs_jsonl(std::ostream& out, const std::vector<ArgumentGraph>& graphs) {
  for (const auto& g : graphs) out << to_json(g).dump() << '\n';
}

// Lines carrying an "error" key (sections the pipeline failed on) are
// skipped and counted in `errors` when given.
inline std::vector<ArgumentGraph> read_graphs_jsonl(const std::filesystem::path& path, std::size_t* errors = nullptr) {
  if (errors) *errors = 0;
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<ArgumentGraph> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.is_object() && j.contains("error")) {
        if (errors) ++*errors;
        continue;
      }
      out.push_back(graph_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace argmine
