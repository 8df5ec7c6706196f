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

// Oracles and fixtures shared by the unit tests and the acceptance binary.

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "argmine/adur.hpp"
#include "argmine/are.hpp"
#include "argmine/corpus.hpp"
#include "argmine/crf.hpp"
#include "argmine/nn/layers.hpp"
#include "argmine/pipeline.hpp"

namespace argmine::testing {

// ---------------------------------------------------------------------------
// Finite differences

inline constexpr double kFdStep = 1e-6;
inline constexpr double kGradTolerance = 1e-4;
// Gradients smaller than this are compared on an absolute scale.
inline constexpr double kGradFloor = 1e-3;

inline double grad_error(double analytic, double numeric) {
  return std::fabs(analytic - numeric) / std::max({std::fabs(analytic), std::fabs(numeric), kGradFloor});
}

inline double central_difference(double& x, const std::function<double()>& loss) {
  const double saved = x;
  x = saved + kFdStep;
  const double up = loss();
  x = saved - kFdStep;
  const double down = loss();
  x = saved;
  return (up - down) / (2 * kFdStep);
}

// Largest relative error between analytic gradients (already accumulated
// in `grads`) and central differences of `loss` over every entry of
// `values`.
inline double max_grad_error(std::vector<double>& values, const std::vector<double>& grads,
                             const std::function<double()>& loss) {
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    worst = std::max(worst, grad_error(grads[i], central_difference(values[i], loss)));
  return worst;
}

inline double max_param_error(const ParameterList& params, const std::function<double()>& loss) {
  double worst = 0.0;
  for (auto* p : params) worst = std::max(worst, max_grad_error(p->value.values(), p->grad.values(), loss));
  return worst;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (auto& v : m.values()) v = rng.uniform(-scale, scale);
  return m;
}

// Weighted sum used as a scalar loss over a layer output.
inline double weighted_sum(const Matrix& y, const Matrix& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
  return s;
}

// ---------------------------------------------------------------------------
// Brute-force CRF

struct BruteForceCrf {
  double log_partition = kNegInf;
  std::vector<int> best;
  double best_score = kNegInf;
};

inline BruteForceCrf brute_force(const Crf& crf, const Matrix& emissions) {
  const std::size_t n = emissions.rows(), L = crf.labels();
  BruteForceCrf out;
  std::size_t total = 1;
  for (std::size_t t = 0; t < n; ++t) total *= L;
  std::vector<int> path(n, 0);
  std::vector<double> scores;
  for (std::size_t code = 0; n > 0 && code < total; ++code) {
    std::size_t c = code;
    for (std::size_t t = n; t-- > 0;) {
      path[t] = static_cast<int>(c % L);
      c /= L;
    }
    const double s = crf.path_score(emissions, path);
    if (s == kNegInf) continue;
    scores.push_back(s);
    if (s > out.best_score) {
      out.best_score = s;
      out.best = path;
    }
  }
  out.log_partition = log_sum_exp(scores);
  return out;
}

// ---------------------------------------------------------------------------
// Random span sets

inline std::vector<TokenSpan> random_spans(std::size_t n, Rng& rng) {
  std::vector<TokenSpan> out;
  std::size_t t = 0;
  int id = 0;
  while (t < n) {
    t += rng.below(3);
    if (t >= n) break;
    const std::size_t len = 1 + rng.below(std::min<std::size_t>(5, n - t));
    out.push_back({t, t + len, static_cast<AduType>(rng.below(kNumAduTypes)), "s" + std::to_string(id++)});
    t += len;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus: marker tokens fix the ADU type, the connector between
// two ADUs fixes the relation.

inline const std::vector<std::string>& content_words() {
  static const std::vector<std::string> w{"protein", "signal",  "density", "lattice", "kernel",  "vector",
                                          "sample",  "cluster", "energy",  "surface", "texture", "motion",
                                          "network", "shader",  "mesh",    "camera",  "pixel",   "volume"};
  return w;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> w{"thus", "so", "indeed", "then", "overall"};
  return w;
}

inline std::string_view type_marker(AduType t) {
  switch (t) {
    case AduType::background_claim: return "reportedly";
    case AduType::own_claim: return "hereby";
    case AduType::data: return "measured";
  }
  return "";
}

inline std::vector<Section> synthetic_sections(std::size_t count, std::uint64_t seed,
                                               std::size_t sentences_per_section = 3) {
  Rng rng(seed);
  std::vector<Section> out;
  for (std::size_t k = 0; k < count; ++k) {
    Section s;
    s.doc_id = "syn" + std::to_string(k);
    s.index = 0;
    std::string& text = s.text;
    int next_id = 1;
    auto word = [&](const std::string& w) {
      if (!text.empty()) text += ' ';
      text += w;
    };
    auto adu = [&]() {
      const auto type = static_cast<AduType>(rng.below(kNumAduTypes));
      if (!text.empty()) text += ' ';
      const std::size_t start = text.size();
      text += type_marker(type);
      const std::size_t words = 2 + rng.below(3);
      for (std::size_t i = 0; i < words; ++i) word(content_words()[rng.below(content_words().size())]);
      AduSpan a{"T" + std::to_string(next_id++), type, start, text.size()};
      s.adus.push_back(a);
      return a.id;
    };
    for (std::size_t sent = 0; sent < sentences_per_section; ++sent) {
      const std::size_t fillers = rng.below(3);
      for (std::size_t i = 0; i < fillers; ++i) word(filler_words()[rng.below(filler_words().size())]);
      const std::string a = adu();
      const std::uint64_t pattern = rng.below(3);
      word(pattern == 0 ? "because" : pattern == 1 ? "however" : "and");
      const std::string b = adu();
      text += " .";
      if (pattern == 0) s.relations.push_back({b, a, RelationLabel::supports});
      if (pattern == 1) s.relations.push_back({b, a, RelationLabel::contradicts});
    }
    s.char_start = 0;
    s.char_end = text.size();
    out.push_back(std::move(s));
  }
  return out;
}

// Small model sizes that fit the synthetic task on one core.
inline AdurConfig small_adur_config() {
  AdurConfig c;
  c.lr = 0.01;
  c.dropout_io = 0.1;
  c.dropout_lstm = 0.0;
  c.lstm_layers = 1;
  c.lstm_hidden = 24;
  c.batch_size = 4;
  c.patience = 10;
  c.max_epochs = 60;
  c.folds = 1;
  return c;
}

inline AreConfig small_are_config() {
  AreConfig c;
  c.lr = 0.01;
  c.dropout_io = 0.1;
  c.dropout_lstm = 0.0;
  c.lstm_layers = 1;
  c.lstm_hidden = 16;
  c.cnn_filters = 16;
  c.ngram_sizes = {2, 3};
  c.proj_hidden = 32;
  c.window_k = 24;
  c.max_dist_d = 12;
  c.neg_factor = 100;
  c.batch_size = 16;
  c.patience = 25;
  c.max_epochs = 80;
  c.folds = 1;
  return c;
}

// ---------------------------------------------------------------------------
// Brat fixtures

inline std::string gate_header() {
  return "<?xml version='1.0' encoding='UTF-8'?>\n<Document xmlns:gate=\"http://www.gate.ac.uk\" name=\"x\">\n";
}

// Writes `<id>.txt` (header + body) and `<id>.ann` for ASCII bodies.
inline void write_brat(const std::filesystem::path& dir, const std::string& id, const std::string& body,
                       const std::vector<AduSpan>& adus, const std::vector<Relation>& relations) {
  std::filesystem::create_directories(dir);
  const std::string header = gate_header();
  std::ofstream(dir / (id + ".txt"), std::ios::binary) << header << body;
  std::ofstream ann(dir / (id + ".ann"), std::ios::binary);
  for (const auto& a : adus)
    ann << a.id << '\t' << to_string(a.type) << ' ' << header.size() + a.start << ' ' << header.size() + a.end << '\t'
        << body.substr(a.start, a.length()) << '\n';
  int r = 1;
  for (const auto& rel : relations)
    ann << 'R' << r++ << '\t' << to_string(rel.label) << " Arg1:" << rel.head << " Arg2:" << rel.tail << '\n';
}

// A corpus of `docs` synthetic documents, each built from `sections` synthetic
// sections joined under <H1> markers.
inline void write_synthetic_corpus(const std::filesystem::path& dir, std::size_t docs, std::size_t sections,
                                   std::uint64_t seed) {
  const auto pool = synthetic_sections(docs * sections, seed);
  for (std::size_t d = 0; d < docs; ++d) {
    std::string body;
    std::vector<AduSpan> adus;
    std::vector<Relation> rels;
    for (std::size_t k = 0; k < sections; ++k) {
      const Section& s = pool[d * sections + k];
      body += "<H1>";
      const std::size_t offset = body.size();
      body += s.text + "\n";
      std::map<std::string, std::string> rename;
      for (auto a : s.adus) {
        rename[a.id] = "T" + std::to_string(adus.size() + 1);
        adus.push_back({rename[a.id], a.type, a.start + offset, a.end + offset});
      }
      for (const auto& r : s.relations) rels.push_back({rename.at(r.head), rename.at(r.tail), r.label});
    }
    write_brat(dir, "A" + std::to_string(d + 1), body, adus, rels);
  }
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("argmine_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace argmine::testing
