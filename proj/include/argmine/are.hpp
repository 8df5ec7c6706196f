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

// Argumentative relation extraction as ordered-pair classification.
//
// Each candidate pair is cut out of its section as a token window centred on
// the pair. Per window token three channels are concatenated: the frozen
// token embedding, a trainable embedding of the token's BIOUL ADU tag and a
// trainable embedding of its argument tag (B/I of head or tail, or O). The
// sequence runs through a BiLSTM, n-gram convolutions with max-pooling, a
// ReLU projection and a softmax over five labels.

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "argmine/adur.hpp"
#include "argmine/common.hpp"
#include "argmine/config.hpp"
#include "argmine/embed.hpp"
#include "argmine/nn/checkpoint.hpp"
#include "argmine/nn/layers.hpp"
#include "argmine/nn/optim.hpp"
#include "argmine/tagging.hpp"
#include "json.hpp"

namespace argmine {

enum class AreLabel { supports = 0, supports_rev = 1, contradicts = 2, parts_of_same = 3, no_relation = 4 };
inline constexpr std::size_t kNumAreLabels = 5;

inline std::string_view to_string(AreLabel l) {
  static constexpr std::array<std::string_view, kNumAreLabels> names{"supports", "supports_rev", "contradicts",
                                                                     "parts_of_same", "no_relation"};
  return names[static_cast<std::size_t>(l)];
}

inline std::optional<AreLabel> parse_are_label(std::string_view s) {
  for (std::size_t i = 0; i < kNumAreLabels; ++i)
    if (to_string(static_cast<AreLabel>(i)) == s) return static_cast<AreLabel>(i);
  return std::nullopt;
}

struct AreConfig {
  double lr = 0.0005;
  double dropout_io = 0.3061;
  double dropout_lstm = 0.4394;
  double grad_clip = 4.12;
  std::size_t lstm_layers = 4;
  std::size_t lstm_hidden = 430;
  std::size_t cnn_filters = 193;
  std::vector<std::size_t> ngram_sizes{3, 5, 7, 10};
  std::size_t proj_hidden = 860;
  std::size_t window_k = 479;
  std::size_t max_dist_d = 177;
  std::size_t neg_factor = 3;
  std::size_t batch_size = 128;
  std::size_t adu_tag_dim = 13;
  std::size_t arg_tag_dim = 3;
  std::size_t patience = 20;
  std::size_t max_epochs = 200;
  std::size_t folds = 5;
  std::uint64_t seed = 42;

  template <class F>
  void visit(F&& f) {
    f("lr", lr);
    f("dropout_io", dropout_io);
    f("dropout_lstm", dropout_lstm);
    f("grad_clip", grad_clip);
    f("lstm_layers", lstm_layers);
    f("lstm_hidden", lstm_hidden);
    f("cnn_filters", cnn_filters);
    f("ngram_sizes", ngram_sizes);
    f("proj_hidden", proj_hidden);
    f("window_k", window_k);
    f("max_dist_d", max_dist_d);
    f("neg_factor", neg_factor);
    f("batch_size", batch_size);
    f("adu_tag_dim", adu_tag_dim);
    f("arg_tag_dim", arg_tag_dim);
    f("patience", patience);
    f("max_epochs", max_epochs);
    f("folds", folds);
    f("seed", seed);
  }

  void validate() const {
    if (!(lr > 0) || !(grad_clip > 0)) throw ConfigError("are: lr and grad_clip must be positive");
    if (dropout_io < 0 || dropout_io >= 1 || dropout_lstm < 0 || dropout_lstm >= 1)
      throw ConfigError("are: dropout must be in [0, 1)");
    if (window_k <= max_dist_d) throw ConfigError("are: window_k must exceed max_dist_d");
    if (lstm_layers < 1 || lstm_hidden < 1 || cnn_filters < 1 || ngram_sizes.empty() || max_dist_d < 1 ||
        batch_size < 1 || adu_tag_dim < 1 || arg_tag_dim < 1 || patience < 1 || folds < 1 || max_epochs < 1)
      throw ConfigError("are: sizes must be positive");
    for (auto s : ngram_sizes)
      if (s < 1) throw ConfigError("are: ngram sizes must be positive");
  }
};

// ---------------------------------------------------------------------------
// Candidates

struct RelationCandidate {
  TokenSpan head;
  TokenSpan tail;
  std::size_t window_begin = 0;  // token range [window_begin, window_end)
  std::size_t window_end = 0;
  AreLabel label = AreLabel::no_relation;

  std::size_t window_size() const { return window_end - window_begin; }
};

// Token gap between the nearest boundaries of two spans; 0 when they touch
// or overlap.
inline std::size_t inner_distance(const TokenSpan& a, const TokenSpan& b) {
  const std::size_t lo_end = std::min(a.end, b.end);
  const std::size_t hi_begin = std::max(a.begin, b.begin);
  return hi_begin > lo_end ? hi_begin - lo_end : 0;
}

// Window of up to k tokens centred on the midpoint of the pair's outer
// boundaries, shifted to stay inside [0, n) and to cover both spans.
inline std::optional<std::pair<std::size_t, std::size_t>> pair_window(const TokenSpan& a, const TokenSpan& b,
                                                                       std::size_t n, std::size_t k) {
  const std::size_t lo = std::min(a.begin, b.begin), hi = std::max(a.end, b.end);
  if (hi - lo > k) return std::nullopt;
  const std::size_t len = std::min(k, n);
  const std::size_t centre2 = lo + hi;  // twice the midpoint
  std::size_t begin = centre2 >= len ? (centre2 - len) / 2 : 0;
  begin = std::min(begin, n - len);
  begin = std::min(begin, lo);
  if (begin + len < hi) begin = hi - len;
  return std::make_pair(begin, begin + len);
}

// Every ordered pair of distinct spans with inner distance below d.
inline std::vector<RelationCandidate> generate_candidates(const std::vector<TokenSpan>& spans, std::size_t n_tokens,
                                                          std::size_t d, std::size_t k,
                                                          Warnings* warnings = nullptr) {
  std::vector<RelationCandidate> out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    for (std::size_t j = 0; j < spans.size(); ++j) {
      if (i == j || inner_distance(spans[i], spans[j]) >= d) continue;
      const auto w = pair_window(spans[i], spans[j], n_tokens, k);
      if (!w) {
        warn(warnings, "pair " + spans[i].id + "/" + spans[j].id + " does not fit a " + std::to_string(k) +
                           "-token window; skipped");
        continue;
      }
      out.push_back({spans[i], spans[j], w->first, w->second, AreLabel::no_relation});
    }
  }
  return out;
}

struct LabeledPair {
  std::string head;
  std::string tail;
  AreLabel label = AreLabel::no_relation;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

// Adds the reversed instance of every relation: supports becomes
// supports_rev, the symmetric labels keep their label.
inline std::vector<LabeledPair> augment_relations(const std::vector<Relation>& relations) {
  std::vector<LabeledPair> out;
  for (const auto& r : relations) {
    switch (r.label) {
      case RelationLabel::supports:
        out.push_back({r.head, r.tail, AreLabel::supports});
        out.push_back({r.tail, r.head, AreLabel::supports_rev});
        break;
      case RelationLabel::contradicts:
        out.push_back({r.head, r.tail, AreLabel::contradicts});
        out.push_back({r.tail, r.head, AreLabel::contradicts});
        break;
      case RelationLabel::parts_of_same:
        out.push_back({r.head, r.tail, AreLabel::parts_of_same});
        out.push_back({r.tail, r.head, AreLabel::parts_of_same});
        break;
      case RelationLabel::semantically_same:
        break;  // cross-section only; never reaches a section
    }
  }
  return out;
}

// Uniform sample without replacement of min(factor * |positives|, pool)
// candidates from those whose pair (in either order) carries no relation.
// The selection keeps the candidates' original order.
inline std::vector<RelationCandidate> sample_negatives(const std::vector<RelationCandidate>& candidates,
                                                       const std::vector<LabeledPair>& positives, std::size_t factor,
                                                       Rng& rng) {
  std::set<std::pair<std::string, std::string>> related;
  for (const auto& p : positives) {
    related.emplace(p.head, p.tail);
    related.emplace(p.tail, p.head);
  }
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (!related.count({candidates[i].head.id, candidates[i].tail.id})) pool.push_back(i);
  const std::size_t quota = std::min(factor * positives.size(), pool.size());
  for (std::size_t i = 0; i < quota; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  pool.resize(quota);
  std::sort(pool.begin(), pool.end());
  std::vector<RelationCandidate> out;
  for (auto i : pool) {
    out.push_back(candidates[i]);
    out.back().label = AreLabel::no_relation;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sections and instances

inline constexpr int kArgTagVocab = 5;  // O, B-head, I-head, B-tail, I-tail

struct AreSection {
  Section section;
  TokenizedSection tokens;
  Matrix embeddings;
  std::vector<TokenSpan> spans;  // ADUs the candidates are built from
  std::vector<int> adu_tags;     // BIOUL over `spans`
};

inline std::shared_ptr<const AreSection> prepare_are_section(const Section& s, const EmbeddingSource& source,
                                                             const std::vector<AduSpan>& adus,
                                                             Warnings* warnings = nullptr) {
  auto out = std::make_shared<AreSection>();
  out->section = s;
  out->tokens = tokenize(s);
  out->embeddings = out->tokens.size() ? source.embed(out->tokens) : Matrix(0, source.dim());
  out->spans = align_spans(out->tokens.tokens, adus, warnings);
  out->adu_tags = encode_token_spans(out->tokens.size(), out->spans, Scheme::BIOUL);
  return out;
}

struct AreInstance {
  std::shared_ptr<const AreSection> section;
  RelationCandidate candidate;
};

// Channels for one candidate before the trainable embeddings are applied.
struct CandidateFeatures {
  Matrix tokens;  // window x d_tok
  std::vector<int> adu_tags;
  std::vector<int> arg_tags;
};

inline CandidateFeatures candidate_features(const AreSection& s, const RelationCandidate& c) {
  if (c.window_size() == 0) throw Error("candidate window is empty");
  if (c.window_end > s.tokens.size()) throw Error("candidate window exceeds section");
  CandidateFeatures f;
  f.tokens = nn::slice_rows(s.embeddings, c.window_begin, c.window_end);
  f.adu_tags.assign(s.adu_tags.begin() + static_cast<std::ptrdiff_t>(c.window_begin),
                    s.adu_tags.begin() + static_cast<std::ptrdiff_t>(c.window_end));
  f.arg_tags.assign(c.window_size(), 0);
  auto mark = [&](const TokenSpan& span, int b_tag) {
    for (std::size_t t = span.begin; t < span.end; ++t) {
      if (t < c.window_begin || t >= c.window_end) continue;
      f.arg_tags[t - c.window_begin] = t == span.begin ? b_tag : b_tag + 1;
    }
  };
  mark(c.head, 1);
  mark(c.tail, 3);
  return f;
}

// Positives (augmented gold pairs that survive the distance filter) plus
// sampled negatives for one section.
inline std::vector<AreInstance> build_training_instances(const std::shared_ptr<const AreSection>& s,
                                                         const AreConfig& config, Rng& rng,
                                                         Warnings* warnings = nullptr) {
  const auto candidates = generate_candidates(s->spans, s->tokens.size(), config.max_dist_d, config.window_k, warnings);
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    index.emplace(std::make_pair(candidates[i].head.id, candidates[i].tail.id), i);
  const auto augmented = augment_relations(s->section.relations);
  std::vector<AreInstance> out;
  std::set<std::pair<std::string, std::string>> used;
  for (const auto& p : augmented) {
    auto it = index.find({p.head, p.tail});
    if (it == index.end() || !used.emplace(p.head, p.tail).second) continue;
    AreInstance inst{s, candidates[it->second]};
    inst.candidate.label = p.label;
    out.push_back(std::move(inst));
  }
  for (auto& c : sample_negatives(candidates, augmented, config.neg_factor, rng)) out.push_back({s, std::move(c)});
  return out;
}

// ---------------------------------------------------------------------------
// Model

class AreModel {
 public:
  AreModel() = default;
  AreModel(AreConfig config, std::size_t embedding_dim)
      : config_(std::move(config)),
        embedding_dim_(embedding_dim),
        adu_emb_("are.adu_tags", static_cast<std::size_t>(TagSet(Scheme::BIOUL).size()), config_.adu_tag_dim),
        arg_emb_("are.arg_tags", kArgTagVocab, config_.arg_tag_dim),
        lstm_("are.lstm", feature_dim(), config_.lstm_hidden, config_.lstm_layers),
        conv_("are.cnn", 2 * config_.lstm_hidden, config_.ngram_sizes, config_.cnn_filters),
        hidden_("are.hidden", conv_.out_dim(), config_.proj_hidden ? config_.proj_hidden : 1),
        out_("are.out", config_.proj_hidden ? config_.proj_hidden : conv_.out_dim(), kNumAreLabels) {}

  void init(std::uint64_t seed) {
    Rng rng(seed);
    adu_emb_.init(rng);
    arg_emb_.init(rng);
    lstm_.init(rng);
    conv_.init(rng);
    hidden_.init(rng);
    out_.init(rng);
  }

  const AreConfig& config() const { return config_; }
  std::size_t embedding_dim() const { return embedding_dim_; }
  std::size_t feature_dim() const { return embedding_dim_ + config_.adu_tag_dim + config_.arg_tag_dim; }

  // [token embedding | ADU tag embedding | argument tag embedding] per token.
  Matrix features(const CandidateFeatures& f) const {
    return nn::hconcat(nn::hconcat(f.tokens, adu_emb_.forward(f.adu_tags)), arg_emb_.forward(f.arg_tags));
  }

  struct Cache {
    nn::DropoutMask token_mask, pooled_mask;
    Matrix x, lstm_out, pooled, hidden_pre, hidden_post;
    nn::BiLstmCache lstm;
    nn::ConvCache conv;
  };

  Matrix logits(const CandidateFeatures& f, bool train, Rng* rng, Cache& c) const {
    Matrix tok = train && rng ? nn::dropout(f.tokens, config_.dropout_io, true, *rng, c.token_mask) : f.tokens;
    if (!train || !rng) c.token_mask = {};
    c.x = nn::hconcat(nn::hconcat(tok, adu_emb_.forward(f.adu_tags)), arg_emb_.forward(f.arg_tags));
    c.lstm_out = lstm_.forward(c.x, c.lstm, config_.dropout_lstm, train, rng);
    Matrix pooled = conv_.forward(c.lstm_out, c.conv);
    c.pooled = train && rng ? nn::dropout(pooled, config_.dropout_io, true, *rng, c.pooled_mask) : pooled;
    if (!train || !rng) c.pooled_mask = {};
    if (config_.proj_hidden == 0) return out_.forward(c.pooled);
    c.hidden_pre = hidden_.forward(c.pooled);
    c.hidden_post = c.hidden_pre;
    for (auto& v : c.hidden_post.values()) v = v > 0 ? v : 0.0;
    return out_.forward(c.hidden_post);
  }

  void backward(const CandidateFeatures& f, const Cache& c, const Matrix& dlogits) {
    Matrix dpooled;
    if (config_.proj_hidden == 0) {
      dpooled = out_.backward(c.pooled, dlogits);
    } else {
      Matrix dh = out_.backward(c.hidden_post, dlogits);
      for (std::size_t i = 0; i < dh.size(); ++i)
        if (c.hidden_pre[i] <= 0) dh[i] = 0.0;
      dpooled = hidden_.backward(c.pooled, dh);
    }
    const Matrix dlstm = conv_.backward(c.conv, nn::dropout_backward(dpooled, c.pooled_mask));
    const Matrix dx = lstm_.backward(c.lstm, dlstm);
    const std::size_t d = embedding_dim_, a = config_.adu_tag_dim, g = config_.arg_tag_dim;
    Matrix d_adu(dx.rows(), a), d_arg(dx.rows(), g);
    for (std::size_t t = 0; t < dx.rows(); ++t) {
      for (std::size_t j = 0; j < a; ++j) d_adu(t, j) = dx(t, d + j);
      for (std::size_t j = 0; j < g; ++j) d_arg(t, j) = dx(t, d + a + j);
    }
    adu_emb_.backward(f.adu_tags, d_adu);
    arg_emb_.backward(f.arg_tags, d_arg);
  }

  std::vector<double> probabilities(const CandidateFeatures& f) const {
    Cache c;
    return nn::softmax(logits(f, false, nullptr, c).row(0));
  }

  AreLabel predict(const CandidateFeatures& f) const {
    const auto p = probabilities(f);
    return static_cast<AreLabel>(std::max_element(p.begin(), p.end()) - p.begin());
  }

  ParameterList parameters() {
    ParameterList out;
    for (auto* p : adu_emb_.parameters()) out.push_back(p);
    for (auto* p : arg_emb_.parameters()) out.push_back(p);
    for (auto* p : lstm_.parameters()) out.push_back(p);
    for (auto* p : conv_.parameters()) out.push_back(p);
    if (config_.proj_hidden) {
      for (auto* p : hidden_.parameters()) out.push_back(p);
    }
    for (auto* p : out_.parameters()) out.push_back(p);
    return out;
  }

  nlohmann::json metadata() const {
    return {{"kind", "are"}, {"embedding_dim", embedding_dim_}, {"config", config_to_json(config_)}};
  }

  void save(const std::filesystem::path& path) { nn::save_checkpoint(path, parameters(), metadata().dump()); }

  static AreModel load(const std::filesystem::path& path) {
    const auto data = nn::load_checkpoint(path);
    const auto meta = nlohmann::json::parse(data.metadata);
    if (meta.value("kind", "") != "are") throw nn::CheckpointVersionError(path.string() + " is not an ARE checkpoint");
    AreModel m(config_from_json<AreConfig>(meta.at("config")), meta.at("embedding_dim").get<std::size_t>());
    nn::assign_parameters(m.parameters(), data);
    return m;
  }

 private:
  AreConfig config_;
  std::size_t embedding_dim_ = 0;
  nn::EmbeddingTable adu_emb_;
  nn::EmbeddingTable arg_emb_;
  nn::BiLstm lstm_;
  nn::ConvMaxPool conv_;
  nn::Linear hidden_;
  nn::Linear out_;
};

inline AreLabel predict_are(const AreModel& model, const AreInstance& inst) {
  return model.predict(candidate_features(*inst.section, inst.candidate));
}

// Micro-F1 over the four relation labels; no_relation is the negative class.
inline ScoreReport evaluate_are_instances(const AreModel& model, const std::vector<AreInstance>& instances) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i + 1 < kNumAreLabels; ++i) names.emplace_back(to_string(static_cast<AreLabel>(i)));
  ScoreReport rep(names);
  const auto none = static_cast<std::size_t>(AreLabel::no_relation);
  for (const auto& inst : instances) {
    const auto g = static_cast<std::size_t>(inst.candidate.label);
    const auto p = static_cast<std::size_t>(predict_are(model, inst));
    if (g == p) {
      if (g != none) ++rep.per_class[g].tp;
    } else {
      if (p != none) ++rep.per_class[p].fp;
      if (g != none) ++rep.per_class[g].fn;
    }
    rep.confusion.add(g == none ? std::nullopt : std::optional<std::size_t>(g),
                      p == none ? std::nullopt : std::optional<std::size_t>(p));
  }
  rep.finalize();
  return rep;
}

struct AreTrainResult {
  AreModel model;
  TrainLog log;
};

inline AreTrainResult train_are(const std::vector<AreInstance>& train, const AreConfig& config,
                                const std::vector<AreInstance>& dev) {
  config.validate();
  if (dev.empty()) throw Error("train_are needs a non-empty dev set");
  if (train.empty()) throw Error("train_are needs training instances");
  AreTrainResult res{AreModel(config, train.front().section->embeddings.cols()), {}};
  AreModel& model = res.model;
  model.init(mix_seed(config.seed, 11));
  Rng rng(mix_seed(config.seed, 12));
  auto params = model.parameters();
  nn::Adam opt(params, config.lr);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  EarlyStopping stopper(config.patience);
  std::vector<Matrix> best = nn::snapshot(params);
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0.0;
    try {
      for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
        const std::size_t e = std::min(order.size(), b + config.batch_size);
        const double scale = 1.0 / static_cast<double>(e - b);
        opt.zero_grad();
        double loss = 0.0;
        for (std::size_t k = b; k < e; ++k) {
          const auto& inst = train[order[k]];
          const auto f = candidate_features(*inst.section, inst.candidate);
          AreModel::Cache cache;
          const Matrix logits = model.logits(f, true, &rng, cache);
          Matrix dlogits;
          loss += nn::softmax_cross_entropy(logits, {static_cast<std::size_t>(inst.candidate.label)}, &dlogits);
          dlogits *= scale;
          model.backward(f, cache, dlogits);
        }
        if (!std::isfinite(loss)) throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
        nn::clip_grad_norm(params, config.grad_clip);
        opt.step();
        epoch_loss += loss;
      }
    } catch (const NumericError&) {
      res.log.diverged = true;
      res.log.stopped_epoch = epoch;
      break;
    }
    const double dev_score = evaluate_are_instances(model, dev).micro.f1;
    res.log.epochs.push_back({epoch, epoch_loss / static_cast<double>(train.size()), dev_score});
    if (stopper.update(epoch, dev_score)) best = nn::snapshot(params);
    res.log.stopped_epoch = epoch;
    if (stopper.should_stop(epoch)) break;
  }
  nn::restore(params, best);
  res.log.best_epoch = stopper.best_epoch();
  res.log.best_dev_score = stopper.best();
  return res;
}

inline CrossValidation<AreTrainResult> cross_validate_are(const std::vector<std::vector<AreInstance>>& docs,
                                                          const AreConfig& config, std::size_t threads = 1) {
  return cross_validate_generic(docs, config, config.folds, train_are, threads);
}

// Predicted labels become relations between fragment ids; supports_rev(B, A)
// is emitted as supports(A, B).
inline std::optional<Relation> to_relation(const RelationCandidate& c, AreLabel label) {
  switch (label) {
    case AreLabel::supports: return Relation{c.head.id, c.tail.id, RelationLabel::supports};
    case AreLabel::supports_rev: return Relation{c.tail.id, c.head.id, RelationLabel::supports};
    case AreLabel::contradicts: return Relation{c.head.id, c.tail.id, RelationLabel::contradicts};
    case AreLabel::parts_of_same: return Relation{c.head.id, c.tail.id, RelationLabel::parts_of_same};
    case AreLabel::no_relation: return std::nullopt;
  }
  return std::nullopt;
}

inline nlohmann::json to_json(const AreInstance& inst) {
  const auto& c = inst.candidate;
  return {{"doc_id", inst.section->section.doc_id},
          {"section_index", inst.section->section.index},
          {"head", {{"id", c.head.id}, {"begin", c.head.begin}, {"end", c.head.end}}},
          {"tail", {{"id", c.tail.id}, {"begin", c.tail.begin}, {"end", c.tail.end}}},
          {"window", {c.window_begin, c.window_end}},
          {"label", to_string(c.label)}};
}

}  // namespace argmine
