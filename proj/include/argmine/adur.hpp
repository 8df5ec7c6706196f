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

// ADU recognition: frozen token embeddings -> BiLSTM -> linear emissions ->
// constrained linear-chain CRF, trained on the CRF negative log-likelihood
// with early stopping on dev token macro-F1.

#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "argmine/common.hpp"
#include "argmine/config.hpp"
#include "argmine/crf.hpp"
#include "argmine/embed.hpp"
#include "argmine/eval.hpp"
#include "argmine/nn/checkpoint.hpp"
#include "argmine/nn/layers.hpp"
#include "argmine/nn/optim.hpp"
#include "argmine/tagging.hpp"
#include "json.hpp"

namespace argmine {

struct AdurConfig {
  double lr = 0.005;
  double dropout_io = 0.5;
  double dropout_lstm = 0.4394;
  double grad_clip = 7.0;
  std::size_t patience = 20;
  std::size_t max_epochs = 200;
  std::size_t lstm_layers = 2;
  std::size_t lstm_hidden = 300;
  std::size_t batch_size = 8;
  std::string scheme = "BIOUL";
  std::size_t folds = 5;
  std::uint64_t seed = 42;

  template <class F>
  void visit(F&& f) {
    f("lr", lr);
    f("dropout_io", dropout_io);
    f("dropout_lstm", dropout_lstm);
    f("grad_clip", grad_clip);
    f("patience", patience);
    f("max_epochs", max_epochs);
    f("lstm_layers", lstm_layers);
    f("lstm_hidden", lstm_hidden);
    f("batch_size", batch_size);
    f("scheme", scheme);
    f("folds", folds);
    f("seed", seed);
  }

  Scheme tag_scheme() const {
    if (scheme == "BIOUL") return Scheme::BIOUL;
    if (scheme == "BIO2") return Scheme::BIO2;
    throw ConfigError("unknown tagging scheme " + scheme);
  }

  void validate() const {
    if (!(lr > 0) || !(grad_clip > 0)) throw ConfigError("adur: lr and grad_clip must be positive");
    if (dropout_io < 0 || dropout_io >= 1 || dropout_lstm < 0 || dropout_lstm >= 1)
      throw ConfigError("adur: dropout must be in [0, 1)");
    if (patience < 1 || lstm_layers < 1 || lstm_hidden < 1 || batch_size < 1 || folds < 1 || max_epochs < 1)
      throw ConfigError("adur: sizes must be positive");
    (void)tag_scheme();
  }
};

// A section ready for the tagger: tokens, frozen embeddings and gold tags.
struct TaggedSection {
  Section section;
  TokenizedSection tokens;
  Matrix embeddings;
  std::vector<int> gold;
};

inline TaggedSection prepare_tagged(const Section& s, const EmbeddingSource& source, Scheme scheme,
                                    Warnings* warnings = nullptr) {
  TaggedSection t;
  t.section = s;
  t.tokens = tokenize(s);
  t.embeddings = t.tokens.size() ? source.embed(t.tokens) : Matrix(0, source.dim());
  t.gold = encode_token_spans(t.tokens.size(), align_spans(t.tokens.tokens, s.adus, warnings), scheme);
  return t;
}

inline std::vector<TaggedSection> prepare_tagged(const std::vector<Section>& sections, const EmbeddingSource& source,
                                                 Scheme scheme, Warnings* warnings = nullptr) {
  std::vector<TaggedSection> out;
  out.reserve(sections.size());
  for (const auto& s : sections) out.push_back(prepare_tagged(s, source, scheme, warnings));
  return out;
}

class AdurModel {
 public:
  AdurModel() = default;
  AdurModel(AdurConfig config, std::size_t embedding_dim)
      : config_(std::move(config)),
        embedding_dim_(embedding_dim),
        tags_(config_.tag_scheme()),
        lstm_("adur.lstm", embedding_dim, config_.lstm_hidden, config_.lstm_layers),
        proj_("adur.proj", 2 * config_.lstm_hidden, static_cast<std::size_t>(tags_.size())),
        crf_("adur.crf", static_cast<std::size_t>(tags_.size())) {
    crf_.constrain(tags_);
  }

  void init(std::uint64_t seed) {
    Rng rng(seed);
    lstm_.init(rng);
    proj_.init(rng);
  }

  const AdurConfig& config() const { return config_; }
  std::size_t embedding_dim() const { return embedding_dim_; }
  const TagSet& tag_set() const { return tags_; }
  Crf& crf() { return crf_; }

  Matrix emissions(const Matrix& embeddings) const {
    nn::BiLstmCache cache;
    return proj_.forward(lstm_.forward(embeddings, cache));
  }

  // Training-mode forward and backward for one section. Gradients are
  // scaled by `scale` and accumulated; returns the unscaled NLL.
  double accumulate(const Matrix& embeddings, const std::vector<int>& gold, double scale, Rng& rng) {
    nn::DropoutMask in_mask, out_mask;
    nn::BiLstmCache cache;
    const Matrix x = nn::dropout(embeddings, config_.dropout_io, true, rng, in_mask);
    const Matrix h = nn::dropout(lstm_.forward(x, cache, config_.dropout_lstm, true, &rng), config_.dropout_io, true,
                                 rng, out_mask);
    const Matrix em = proj_.forward(h);
    Matrix d_em;
    const double loss = crf_.nll(em, gold, &d_em, scale);
    const Matrix dh = nn::dropout_backward(proj_.backward(h, d_em), out_mask);
    lstm_.backward(cache, dh);  // input gradient unused: the embedder is frozen
    return loss;
  }

  std::vector<int> predict_tags(const Matrix& embeddings) const {
    if (embeddings.rows() == 0) return {};
    return crf_.viterbi(emissions(embeddings));
  }

  ParameterList parameters() {
    ParameterList out = lstm_.parameters();
    for (auto* p : proj_.parameters()) out.push_back(p);
    for (auto* p : crf_.parameters()) out.push_back(p);
    return out;
  }

  nlohmann::json metadata() const {
    return {{"kind", "adur"}, {"embedding_dim", embedding_dim_}, {"config", config_to_json(config_)}};
  }

  void save(const std::filesystem::path& path) {
    nn::save_checkpoint(path, parameters(), metadata().dump());
  }

  static AdurModel load(const std::filesystem::path& path) {
    const auto data = nn::load_checkpoint(path);
    const auto meta = nlohmann::json::parse(data.metadata);
    if (meta.value("kind", "") != "adur") throw nn::CheckpointVersionError(path.string() + " is not an ADUR checkpoint");
    AdurModel m(config_from_json<AdurConfig>(meta.at("config")), meta.at("embedding_dim").get<std::size_t>());
    nn::assign_parameters(m.parameters(), data);
    return m;
  }

 private:
  AdurConfig config_;
  std::size_t embedding_dim_ = 0;
  TagSet tags_{Scheme::BIOUL};
  nn::BiLstm lstm_;
  nn::Linear proj_;
  Crf crf_;
};

// Decoded ADUs for one section.
inline std::vector<AduSpan> predict_adur(const AdurModel& model, const TaggedSection& s) {
  const auto tags = model.predict_tags(s.embeddings);
  return spans_to_adus(decode_token_spans(tags, model.tag_set().scheme()), s.tokens.tokens);
}

inline std::vector<AduSpan> predict_adur(const AdurModel& model, const Section& s, const EmbeddingSource& source) {
  const auto tok = tokenize(s);
  if (tok.size() == 0) return {};
  return spans_to_adus(decode_token_spans(model.predict_tags(source.embed(tok)), model.tag_set().scheme()),
                       tok.tokens);
}

// Token macro-F1 over the concatenation of all sections.
inline ScoreReport evaluate_adur_tokens(const AdurModel& model, const std::vector<TaggedSection>& sections) {
  std::vector<int> gold, pred;
  const Scheme scheme = model.tag_set().scheme();
  for (const auto& s : sections) {
    const auto g = token_classes(s.gold, scheme);
    const auto p = token_classes(model.predict_tags(s.embeddings), scheme);
    gold.insert(gold.end(), g.begin(), g.end());
    pred.insert(pred.end(), p.begin(), p.end());
  }
  return token_macro_f1(gold, pred);
}

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double dev_score = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  std::size_t stopped_epoch = 0;
  double best_dev_score = -1.0;
  bool diverged = false;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["epochs"] = nlohmann::json::array();
    for (const auto& e : epochs) j["epochs"].push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"dev_score", e.dev_score}});
    j["best_epoch"] = best_epoch;
    j["stopped_epoch"] = stopped_epoch;
    j["best_dev_score"] = best_dev_score;
    j["diverged"] = diverged;
    return j;
  }
};

// Tracks the best dev score and decides when to stop.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Returns true when the score improved on the best so far.
  bool update(std::size_t epoch, double score) {
    if (score > best_) {
      best_ = score;
      best_epoch_ = epoch;
      return true;
    }
    return false;
  }
  bool should_stop(std::size_t epoch) const { return epoch >= best_epoch_ + patience_; }
  double best() const { return best_; }
  std::size_t best_epoch() const { return best_epoch_; }

 private:
  std::size_t patience_;
  double best_ = -1.0;
  std::size_t best_epoch_ = 0;
};

// Groups item indices into batches of similar length; batch order is
// reshuffled every epoch by the caller.
inline std::vector<std::vector<std::size_t>> length_batches(const std::vector<std::size_t>& lengths,
                                                            std::size_t batch_size) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < lengths.size(); ++i)
    if (lengths[i] > 0) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t b = 0; b < idx.size(); b += batch_size)
    out.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(b),
                     idx.begin() + static_cast<std::ptrdiff_t>(std::min(idx.size(), b + batch_size)));
  return out;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

struct AdurTrainResult {
  AdurModel model;
  TrainLog log;
};

inline AdurTrainResult train_adur(const std::vector<TaggedSection>& train, const AdurConfig& config,
                                  const std::vector<TaggedSection>& dev) {
  config.validate();
  if (dev.empty()) throw Error("train_adur needs a non-empty dev set");
  if (train.empty()) throw Error("train_adur needs training sections");
  AdurTrainResult res{AdurModel(config, train.front().embeddings.cols()), {}};
  AdurModel& model = res.model;
  model.init(mix_seed(config.seed, 1));
  Rng rng(mix_seed(config.seed, 2));
  auto params = model.parameters();
  nn::Adam opt(params, config.lr);

  std::vector<std::size_t> lengths;
  for (const auto& s : train) lengths.push_back(s.tokens.size());
  auto batches = length_batches(lengths, config.batch_size);

  EarlyStopping stopper(config.patience);
  std::vector<Matrix> best = nn::snapshot(params);
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle(batches, rng);
    double epoch_loss = 0.0;
    std::size_t epoch_tokens = 0;
    try {
      for (const auto& batch : batches) {
        std::size_t tokens = 0;
        for (auto i : batch) tokens += train[i].tokens.size();
        opt.zero_grad();
        double loss = 0.0;
        for (auto i : batch)
          loss += model.accumulate(train[i].embeddings, train[i].gold, 1.0 / static_cast<double>(tokens), rng);
        if (!std::isfinite(loss)) throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
        nn::clip_grad_norm(params, config.grad_clip);
        opt.step();
        epoch_loss += loss;
        epoch_tokens += tokens;
      }
    } catch (const NumericError&) {
      res.log.diverged = true;
      res.log.stopped_epoch = epoch;
      break;
    }
    const double dev_score = evaluate_adur_tokens(model, dev).macro_f1;
    res.log.epochs.push_back({epoch, epoch_tokens ? epoch_loss / static_cast<double>(epoch_tokens) : 0.0, dev_score});
    if (stopper.update(epoch, dev_score)) best = nn::snapshot(params);
    res.log.stopped_epoch = epoch;
    if (stopper.should_stop(epoch)) break;
  }
  nn::restore(params, best);
  res.log.best_epoch = stopper.best_epoch();
  res.log.best_dev_score = stopper.best();
  return res;
}

// Contiguous fold blocks over `n` documents; the first n % k blocks are one
// document larger.
inline std::vector<std::pair<std::size_t, std::size_t>> fold_blocks(std::size_t n, std::size_t k) {
  if (k == 0 || k > n) throw Error("cannot split " + std::to_string(n) + " documents into " + std::to_string(k) +
                                   " folds");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t size = n / k + (i < n % k ? 1 : 0);
    out.emplace_back(b, b + size);
    b += size;
  }
  return out;
}

template <typename Result>
struct CrossValidation {
  Result best;
  std::size_t best_fold = 0;
  std::vector<double> fold_scores;
  std::vector<nlohmann::json> fold_logs;
};

// Runs one training per fold (fold i: dev = block i, seed = seed + i) and
// keeps the model with the best dev score. With k = 1 the single model
// trains and early-stops on all documents.
template <typename Item, typename Config, typename TrainFn>
auto cross_validate_generic(const std::vector<std::vector<Item>>& docs, const Config& config, std::size_t k,
                            TrainFn train_fn, std::size_t threads = 1) {
  using Result = decltype(train_fn(std::vector<Item>{}, config, std::vector<Item>{}));
  const auto blocks = fold_blocks(docs.size(), k);
  auto run_fold = [&](std::size_t f) {
    std::vector<Item> train, dev;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const bool in_dev = d >= blocks[f].first && d < blocks[f].second;
      auto& target = (in_dev || k == 1) ? dev : train;
      target.insert(target.end(), docs[d].begin(), docs[d].end());
      if (k == 1) train.insert(train.end(), docs[d].begin(), docs[d].end());
    }
    Config c = config;
    c.seed = config.seed + f;
    return train_fn(train, c, dev);
  };
  std::vector<Result> results;
  if (threads > 1 && k > 1) {
    std::vector<std::future<Result>> futures;
    for (std::size_t f = 0; f < k; ++f) futures.push_back(std::async(std::launch::async, run_fold, f));
    for (auto& fu : futures) results.push_back(fu.get());
  } else {
    for (std::size_t f = 0; f < k; ++f) results.push_back(run_fold(f));
  }
  CrossValidation<Result> cv{results.front(), 0, {}, {}};
  for (std::size_t f = 0; f < k; ++f) {
    cv.fold_scores.push_back(results[f].log.best_dev_score);
    cv.fold_logs.push_back(results[f].log.to_json());
    if (results[f].log.best_dev_score > results[cv.best_fold].log.best_dev_score) cv.best_fold = f;
  }
  cv.best = std::move(results[cv.best_fold]);
  return cv;
}

inline CrossValidation<AdurTrainResult> cross_validate_adur(const std::vector<std::vector<TaggedSection>>& docs,
                                                            const AdurConfig& config, std::size_t threads = 1) {
  return cross_validate_generic(docs, config, config.folds, train_adur, threads);
}

}  // namespace argmine
