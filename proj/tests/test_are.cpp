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

#include "argmine/are.hpp"

#include <gtest/gtest.h>

#include "support.hpp"

namespace argmine {
namespace {

using testing::kGradTolerance;
using testing::max_param_error;

TokenSpan ts(std::size_t b, std::size_t e, const std::string& id) { return {b, e, AduType::own_claim, id}; }

// Gap oracle written from the definition: count the tokens lying strictly
// between the two spans.
std::size_t gap_oracle(const TokenSpan& a, const TokenSpan& b) {
  std::size_t n = 0;
  for (std::size_t t = 0; t < std::max(a.end, b.end); ++t) {
    const bool in_a = t >= a.begin && t < a.end, in_b = t >= b.begin && t < b.end;
    const bool between = t >= std::min(a.end, b.end) && t < std::max(a.begin, b.begin);
    if (between && !in_a && !in_b) ++n;
  }
  return n;
}

TEST(Candidates, DistanceFilterExamples) {
  EXPECT_EQ(inner_distance(ts(0, 3, "a"), ts(200, 205, "b")), 197u);
  EXPECT_TRUE(generate_candidates({ts(0, 3, "a"), ts(200, 205, "b")}, 300, 177, 479).empty());
  EXPECT_EQ(inner_distance(ts(0, 3, "a"), ts(3, 5, "b")), 0u);
  EXPECT_EQ(generate_candidates({ts(0, 3, "a"), ts(3, 5, "b")}, 5, 177, 479).size(), 2u);
  const auto three = generate_candidates({ts(0, 3, "a"), ts(4, 6, "b"), ts(10, 12, "c")}, 20, 177, 479);
  EXPECT_EQ(three.size(), 6u);
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& c : three) pairs.emplace(c.head.id, c.tail.id);
  EXPECT_EQ(pairs.size(), 6u);
}

TEST(Candidates, MatchBruteForceFilterOnRandomSpans) {
  Rng rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + rng.below(120);
    const auto spans = testing::random_spans(n, rng);
    const std::size_t d = 1 + rng.below(30);
    const std::size_t k = n + 1;
    std::set<std::pair<std::string, std::string>> expected, got;
    for (const auto& a : spans)
      for (const auto& b : spans)
        if (a.id != b.id && gap_oracle(a, b) < d) expected.emplace(a.id, b.id);
    for (const auto& c : generate_candidates(spans, n, d, k)) got.emplace(c.head.id, c.tail.id);
    EXPECT_EQ(got, expected) << "trial " << trial;
  }
}

TEST(Candidates, WindowsAreCentredClippedAndCovering) {
  Rng rng(52);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng.below(200), k = 1 + rng.below(60);
    std::size_t b1 = rng.below(n), b2 = rng.below(n);
    const TokenSpan a = ts(b1, b1 + 1 + rng.below(std::min<std::size_t>(5, n - b1)), "a");
    const TokenSpan b = ts(b2, b2 + 1 + rng.below(std::min<std::size_t>(5, n - b2)), "b");
    const std::size_t lo = std::min(a.begin, b.begin), hi = std::max(a.end, b.end);
    const auto w = pair_window(a, b, n, k);
    if (hi - lo > k) {
      EXPECT_FALSE(w);
      continue;
    }
    ASSERT_TRUE(w);
    const auto [wb, we] = *w;
    EXPECT_EQ(we - wb, std::min(k, n));
    EXPECT_LE(we, n);
    EXPECT_LE(wb, lo);
    EXPECT_GE(we, hi);
    // Unless a boundary forced a shift, the window midpoint sits within one
    // token of the pair midpoint.
    const double mid_w = (static_cast<double>(wb) + static_cast<double>(we)) / 2;
    const double mid_p = (static_cast<double>(lo) + static_cast<double>(hi)) / 2;
    if (wb > 0 && we < n) {
      EXPECT_LE(std::fabs(mid_w - mid_p), 1.0) << n << " " << k << " " << lo << " " << hi;
    }
  }
}

TEST(Candidates, OversizedPairSkippedWithWarning) {
  Warnings w;
  const auto c = generate_candidates({ts(0, 10, "a"), ts(10, 12, "b")}, 20, 5, 8, &w);
  EXPECT_TRUE(c.empty());
  EXPECT_EQ(w.size(), 2u);
}

TEST(Augment, ReversesSupportsAndKeepsSymmetricLabels) {
  EXPECT_EQ(augment_relations({{"A", "B", RelationLabel::supports}}),
            (std::vector<LabeledPair>{{"A", "B", AreLabel::supports}, {"B", "A", AreLabel::supports_rev}}));
  EXPECT_EQ(augment_relations({{"A", "B", RelationLabel::contradicts}}),
            (std::vector<LabeledPair>{{"A", "B", AreLabel::contradicts}, {"B", "A", AreLabel::contradicts}}));
  EXPECT_EQ(augment_relations({{"A", "B", RelationLabel::parts_of_same}}),
            (std::vector<LabeledPair>{{"A", "B", AreLabel::parts_of_same}, {"B", "A", AreLabel::parts_of_same}}));
  EXPECT_TRUE(augment_relations({}).empty());
  EXPECT_TRUE(augment_relations({{"A", "B", RelationLabel::semantically_same}}).empty());
  const std::vector<RelationLabel> in_section{RelationLabel::supports, RelationLabel::contradicts,
                                             RelationLabel::parts_of_same};
  Rng rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Relation> rels;
    const std::size_t n = rng.below(10);
    for (std::size_t i = 0; i < n; ++i)
      rels.push_back({"h" + std::to_string(i), "t" + std::to_string(i), in_section[rng.below(3)]});
    EXPECT_EQ(augment_relations(rels).size(), 2 * rels.size());
  }
}

std::vector<RelationCandidate> grid_candidates(std::size_t units) {
  std::vector<TokenSpan> spans;
  for (std::size_t i = 0; i < units; ++i) spans.push_back(ts(2 * i, 2 * i + 1, "u" + std::to_string(i)));
  return generate_candidates(spans, 2 * units, 1000, 2 * units + 1);
}

TEST(Negatives, QuotaPoolAndDeterminism) {
  // 11 units give 110 ordered pairs; 2 related pairs remove 4 of them.
  const auto cands = grid_candidates(11);
  ASSERT_EQ(cands.size(), 110u);
  const auto positives = augment_relations({{"u0", "u1", RelationLabel::supports}, {"u2", "u3", RelationLabel::contradicts}});
  ASSERT_EQ(positives.size(), 4u);
  Rng r1(54), r2(54);
  const auto a = sample_negatives(cands, positives, 3, r1);
  const auto b = sample_negatives(cands, positives, 3, r2);
  EXPECT_EQ(a.size(), 12u);
  ASSERT_EQ(a.size(), b.size());
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].head.id, b[i].head.id);
    EXPECT_EQ(a[i].tail.id, b[i].tail.id);
    EXPECT_EQ(a[i].label, AreLabel::no_relation);
    for (const auto& p : positives) EXPECT_FALSE(a[i].head.id == p.head && a[i].tail.id == p.tail);
    EXPECT_TRUE(seen.emplace(a[i].head.id, a[i].tail.id).second);
  }
  Rng r3(54);
  EXPECT_EQ(sample_negatives(cands, positives, 100, r3).size(), 106u);
}

TEST(Negatives, EveryPoolMemberCanBeDrawn) {
  const auto cands = grid_candidates(4);
  const auto positives = augment_relations({{"u0", "u1", RelationLabel::supports}});
  std::map<std::pair<std::string, std::string>, int> hits;
  Rng rng(55);
  for (int trial = 0; trial < 2000; ++trial)
    for (const auto& c : sample_negatives(cands, positives, 1, rng)) ++hits[{c.head.id, c.tail.id}];
  // Pool of 10 pairs, 2 drawn per trial: each pair expected 400 times.
  ASSERT_EQ(hits.size(), 10u);
  for (const auto& [pair, n] : hits) EXPECT_NEAR(n, 400, 100) << pair.first << pair.second;
}

std::shared_ptr<const AreSection> synthetic_are_section(std::uint64_t seed, std::size_t dim = 8) {
  const auto s = testing::synthetic_sections(1, seed, 4).front();
  return prepare_are_section(s, EmbeddingSource::hash(dim, 1), s.adus);
}

TEST(TrainingInstances, PositivesNegativesDisjointAndSymmetric) {
  AreConfig config = testing::small_are_config();
  config.neg_factor = 3;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto section = std::make_shared<AreSection>(*synthetic_are_section(seed));
    section->section.relations.push_back({"T2", "T3", RelationLabel::parts_of_same});
    Rng rng(seed);
    const auto inst = build_training_instances(section, config, rng);
    std::map<std::pair<std::string, std::string>, AreLabel> by_pair;
    std::size_t positives = 0, negatives = 0;
    for (const auto& i : inst) {
      const auto key = std::make_pair(i.candidate.head.id, i.candidate.tail.id);
      EXPECT_TRUE(by_pair.emplace(key, i.candidate.label).second) << "duplicate ordered pair";
      (i.candidate.label == AreLabel::no_relation ? negatives : positives)++;
    }
    EXPECT_EQ(positives, 2 * section->section.relations.size());
    EXPECT_LE(negatives, 3 * positives);
    for (const auto& [key, label] : by_pair) {
      const auto rev = by_pair.find({key.second, key.first});
      if (label == AreLabel::contradicts || label == AreLabel::parts_of_same) {
        ASSERT_NE(rev, by_pair.end());
        EXPECT_EQ(rev->second, label);
      }
      if (label == AreLabel::supports) {
        ASSERT_NE(rev, by_pair.end());
        EXPECT_EQ(rev->second, AreLabel::supports_rev);
      }
      if (label == AreLabel::no_relation && rev != by_pair.end()) {
        EXPECT_EQ(rev->second, AreLabel::no_relation);
      }
    }
  }
}

TEST(Features, ChannelsAndWidth) {
  const auto s = synthetic_are_section(3);
  const auto cands = generate_candidates(s->spans, s->tokens.size(), 12, 24);
  ASSERT_GE(cands.size(), 2u);
  const auto& c = cands.front();
  const auto f = candidate_features(*s, c);
  for (std::size_t t = c.window_begin; t < c.window_end; ++t) {
    const int tag = f.arg_tags[t - c.window_begin];
    if (t == c.head.begin) EXPECT_EQ(tag, 1);
    else if (t > c.head.begin && t < c.head.end) EXPECT_EQ(tag, 2);
    else if (t == c.tail.begin) EXPECT_EQ(tag, 3);
    else if (t > c.tail.begin && t < c.tail.end) EXPECT_EQ(tag, 4);
    else EXPECT_EQ(tag, 0);
  }
  AreConfig config = testing::small_are_config();
  AreModel model(config, 8);
  model.init(1);
  EXPECT_EQ(model.features(f).cols(), 8u + 13 + 3);

  RelationCandidate swapped = c;
  std::swap(swapped.head, swapped.tail);
  const auto g = candidate_features(*s, swapped);
  EXPECT_EQ(g.tokens.values(), f.tokens.values());
  EXPECT_EQ(g.adu_tags, f.adu_tags);
  EXPECT_NE(g.arg_tags, f.arg_tags);

  RelationCandidate empty = c;
  empty.window_end = empty.window_begin;
  EXPECT_THROW(candidate_features(*s, empty), Error);
}

AreConfig tiny_config() {
  AreConfig c;
  c.dropout_io = 0.0;
  c.dropout_lstm = 0.0;
  c.lstm_layers = 2;
  c.lstm_hidden = 3;
  c.cnn_filters = 3;
  c.ngram_sizes = {1, 2};
  c.proj_hidden = 4;
  c.adu_tag_dim = 3;
  c.arg_tag_dim = 2;
  c.window_k = 8;
  c.max_dist_d = 4;
  return c;
}

TEST(AreModel, EndToEndGradientsMatchFiniteDifferences) {
  const auto s = synthetic_are_section(4, 4);
  const auto cands = generate_candidates(s->spans, s->tokens.size(), 4, 8);
  ASSERT_FALSE(cands.empty());
  AreModel model(tiny_config(), 4);
  model.init(7);
  for (std::size_t trial = 0; trial < 3; ++trial) {
    const auto f = candidate_features(*s, cands[trial % cands.size()]);
    const std::size_t target = trial % kNumAreLabels;
    auto params = model.parameters();
    zero_grads(params);
    AreModel::Cache cache;
    Matrix dlogits;
    nn::softmax_cross_entropy(model.logits(f, true, nullptr, cache), {target}, &dlogits);
    model.backward(f, cache, dlogits);
    auto loss = [&] {
      AreModel::Cache c;
      return nn::softmax_cross_entropy(model.logits(f, false, nullptr, c), {target}, nullptr);
    };
    EXPECT_LT(max_param_error(params, loss), kGradTolerance) << "trial " << trial;
  }
}

TEST(AreModel, DistributionSumsToOneAndSaveLoadIsExact) {
  const auto s = synthetic_are_section(5);
  const auto cands = generate_candidates(s->spans, s->tokens.size(), 12, 24);
  AreModel model(testing::small_are_config(), 8);
  model.init(9);
  const auto dir = testing::temp_dir("are_model");
  model.save(dir / "are.ckpt");
  const AreModel loaded = AreModel::load(dir / "are.ckpt");
  for (const auto& c : cands) {
    const auto f = candidate_features(*s, c);
    const auto p = model.probabilities(f);
    ASSERT_EQ(p.size(), kNumAreLabels);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-6);
    // Checkpoints store f32, so compare against a model rounded the same way.
    const auto q = loaded.probabilities(f);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-5);
  }
  AreModel twice = AreModel::load(dir / "are.ckpt");
  twice.save(dir / "again.ckpt");
  EXPECT_EQ(testing::read_text(dir / "are.ckpt"), testing::read_text(dir / "again.ckpt"));
  AdurModel adur(testing::small_adur_config(), 8);
  adur.save(dir / "adur.ckpt");
  EXPECT_THROW(AreModel::load(dir / "adur.ckpt"), nn::CheckpointVersionError);
}

TEST(Rewrite, SupportsRevBecomesSupports) {
  RelationCandidate c{ts(0, 1, "B"), ts(2, 3, "A"), 0, 3, AreLabel::no_relation};
  EXPECT_EQ(*to_relation(c, AreLabel::supports_rev), (Relation{"A", "B", RelationLabel::supports}));
  EXPECT_EQ(*to_relation(c, AreLabel::supports), (Relation{"B", "A", RelationLabel::supports}));
  EXPECT_EQ(*to_relation(c, AreLabel::contradicts), (Relation{"B", "A", RelationLabel::contradicts}));
  EXPECT_FALSE(to_relation(c, AreLabel::no_relation));
  for (std::size_t i = 0; i < kNumAreLabels; ++i)
    EXPECT_EQ(parse_are_label(to_string(static_cast<AreLabel>(i))), static_cast<AreLabel>(i));
}

TEST(TrainAre, LearnsConnectorRuleOnSmallCorpus) {
  std::vector<AreInstance> train;
  const auto sections = testing::synthetic_sections(12, 77);
  const auto source = EmbeddingSource::hash(16, 3);
  const AreConfig config = testing::small_are_config();
  Rng rng(1);
  for (const auto& s : sections) {
    auto prepared = prepare_are_section(s, source, s.adus);
    for (auto& i : build_training_instances(prepared, config, rng)) train.push_back(i);
  }
  AreConfig quick = config;
  quick.max_epochs = 40;
  const auto result = train_are(train, quick, train);
  EXPECT_FALSE(result.log.diverged);
  EXPECT_GE(result.log.best_dev_score, 0.9);
  EXPECT_EQ(evaluate_are_instances(result.model, train).micro.f1, result.log.best_dev_score);
}

}  // namespace
}  // namespace argmine
