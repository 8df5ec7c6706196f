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

#include "argmine/common.hpp"

#include <gtest/gtest.h>

#include "argmine/adur.hpp"
#include "argmine/are.hpp"
#include "argmine/config.hpp"

namespace argmine {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(5), b(5), c(6);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, KnownSplitmixValue) {
  // First output of splitmix64 seeded with 0.
  Rng r(0);
  EXPECT_EQ(r.next(), 0xE220A8397B1DCDAFULL);
}

TEST(Rng, RangesAndBelowUniformity) {
  Rng r(9);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  // Five standard deviations of a binomial(70000, 1/7) count.
  const double sd = std::sqrt(draws * (1.0 / 7) * (6.0 / 7));
  for (int c : counts) EXPECT_NEAR(c, draws / 7.0, 5 * sd);
  EXPECT_EQ(r.below(0), 0u);
  EXPECT_EQ(r.below(1), 0u);
}

TEST(Rng, NormalMoments) {
  Rng r(10);
  double sum = 0, sq = 0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.03);
  EXPECT_NEAR(sq / n, 1.0, 0.03);
}

TEST(Rng, MixSeedSeparatesSalts) {
  EXPECT_EQ(mix_seed(42, 1), mix_seed(42, 1));
  EXPECT_NE(mix_seed(42, 1), mix_seed(42, 2));
  EXPECT_NE(mix_seed(42, 1), mix_seed(43, 1));
}

TEST(Warnings, NullSinkIsAllowed) {
  warn(nullptr, "ignored");
  Warnings w;
  warn(&w, "kept");
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w.messages[0], "kept");
}

TEST(Config, SetParsesEachFieldKind) {
  AreConfig c;
  EXPECT_TRUE(config_set(c, "lr", "0.25"));
  EXPECT_TRUE(config_set(c, "window_k", "300"));
  EXPECT_TRUE(config_set(c, "ngram_sizes", "1,4"));
  EXPECT_FALSE(config_set(c, "no_such_key", "1"));
  EXPECT_DOUBLE_EQ(c.lr, 0.25);
  EXPECT_EQ(c.window_k, 300u);
  EXPECT_EQ(c.ngram_sizes, (std::vector<std::size_t>{1, 4}));
  AdurConfig a;
  EXPECT_TRUE(config_set(a, "scheme", "BIO2"));
  EXPECT_EQ(a.tag_scheme(), Scheme::BIO2);
}

TEST(Config, RejectsMalformedValues) {
  AdurConfig a;
  EXPECT_THROW(config_set(a, "lr", "fast"), ConfigError);
  EXPECT_THROW(config_set(a, "lr", "0.1x"), ConfigError);
  EXPECT_THROW(config_set(a, "patience", "-3"), ConfigError);
  EXPECT_THROW(config_set(a, "batch_size", "2.5"), ConfigError);
}

TEST(Config, JsonRoundTripAndDumpListsEveryField) {
  AreConfig c;
  c.lr = 0.125;
  c.max_dist_d = 17;
  const auto back = config_from_json<AreConfig>(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  const std::string dump = config_dump(c, "are.");
  std::size_t fields = 0;
  c.visit([&](const char* name, auto&) {
    ++fields;
    EXPECT_NE(dump.find(std::string("are.") + name + " = "), std::string::npos) << name;
  });
  EXPECT_EQ(static_cast<std::size_t>(std::count(dump.begin(), dump.end(), '\n')), fields);
}

TEST(Config, ValidateRejectsInconsistentSettings) {
  AdurConfig a;
  EXPECT_NO_THROW(a.validate());
  a.dropout_io = 1.0;
  EXPECT_THROW(a.validate(), ConfigError);
  a = AdurConfig{};
  a.scheme = "IOB";
  EXPECT_THROW(a.validate(), ConfigError);
  AreConfig r;
  EXPECT_NO_THROW(r.validate());
  r.window_k = r.max_dist_d;
  EXPECT_THROW(r.validate(), ConfigError);
}

TEST(Config, KeyValueTextUnwrapsDumpedValues) {
  const auto kv = parse_key_values("# comment\n\n  lr = 0.01 \nscheme = \"BIO2\"\nngram_sizes = [2, 4]\n");
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"lr", "0.01"}));
  EXPECT_EQ(kv[1].second, "BIO2");
  EXPECT_EQ(kv[2].second, "2,4");
  EXPECT_THROW(parse_key_values("lr 0.01"), ConfigError);
  EXPECT_THROW(parse_key_values("= 3"), ConfigError);
  EXPECT_THROW(parse_key_values("ngram_sizes = [2,"), ConfigError);

  // Every line config_dump prints reads back to the same config.
  AreConfig changed;
  changed.ngram_sizes = {2, 9};
  changed.lr = 0.125;
  changed.seed = 99;
  AreConfig restored;
  for (const auto& [k, v] : parse_key_values(config_dump(changed, ""))) ASSERT_TRUE(config_set(restored, k, v)) << k;
  EXPECT_EQ(config_to_json(restored), config_to_json(changed));
}

}  // namespace
}  // namespace argmine
