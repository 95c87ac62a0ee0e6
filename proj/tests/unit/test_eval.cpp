// Copyright 2026 The AIA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>

#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "eval/metrics.hpp"
#include "eval/protocols.hpp"

namespace aia::eval {
namespace {

using attributes::Attribute;

// Confusion-matrix oracle; classes absent from both vectors are left out of
// the macro averages.
Metrics oracle_metrics(const std::vector<int>& t, const std::vector<int>& p, int k) {
  std::vector<std::vector<double>> cm(k, std::vector<double>(k, 0.0));
  for (size_t i = 0; i < t.size(); ++i) cm[t[i]][p[i]] += 1.0;
  Metrics m;
  double diag = 0, f1 = 0, prec = 0, rec = 0;
  int used = 0;
  for (int c = 0; c < k; ++c) {
    double row = 0, col = 0;
    for (int j = 0; j < k; ++j) {
      row += cm[c][j];
      col += cm[j][c];
    }
    diag += cm[c][c];
    if (row == 0 && col == 0) continue;
    ++used;
    const double pc = col > 0 ? cm[c][c] / col : 0.0;
    const double rc = row > 0 ? cm[c][c] / row : 0.0;
    prec += pc;
    rec += rc;
    f1 += pc + rc > 0 ? 2 * pc * rc / (pc + rc) : 0.0;
  }
  m.accuracy = diag / static_cast<double>(t.size());
  m.macro_f1 = f1 / used;
  m.precision = prec / used;
  m.recall = rec / used;
  return m;
}

TEST(Metrics, AgreeWithConfusionMatrixOracle) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(3));
    const size_t n = 1 + rng.below(40);
    std::vector<int> t(n), p(n);
    for (size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.below(static_cast<uint64_t>(k)));
      p[i] = rng.bernoulli(0.6) ? t[i] : static_cast<int>(rng.below(static_cast<uint64_t>(k)));
    }
    const auto got = compute_metrics(t, p, k);
    const auto want = oracle_metrics(t, p, k);
    ASSERT_NEAR(got.accuracy, want.accuracy, 1e-12);
    ASSERT_NEAR(got.macro_f1, want.macro_f1, 1e-12);
    ASSERT_NEAR(got.precision, want.precision, 1e-12);
    ASSERT_NEAR(got.recall, want.recall, 1e-12);
  }
}

TEST(Metrics, HandWorkedBinaryCase) {
  const std::vector<int> t = {1, 1, 1, 0, 0, 0, 0, 0};
  const std::vector<int> p = {1, 1, 0, 1, 0, 0, 0, 0};
  const auto m = compute_metrics(t, p, 2);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
  EXPECT_DOUBLE_EQ(m.positive_precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.positive_recall, 2.0 / 3.0);
  EXPECT_EQ(m.predicted_positive, 3u);
  const auto f1 = per_class_f1(t, p, 2);
  EXPECT_DOUBLE_EQ(f1[0], 0.8);
  EXPECT_DOUBLE_EQ(f1[1], 2.0 / 3.0);
}

TEST(Metrics, RejectsBadInput) {
  const std::vector<int> a = {0, 1}, b = {0};
  EXPECT_THROW(compute_metrics(a, b, 2), Error);
  const std::vector<int> c = {0, 3};
  EXPECT_THROW(compute_metrics(a, c, 2), Error);
}

TEST(Ranking, ArgmaxAndTop2TieBreaks) {
  const std::vector<double> v = {0.2, 0.4, 0.4};
  EXPECT_EQ(argmax(v), 1);
  EXPECT_TRUE(in_top2(v, 1));
  EXPECT_TRUE(in_top2(v, 2));
  EXPECT_FALSE(in_top2(v, 0));
  const std::vector<double> two = {0.9, 0.1};
  EXPECT_TRUE(in_top2(two, 1));
}

TEST(Sophisticated, AveragesThenTakesArgmax) {
  // Binary case: positive-class probabilities 0.1, 0.2, 0.8, 0.2 average to
  // 0.325, so the player is assigned the negative class.
  const std::vector<std::vector<double>> probas = {{0.9, 0.1}, {0.8, 0.2}, {0.2, 0.8}, {0.8, 0.2}};
  const auto r = sophisticated_predict(probas);
  EXPECT_NEAR(r.average[1], 0.325, 1e-15);
  EXPECT_EQ(r.predicted, 0);
  EXPECT_THROW(sophisticated_predict({}), Error);
  EXPECT_THROW(sophisticated_predict({{0.5, 0.5}, {1.0}}), Error);
}

PlayerPredictions random_predictions(size_t players, size_t k, uint64_t seed) {
  Rng rng(seed);
  PlayerPredictions p;
  p.n_classes = k;
  for (size_t i = 0; i < players; ++i) {
    p.owners.push_back(100 + i);
    const int truth = static_cast<int>(rng.below(k));
    p.truth.push_back(truth);
    std::vector<std::vector<double>> ms;
    const size_t n_matches = 3 + rng.below(20);
    for (size_t m = 0; m < n_matches; ++m) {
      std::vector<double> pr(k);
      double s = 0;
      for (size_t c = 0; c < k; ++c) {
        pr[c] = rng.uniform() + (static_cast<int>(c) == truth ? 0.3 : 0.0);
        s += pr[c];
      }
      for (double& v : pr) v /= s;
      ms.push_back(pr);
    }
    p.match_probas.push_back(ms);
  }
  return p;
}

TEST(SampledAccuracy, Top2DominatesTop1AndIsSeeded) {
  const auto preds = random_predictions(40, 3, 5);
  for (size_t n : {1, 5, 30}) {
    const auto top1 = sampled_accuracy(preds, n, 25, 9, false);
    const auto top2 = sampled_accuracy(preds, n, 25, 9, true);
    ASSERT_EQ(top1.size(), 25u);
    for (size_t d = 0; d < top1.size(); ++d) EXPECT_GE(top2[d], top1[d]);
    EXPECT_EQ(sampled_accuracy(preds, n, 25, 9, false), top1);
  }
  // With n above every player's match count all draws see the same matches.
  const auto all = sampled_accuracy(preds, 100, 5, 1, false);
  for (double v : all) EXPECT_DOUBLE_EQ(v, all.front());
  EXPECT_THROW(sampled_accuracy(preds, 0, 5, 1), Error);
}

TEST(Disjointness, ThrowsInternalOnOverlap) {
  EXPECT_NO_THROW(assert_player_disjoint({1, 2, 3}, {4, 5}));
  try {
    assert_player_disjoint({1, 2, 3}, {3, 9});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInternal);
  }
}

TEST(Targets, BuiltinsAndParsing) {
  const auto young = parse_target("very_young");
  attributes::AttributeLabels l;
  l[Attribute::kAge] = 0;
  EXPECT_TRUE(young.matches(l));
  l[Attribute::kAge] = 1;
  EXPECT_FALSE(young.matches(l));

  const auto spec = parse_target("occupation=yes, purchase_habits=rarely|regularly");
  ASSERT_EQ(spec.terms.size(), 2u);
  l[Attribute::kOccupation] = 1;
  l[Attribute::kPurchaseHabits] = 2;
  EXPECT_TRUE(spec.matches(l));
  l[Attribute::kPurchaseHabits] = 0;
  EXPECT_FALSE(spec.matches(l));
  const auto builtin = parse_target("purchasers_and_workers");
  l[Attribute::kPurchaseHabits] = 1;
  EXPECT_EQ(builtin.matches(l), spec.matches(l));

  EXPECT_EQ(builtin_targets().size(), 4u);
  EXPECT_THROW(parse_target("age"), Error);
  EXPECT_THROW(parse_target("shoe_size=big"), Error);
  EXPECT_THROW(parse_target("age=ancient"), Error);
}

TEST(Summary, MeanAndSampleStd) {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.std, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(s.n, 4u);
}

// Per-player matrix with one feature tracking occupation.
features::FeatureMatrix planted_p(size_t n, LabelMap* labels) {
  Rng rng(3);
  features::FeatureMatrix m;
  m.variant = features::Variant::kP;
  for (size_t i = 0; i < n; ++i) {
    attributes::AttributeLabels l;
    l.handle = 500 + i;
    l[Attribute::kOccupation] = rng.bernoulli(0.4) ? 1 : 0;
    (*labels)[l.handle] = l;
    features::FeatureRow r;
    r.num("signal", l[Attribute::kOccupation] * 2.5 + rng.normal());
    r.num("noise", rng.normal());
    m.append(r, l.handle);
  }
  return m;
}

TEST(SimpleProtocol, FindsPlantedSignalAndKeepsPlayersApart) {
  LabelMap labels;
  const auto p = planted_p(120, &labels);
  ProtocolOptions o;
  o.algorithms = {models::Algorithm::kLogisticRegression, models::Algorithm::kDummyStratified};
  o.grid_preset = models::GridPreset::kQuick;
  o.attributes = {Attribute::kOccupation};
  o.outer_folds = 4;
  o.inner_folds = 2;
  const auto r = simple_aia(p, labels, o);
  EXPECT_TRUE(r.player_disjoint);
  EXPECT_GE(r.disjointness_checks, 4u);
  const auto* lr = r.find("P", "occupation", "logistic_regression", "macro_f1");
  const auto* dummy = r.find("P", "occupation", "dummy_stratified", "macro_f1");
  ASSERT_NE(lr, nullptr);
  ASSERT_NE(dummy, nullptr);
  EXPECT_EQ(lr->n_runs, 4u);
  EXPECT_GT(lr->mean, dummy->mean + 0.2);
  o.jobs = 3;
  EXPECT_EQ(simple_aia(p, labels, o).cells_csv(), r.cells_csv());
}

}  // namespace
}  // namespace aia::eval
