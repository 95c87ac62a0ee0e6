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
#pragma once

// The attack protocols: simple (per-player nested CV), one-match, the
// probability-averaging sophisticated attack, indiscriminate top-2 and the
// precision-tuned targeted attack.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "attributes/attributes.hpp"
#include "features/matrix.hpp"
#include "json.hpp"
#include "models/model.hpp"

namespace aia::eval {

using LabelMap = std::map<uint64_t, attributes::AttributeLabels>;

struct ProtocolOptions {
  std::vector<models::Algorithm> algorithms;
  models::GridPreset grid_preset = models::GridPreset::kFull;
  // Per-algorithm overrides of the preset grid.
  std::map<models::Algorithm, models::HyperparamGrid> grids;
  std::vector<attributes::Attribute> attributes;  // empty = all nine
  int outer_folds = 10;
  int inner_folds = 3;
  models::SelectionMetric metric = models::SelectionMetric::kMacroF1;
  models::ResampleOptions resampling;
  size_t max_features = 20;
  double test_fraction = 0.2;
  double validation_fraction = 0.1;
  // one-match runs on plain M repeat the split this many times.
  size_t repeats = 20;
  // targeted runs; run r uses distilled variant r modulo the variant count.
  size_t targeted_repeats = 5;
  std::vector<size_t> n_sweep;  // empty = 1..30
  size_t draws = 100;
  size_t indiscriminate_n = 30;
  std::vector<double> thresholds;  // empty = 0.50, 0.55, ..., 0.95
  uint64_t seed = 1;
  unsigned jobs = 1;

  models::HyperparamGrid grid_for(models::Algorithm a) const;
  std::vector<attributes::Attribute> attribute_list() const;
  std::vector<size_t> sweep() const;
  nlohmann::json to_json() const;
};

struct MetricCell {
  std::string dataset;    // P, M or Mbar
  std::string attribute;
  std::string model;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
  size_t n_runs = 0;
};

struct CurvePoint {
  std::string attribute;
  std::string series;
  size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
  size_t n_runs = 0;
  bool headline = true;
};

struct AttackReport {
  std::string protocol;
  std::vector<MetricCell> cells;
  std::vector<CurvePoint> curves;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> notes;
  size_t disjointness_checks = 0;
  bool player_disjoint = true;

  const MetricCell* find(std::string_view dataset, std::string_view attribute,
                         std::string_view model, std::string_view metric) const;
  nlohmann::json to_json() const;
  std::string cells_csv() const;
  std::string curves_csv() const;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;
  size_t n = 0;
};
Summary summarize(const std::vector<double>& v);

// Throws kInternal if any owner appears on both sides.
void assert_player_disjoint(const std::vector<uint64_t>& train, const std::vector<uint64_t>& test);

struct AveragedPrediction {
  int predicted = 0;
  std::vector<double> average;
};

// Componentwise mean of per-match probability vectors, then argmax with
// schema-order ties.
AveragedPrediction sophisticated_predict(const std::vector<std::vector<double>>& match_probas);

AttackReport simple_aia(const features::FeatureMatrix& p, const LabelMap& labels,
                        const ProtocolOptions& options);

// `variants` holds either the plain per-match matrix (split repeated
// options.repeats times) or the distilled variants (one run each).
AttackReport one_match_aia(const std::vector<features::FeatureMatrix>& variants,
                           const LabelMap& labels, const ProtocolOptions& options);

// Naive (plain M) and expert (distilled) attackers side by side, with the
// dummy baseline; both use the same player splits.
AttackReport one_match_comparison(const features::FeatureMatrix& m,
                                  const std::vector<features::FeatureMatrix>& mbar,
                                  const LabelMap& labels, const ProtocolOptions& options);

// Per-player probabilities from a model trained on other players.
struct PlayerPredictions {
  std::vector<uint64_t> owners;
  std::vector<int> truth;
  std::vector<std::vector<std::vector<double>>> match_probas;  // player -> match -> proba
  size_t n_classes = 0;
};

// Accuracy over players for averaged predictions of n sampled matches,
// repeated `draws` times; returns one accuracy per draw.
std::vector<double> sampled_accuracy(const PlayerPredictions& preds, size_t n, size_t draws,
                                     uint64_t seed, bool top2 = false);

AttackReport sophisticated_aia(const std::vector<features::FeatureMatrix>& mbar,
                               const LabelMap& labels, const ProtocolOptions& options);

// Three-class attributes only; throws kAttributeArity when a binary one is
// requested explicitly.
AttackReport indiscriminate_aia(const std::vector<features::FeatureMatrix>& mbar,
                                const LabelMap& labels, const ProtocolOptions& options);

struct TargetSpec {
  std::string name;
  std::vector<std::pair<attributes::Attribute, std::vector<uint8_t>>> terms;

  bool matches(const attributes::AttributeLabels& l) const;
  nlohmann::json to_json() const;
};

const std::vector<TargetSpec>& builtin_targets();
// Built-in name, or "attr=class|class,attr=class" conjunction syntax.
TargetSpec parse_target(std::string_view text);

AttackReport targeted_aia(const TargetSpec& target, const std::vector<features::FeatureMatrix>& mbar,
                          const LabelMap& labels, const ProtocolOptions& options);

}  // namespace aia::eval
