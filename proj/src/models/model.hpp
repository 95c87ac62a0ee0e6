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

// Trained models over feature matrices, hyperparameter grids and search.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "features/matrix.hpp"
#include "json.hpp"
#include "models/classifiers.hpp"
#include "models/recipe.hpp"
#include "models/resample.hpp"

namespace aia::models {

struct HyperparamGrid {
  // Axes in enumeration order; the last axis varies fastest.
  std::vector<std::pair<std::string, std::vector<double>>> axes;

  std::vector<Hyperparams> points() const;
  nlohmann::json to_json() const;
  static HyperparamGrid from_json(const nlohmann::json& j);
};

enum class GridPreset { kFull, kQuick };
HyperparamGrid default_grid(Algorithm algorithm, GridPreset preset = GridPreset::kFull);

enum class SelectionMetric { kMacroF1, kPrecision, kAccuracy };
std::string_view selection_metric_name(SelectionMetric m);
SelectionMetric selection_metric_from_name(std::string_view s);

struct ResampleOptions {
  bool enabled = true;
  size_t enn_k = 3;
  size_t smote_k = 5;
};

// ENN then SMOTE; a no-op when disabled.
Dense resample(const Dense& data, const ResampleOptions& options, uint64_t seed,
               ResampleLog* log = nullptr);

// Fold index per row. Each class is shuffled and dealt round-robin, so fold
// sizes differ by at most one per class.
std::vector<int> stratified_folds(const std::vector<int>& y, int k, uint64_t seed);

double selection_score(SelectionMetric metric, const std::vector<int>& y_true,
                       const std::vector<int>& y_pred, int n_classes);

struct GridResult {
  Hyperparams best;
  std::vector<double> scores;  // one per grid point
};

// Exhaustive stratified inner CV; ties keep the earliest grid point.
GridResult grid_search(Algorithm algorithm, const HyperparamGrid& grid, const Dense& data,
                       int inner_folds, SelectionMetric metric, uint64_t seed,
                       const ResampleOptions& resampling = {});

struct TrainedModel {
  Algorithm algorithm = Algorithm::kDummyStratified;
  std::vector<std::string> class_list;
  Recipe recipe;
  Hyperparams params;
  uint64_t seed = 0;
  std::shared_ptr<const Classifier> impl;
  FitInfo fit_info;
  ResampleLog resample_log;

  std::vector<double> predict_proba(const features::FeatureMatrix& f, size_t row) const;
  std::vector<std::vector<double>> predict_proba(const features::FeatureMatrix& f,
                                                 const std::vector<size_t>& rows) const;
  std::vector<double> predict_proba_dense(std::span<const double> row) const;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);
};

struct TrainOptions {
  Algorithm algorithm = Algorithm::kRandomForest;
  Hyperparams params;
  uint64_t seed = 1;
  // 0 keeps every non-constant column.
  size_t max_features = 0;
  ResampleOptions resampling{false, 3, 5};
};

// Fits the recipe and the classifier on `rows` of `f`; y holds class codes
// into class_list. Throws kInvalidArgument when fewer than two classes are
// present (the stratified dummy accepts one).
TrainedModel fit(const features::FeatureMatrix& f, const std::vector<size_t>& rows,
                 const std::vector<int>& y, const std::vector<std::string>& class_list,
                 const TrainOptions& options);

// Classifier fit on an already transformed, possibly resampled design.
TrainedModel fit_dense(const Recipe& recipe, const Dense& data,
                       const std::vector<std::string>& class_list, Algorithm algorithm,
                       const Hyperparams& params, uint64_t seed);

std::string save_model(const TrainedModel& model);
// Throws kSchemaMismatch when expected_schema_hash is given and differs.
TrainedModel load_model(const std::string& text, const std::string& expected_schema_hash = "");

}  // namespace aia::models
