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

// Preprocessing fitted on training rows: column selection, min-max scaling
// and one-hot encoding.

#include <string>
#include <vector>

#include "features/matrix.hpp"
#include "json.hpp"
#include "models/dense.hpp"

namespace aia::models {

// Ranks the non-constant columns by univariate association with y on the
// given rows (Spearman for numeric columns, Cramer's V otherwise; ascending
// p-value, then descending strength, then column order) and returns at most
// max_features of them in column order.
std::vector<size_t> select_features(const features::FeatureMatrix& f, const std::vector<size_t>& rows,
                                    const std::vector<int>& y, size_t max_features);

struct RecipeInput {
  size_t source_col = 0;
  std::string name;
  features::ColumnKind kind = features::ColumnKind::kNumeric;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::string> categories;  // one-hot levels, sorted
};

struct Recipe {
  std::vector<RecipeInput> inputs;
  std::string source_schema_hash;
  std::vector<std::string> dropped_constant;

  size_t width() const;
  std::vector<std::string> output_names() const;
  void transform_row(const features::FeatureMatrix& f, size_t row, std::span<double> out) const;
  // Labels are copied from y (same length as rows) when given.
  Dense transform(const features::FeatureMatrix& f, const std::vector<size_t>& rows,
                  const std::vector<int>& y, int n_classes) const;

  nlohmann::json to_json() const;
  static Recipe from_json(const nlohmann::json& j);
};

// max_features = 0 keeps every non-constant column.
Recipe fit_recipe(const features::FeatureMatrix& f, const std::vector<size_t>& train_rows,
                  const std::vector<int>& y, size_t max_features);

}  // namespace aia::models
