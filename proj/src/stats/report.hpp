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

// Feature/attribute association reports.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "attributes/attributes.hpp"
#include "features/matrix.hpp"

namespace aia::stats {

enum class Metric { kSpearman, kCramersV };
std::string_view metric_name(Metric m);

struct CorrelationResult {
  std::string feature;
  attributes::Attribute attribute = attributes::Attribute::kGender;
  Metric metric = Metric::kSpearman;
  double value = 0.0;
  double p_value = 1.0;
  size_t n = 0;
  bool strong = false;
};

struct ReportOptions {
  double alpha = 0.01;
  size_t top_k = 3;
  bool bias_corrected = false;
  double strong_threshold = 0.3;
  unsigned jobs = 1;
};

struct CorrelationReport {
  // Every defined (feature, attribute) pair in column-then-attribute order.
  std::vector<CorrelationResult> all;
  // Per attribute: p < alpha, sorted by |value| descending, at most top_k.
  std::array<std::vector<CorrelationResult>, attributes::kAttributeCount> top;
  // Pairs skipped because a variable had zero variance or one category.
  size_t degenerate = 0;
};

// Numeric columns are scored with Spearman against ordinal attributes (class
// codes 0/1/2) and skipped for binary attributes; categorical and boolean
// columns use Cramer's V against every attribute. Rows whose owner has no
// labels are dropped.
CorrelationReport correlation_report(const features::FeatureMatrix& f,
                                     const std::map<uint64_t, attributes::AttributeLabels>& labels,
                                     const ReportOptions& options = {});

struct SignificanceCell {
  attributes::Attribute attribute;
  Metric metric;
  double alpha;
  size_t count;
};

std::vector<SignificanceCell> significance_counts(const std::vector<CorrelationResult>& results,
                                                  const std::vector<double>& alphas = {0.01, 0.05,
                                                                                       0.1});

}  // namespace aia::stats
