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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aia::stats {

struct Association {
  double value = 0.0;
  double p_value = 1.0;
};

// Average (mid) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> v);

double pearson(std::span<const double> x, std::span<const double> y);

// Spearman's rho as the Pearson correlation of average ranks. The p-value is
// two-sided from t = rho * sqrt((n - 2) / (1 - rho^2)) with n - 2 df.
// Throws kDegenerateInput if either input has zero variance, kInvalidArgument
// on length mismatch, n < 3 or non-finite values.
Association spearman(std::span<const double> x, std::span<const double> y);

// Cramer's V from the chi-square statistic of the contingency table. Inputs
// are category codes. Throws kDegenerateInput when either variable has fewer
// than two observed categories.
Association cramers_v(std::span<const int64_t> x, std::span<const int64_t> y,
                      bool bias_corrected = false);
Association cramers_v(std::span<const std::string> x, std::span<const std::string> y,
                      bool bias_corrected = false);

// Cochran's formula with finite population correction, rounded up.
uint64_t required_sample_size(double confidence, double margin, double proportion,
                              uint64_t population);

}  // namespace aia::stats
