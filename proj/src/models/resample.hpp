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

// Edited-nearest-neighbour cleaning and SMOTE oversampling.

#include <cstdint>
#include <string>
#include <vector>

#include "models/dense.hpp"

namespace aia::models {

struct ResampleLog {
  size_t removed = 0;
  size_t synthesized = 0;
  // Classes oversampled by duplication because they had a single member.
  std::vector<int> duplicated_classes;
  // Classes ENN left alone because editing would shrink them below two rows.
  std::vector<int> protected_classes;
};

// Indices (ascending) of the k nearest rows to row i by Euclidean distance,
// excluding i; equal distances are ordered by index.
std::vector<size_t> nearest_neighbors(const Dense& data, size_t i, size_t k,
                                      const std::vector<size_t>& candidates);

// Removes every row whose label receives strictly fewer votes among its k
// nearest neighbours than some other label. Kept rows stay in input order.
Dense enn_undersample(const Dense& data, size_t k = 3, ResampleLog* log = nullptr);

// Grows every class to the majority count. The input rows come first,
// unchanged; synthetic rows follow, class by class. A synthetic row lies on
// the segment between a member and one of its k nearest same-class rows.
Dense smote_oversample(const Dense& data, size_t k, uint64_t seed, ResampleLog* log = nullptr);

}  // namespace aia::models
