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

#include <cstddef>
#include <span>
#include <vector>

namespace aia::models {

// Row-major design matrix with integer class codes.
struct Dense {
  size_t n = 0;
  size_t d = 0;
  std::vector<double> x;
  std::vector<int> y;
  int n_classes = 0;

  std::span<const double> row(size_t i) const { return {x.data() + i * d, d}; }
  std::span<double> row(size_t i) { return {x.data() + i * d, d}; }

  Dense subset(const std::vector<size_t>& rows) const {
    Dense out{0, d, {}, {}, n_classes};
    out.x.reserve(rows.size() * d);
    for (size_t r : rows) {
      out.x.insert(out.x.end(), x.begin() + r * d, x.begin() + (r + 1) * d);
      out.y.push_back(y[r]);
    }
    out.n = rows.size();
    return out;
  }

  void push_back(std::span<const double> values, int label) {
    x.insert(x.end(), values.begin(), values.end());
    y.push_back(label);
    ++n;
  }
};

}  // namespace aia::models
