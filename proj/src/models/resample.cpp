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
#include "models/resample.hpp"

#include <algorithm>
#include <map>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace aia::models {
namespace {

double sq_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<size_t> nearest_neighbors(const Dense& data, size_t i, size_t k,
                                      const std::vector<size_t>& candidates) {
  std::vector<std::pair<double, size_t>> dist;
  dist.reserve(candidates.size());
  for (size_t j : candidates) {
    if (j != i) dist.emplace_back(sq_distance(data.row(i), data.row(j)), j);
  }
  const size_t take = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
  std::vector<size_t> out;
  for (size_t t = 0; t < take; ++t) out.push_back(dist[t].second);
  return out;
}

Dense enn_undersample(const Dense& data, size_t k, ResampleLog* log) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "ENN needs k >= 1");
  std::vector<size_t> all(data.n);
  for (size_t i = 0; i < data.n; ++i) all[i] = i;
  std::vector<bool> drop(data.n, false);
  std::map<int, size_t> members, dropped;
  for (int y : data.y) ++members[y];
  for (size_t i = 0; i < data.n; ++i) {
    const auto nn = nearest_neighbors(data, i, k, all);
    std::map<int, size_t> votes;
    for (size_t j : nn) ++votes[data.y[j]];
    const size_t own = votes[data.y[i]];
    for (const auto& [label, v] : votes) {
      if (label != data.y[i] && v > own) {
        drop[i] = true;
        break;
      }
    }
    if (drop[i]) ++dropped[data.y[i]];
  }
  ResampleLog local;
  for (const auto& [label, count] : dropped) {
    if (members[label] >= 2 && members[label] - count < 2) {
      // Editing must not wipe out a class the oversampler still needs.
      local.protected_classes.push_back(label);
      for (size_t i = 0; i < data.n; ++i) {
        if (data.y[i] == label) drop[i] = false;
      }
    }
  }
  std::vector<size_t> keep;
  for (size_t i = 0; i < data.n; ++i) {
    if (!drop[i]) keep.push_back(i);
  }
  local.removed = data.n - keep.size();
  if (log) {
    log->removed += local.removed;
    log->protected_classes = local.protected_classes;
  }
  return data.subset(keep);
}

Dense smote_oversample(const Dense& data, size_t k, uint64_t seed, ResampleLog* log) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "SMOTE needs k >= 1");
  std::map<int, std::vector<size_t>> by_class;
  for (size_t i = 0; i < data.n; ++i) by_class[data.y[i]].push_back(i);
  size_t majority = 0;
  for (const auto& [_, rows] : by_class) majority = std::max(majority, rows.size());

  Dense out = data;
  std::vector<double> point(data.d);
  for (const auto& [label, rows] : by_class) {
    if (rows.size() >= majority) continue;
    const size_t need = majority - rows.size();
    Rng rng(derive_seed(seed, {static_cast<uint64_t>(label)}));
    if (rows.size() == 1) {
      // Too few members to interpolate: duplicate the lone row.
      if (log) log->duplicated_classes.push_back(label);
      for (size_t t = 0; t < need; ++t) out.push_back(data.row(rows[0]), label);
    } else {
      const size_t kk = std::min(k, rows.size() - 1);
      std::map<size_t, std::vector<size_t>> neighbors;
      for (size_t t = 0; t < need; ++t) {
        const size_t base = rows[rng.below(rows.size())];
        auto it = neighbors.find(base);
        if (it == neighbors.end()) {
          it = neighbors.emplace(base, nearest_neighbors(data, base, kk, rows)).first;
        }
        const size_t other = it->second[rng.below(it->second.size())];
        const double gap = rng.uniform();
        auto a = data.row(base);
        auto b = data.row(other);
        for (size_t j = 0; j < data.d; ++j) point[j] = a[j] + gap * (b[j] - a[j]);
        out.push_back(point, label);
      }
    }
    if (log) log->synthesized += need;
  }
  return out;
}

}  // namespace aia::models
