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
#include "stats/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "common/error.hpp"
#include "stats/distributions.hpp"

namespace aia::stats {
namespace {

void check_pair(size_t nx, size_t ny) {
  if (nx != ny) fail(ErrorCode::kInvalidArgument, "input vectors differ in length");
  if (nx < 3) fail(ErrorCode::kInvalidArgument, "at least 3 observations are required");
}

std::vector<int64_t> encode(std::span<const std::string> v) {
  std::map<std::string, int64_t> codes;
  std::vector<int64_t> out;
  out.reserve(v.size());
  for (const auto& s : v) {
    auto [it, inserted] = codes.emplace(s, static_cast<int64_t>(codes.size()));
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<size_t> order(v.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    // Positions i..j (0-based) share the rank mean((i+1)..(j+1)).
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    fail(ErrorCode::kDegenerateInput, "zero variance input");
  }
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

Association spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x.size(), y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      fail(ErrorCode::kInvalidArgument, "spearman requires finite values");
    }
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  Association out;
  out.value = pearson(rx, ry);
  const double n = static_cast<double>(x.size());
  if (std::fabs(out.value) >= 1.0) {
    out.p_value = 0.0;
    return out;
  }
  const double t = out.value * std::sqrt((n - 2.0) / (1.0 - out.value * out.value));
  out.p_value = student_t_two_sided_p(t, n - 2.0);
  return out;
}

Association cramers_v(std::span<const int64_t> x, std::span<const int64_t> y,
                      bool bias_corrected) {
  check_pair(x.size(), y.size());
  std::map<int64_t, size_t> row_index, col_index;
  for (int64_t v : x) row_index.emplace(v, 0);
  for (int64_t v : y) col_index.emplace(v, 0);
  if (row_index.size() < 2 || col_index.size() < 2) {
    fail(ErrorCode::kDegenerateInput, "Cramer's V needs two observed categories per variable");
  }
  size_t k = 0;
  for (auto& [_, idx] : row_index) idx = k++;
  k = 0;
  for (auto& [_, idx] : col_index) idx = k++;
  const size_t r = row_index.size();
  const size_t c = col_index.size();
  std::vector<double> table(r * c, 0.0), row_sum(r, 0.0), col_sum(c, 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    const size_t a = row_index[x[i]];
    const size_t b = col_index[y[i]];
    table[a * c + b] += 1.0;
    row_sum[a] += 1.0;
    col_sum[b] += 1.0;
  }
  const double n = static_cast<double>(x.size());
  double chi2 = 0.0;
  for (size_t a = 0; a < r; ++a) {
    for (size_t b = 0; b < c; ++b) {
      const double expected = row_sum[a] * col_sum[b] / n;
      const double diff = table[a * c + b] - expected;
      chi2 += diff * diff / expected;
    }
  }
  Association out;
  const double dof = static_cast<double>((r - 1) * (c - 1));
  out.p_value = chi_square_sf(chi2, dof);
  if (!bias_corrected) {
    const double m = static_cast<double>(std::min(r, c) - 1);
    out.value = std::sqrt(chi2 / (n * m));
  } else {
    // Bergsma (2013) correction.
    const double expected = dof / (n - 1.0);
    double phi2 = chi2 / n - expected;
    // An excess at rounding level is an exact zero; the square root below
    // would blow it up to ~1e-8.
    if (phi2 < 1e-12 * expected) phi2 = 0.0;
    const double rc = static_cast<double>(r) - (static_cast<double>(r) - 1.0) *
                                                   (static_cast<double>(r) - 1.0) / (n - 1.0);
    const double cc = static_cast<double>(c) - (static_cast<double>(c) - 1.0) *
                                                   (static_cast<double>(c) - 1.0) / (n - 1.0);
    const double m = std::min(rc, cc) - 1.0;
    out.value = m > 0.0 ? std::sqrt(phi2 / m) : 0.0;
  }
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

Association cramers_v(std::span<const std::string> x, std::span<const std::string> y,
                      bool bias_corrected) {
  const auto cx = encode(x);
  const auto cy = encode(y);
  return cramers_v(std::span<const int64_t>(cx), std::span<const int64_t>(cy), bias_corrected);
}

uint64_t required_sample_size(double confidence, double margin, double proportion,
                              uint64_t population) {
  if (!(confidence > 0.0 && confidence < 1.0) || !(margin > 0.0 && margin < 1.0) ||
      !(proportion > 0.0 && proportion < 1.0) || population < 1) {
    fail(ErrorCode::kDomain,
         "required_sample_size needs 0 < confidence, margin, proportion < 1 and population >= 1");
  }
  const double z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
  const double n0 = z * z * proportion * (1.0 - proportion) / (margin * margin);
  const double n = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(population));
  // Guard against 384.0000000001-style float noise before rounding up.
  return static_cast<uint64_t>(std::ceil(n - 1e-9));
}

}  // namespace aia::stats
