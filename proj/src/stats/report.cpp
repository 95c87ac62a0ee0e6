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
#include "stats/report.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/util.hpp"
#include "stats/correlation.hpp"

namespace aia::stats {

std::string_view metric_name(Metric m) {
  return m == Metric::kSpearman ? "spearman_rho" : "cramers_v";
}

CorrelationReport correlation_report(const features::FeatureMatrix& f,
                                     const std::map<uint64_t, attributes::AttributeLabels>& labels,
                                     const ReportOptions& options) {
  using attributes::Attribute;
  std::vector<size_t> rows;
  for (size_t r = 0; r < f.rows(); ++r) {
    if (labels.count(f.row_owner[r]) != 0) rows.push_back(r);
  }
  const auto& attrs = attributes::all_attributes();
  std::array<std::vector<double>, attributes::kAttributeCount> codes;
  for (size_t a = 0; a < attrs.size(); ++a) {
    for (size_t r : rows) codes[a].push_back(labels.at(f.row_owner[r])[attrs[a]]);
  }

  struct Slot {
    bool defined = false;
    bool degenerate = false;
    CorrelationResult result;
  };
  const size_t pairs = f.cols() * attrs.size();
  std::vector<Slot> slots(pairs);
  parallel_for(pairs, options.jobs, [&](size_t i) {
    const size_t c = i / attrs.size();
    const size_t a = i % attrs.size();
    const auto& col = f.columns[c];
    const auto& info = attributes::info(attrs[a]);
    Slot& s = slots[i];
    s.result.feature = col.name;
    s.result.attribute = attrs[a];
    s.result.n = rows.size();
    if (rows.size() < 3) return;
    try {
      if (col.kind == features::ColumnKind::kNumeric) {
        if (!info.ordinal) return;
        std::vector<double> x;
        x.reserve(rows.size());
        for (size_t r : rows) x.push_back(f.numeric[c][r]);
        const auto res = spearman(x, codes[a]);
        s.result.metric = Metric::kSpearman;
        s.result.value = res.value;
        s.result.p_value = res.p_value;
      } else {
        std::vector<std::string> x;
        x.reserve(rows.size());
        if (col.kind == features::ColumnKind::kCategorical) {
          for (size_t r : rows) x.push_back(f.categorical[c][r]);
        } else {
          for (size_t r : rows) x.push_back(f.numeric[c][r] != 0.0 ? "1" : "0");
        }
        std::vector<std::string> y;
        y.reserve(rows.size());
        for (double v : codes[a]) y.push_back(std::to_string(static_cast<int>(v)));
        const auto res = cramers_v(x, y, options.bias_corrected);
        s.result.metric = Metric::kCramersV;
        s.result.value = res.value;
        s.result.p_value = res.p_value;
      }
      s.defined = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateInput) throw;
      s.degenerate = true;
    }
  });

  CorrelationReport out;
  for (auto& s : slots) {
    if (s.degenerate) ++out.degenerate;
    if (!s.defined) continue;
    s.result.strong = std::fabs(s.result.value) > options.strong_threshold;
    out.all.push_back(s.result);
  }
  for (size_t a = 0; a < attrs.size(); ++a) {
    std::vector<CorrelationResult> kept;
    for (const auto& r : out.all) {
      if (r.attribute == attrs[a] && r.p_value < options.alpha) kept.push_back(r);
    }
    // Stable sort keeps column order among equal strengths.
    std::stable_sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) {
      const double ax = std::fabs(x.value), ay = std::fabs(y.value);
      if (ax != ay) return ax > ay;
      return x.p_value < y.p_value;
    });
    if (kept.size() > options.top_k) kept.resize(options.top_k);
    out.top[a] = std::move(kept);
  }
  return out;
}

std::vector<SignificanceCell> significance_counts(const std::vector<CorrelationResult>& results,
                                                  const std::vector<double>& alphas) {
  std::vector<double> sorted = alphas;
  std::sort(sorted.begin(), sorted.end());
  std::vector<SignificanceCell> out;
  for (auto attr : attributes::all_attributes()) {
    for (Metric metric : {Metric::kSpearman, Metric::kCramersV}) {
      for (double alpha : sorted) {
        size_t count = 0;
        for (const auto& r : results) {
          if (r.attribute == attr && r.metric == metric && r.p_value < alpha) ++count;
        }
        out.push_back({attr, metric, alpha, count});
      }
    }
  }
  return out;
}

}  // namespace aia::stats
