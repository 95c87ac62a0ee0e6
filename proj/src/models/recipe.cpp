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
#include "models/recipe.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "common/error.hpp"
#include "stats/correlation.hpp"

namespace aia::models {
namespace {

using features::ColumnKind;

bool is_constant(const features::FeatureMatrix& f, size_t c, const std::vector<size_t>& rows) {
  if (rows.empty()) return true;
  if (f.columns[c].kind == ColumnKind::kCategorical) {
    const auto& v = f.categorical[c];
    for (size_t r : rows) {
      if (v[r] != v[rows[0]]) return false;
    }
    return true;
  }
  const auto& v = f.numeric[c];
  for (size_t r : rows) {
    if (v[r] != v[rows[0]]) return false;
  }
  return true;
}

}  // namespace

std::vector<size_t> select_features(const features::FeatureMatrix& f, const std::vector<size_t>& rows,
                                    const std::vector<int>& y, size_t max_features) {
  if (max_features == 0) fail(ErrorCode::kInvalidArgument, "max_features must be at least 1");
  if (y.size() != rows.size()) fail(ErrorCode::kLengthMismatch, "labels and rows differ in length");
  struct Score {
    size_t col;
    double p;
    double strength;
  };
  std::vector<Score> scores;
  std::vector<double> yd(y.begin(), y.end());
  std::vector<int64_t> yc(y.begin(), y.end());
  for (size_t c = 0; c < f.cols(); ++c) {
    if (is_constant(f, c, rows)) continue;
    Score s{c, 1.0, 0.0};
    try {
      if (rows.size() >= 3) {
        if (f.columns[c].kind == ColumnKind::kNumeric) {
          std::vector<double> x;
          x.reserve(rows.size());
          for (size_t r : rows) x.push_back(f.numeric[c][r]);
          const auto a = stats::spearman(x, yd);
          s.p = a.p_value;
          s.strength = std::fabs(a.value);
        } else {
          std::vector<int64_t> x;
          x.reserve(rows.size());
          if (f.columns[c].kind == ColumnKind::kCategorical) {
            std::map<std::string, int64_t> codes;
            for (size_t r : rows) {
              auto [it, _] = codes.emplace(f.categorical[c][r], static_cast<int64_t>(codes.size()));
              x.push_back(it->second);
            }
          } else {
            for (size_t r : rows) x.push_back(f.numeric[c][r] != 0.0 ? 1 : 0);
          }
          const auto a = stats::cramers_v(x, yc);
          s.p = a.p_value;
          s.strength = a.value;
        }
      }
    } catch (const Error& e) {
      // A single observed class leaves every column unscored.
      if (e.code() != ErrorCode::kDegenerateInput) throw;
    }
    scores.push_back(s);
  }
  std::stable_sort(scores.begin(), scores.end(), [](const Score& a, const Score& b) {
    if (a.p != b.p) return a.p < b.p;
    return a.strength > b.strength;
  });
  if (scores.size() > max_features) scores.resize(max_features);
  std::vector<size_t> out;
  for (const auto& s : scores) out.push_back(s.col);
  std::sort(out.begin(), out.end());
  return out;
}

size_t Recipe::width() const {
  size_t w = 0;
  for (const auto& in : inputs) {
    w += in.kind == ColumnKind::kCategorical ? in.categories.size() : 1;
  }
  return w;
}

std::vector<std::string> Recipe::output_names() const {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (in.kind == ColumnKind::kCategorical) {
      for (const auto& c : in.categories) out.push_back(in.name + "=" + c);
    } else {
      out.push_back(in.name);
    }
  }
  return out;
}

void Recipe::transform_row(const features::FeatureMatrix& f, size_t row,
                           std::span<double> out) const {
  size_t k = 0;
  for (const auto& in : inputs) {
    if (in.kind == ColumnKind::kCategorical) {
      const auto& v = f.categorical[in.source_col][row];
      for (const auto& c : in.categories) out[k++] = v == c ? 1.0 : 0.0;
    } else {
      const double v = f.numeric[in.source_col][row];
      out[k++] = in.hi > in.lo ? (v - in.lo) / (in.hi - in.lo) : 0.0;
    }
  }
}

Dense Recipe::transform(const features::FeatureMatrix& f, const std::vector<size_t>& rows,
                        const std::vector<int>& y, int n_classes) const {
  if (f.schema_hash() != source_schema_hash) {
    fail(ErrorCode::kSchemaMismatch, "feature matrix schema differs from the training schema");
  }
  Dense d;
  d.n = rows.size();
  d.d = width();
  d.n_classes = n_classes;
  d.x.assign(d.n * d.d, 0.0);
  for (size_t i = 0; i < rows.size(); ++i) transform_row(f, rows[i], d.row(i));
  if (!y.empty()) {
    if (y.size() != rows.size()) fail(ErrorCode::kLengthMismatch, "labels and rows differ");
    d.y = y;
  }
  return d;
}

nlohmann::json Recipe::to_json() const {
  nlohmann::json in = nlohmann::json::array();
  for (const auto& i : inputs) {
    in.push_back({{"source_col", i.source_col},
                  {"name", i.name},
                  {"kind", std::string(features::column_kind_name(i.kind))},
                  {"lo", i.lo},
                  {"hi", i.hi},
                  {"categories", i.categories}});
  }
  return {{"inputs", in},
          {"source_schema_hash", source_schema_hash},
          {"dropped_constant", dropped_constant}};
}

Recipe Recipe::from_json(const nlohmann::json& j) {
  Recipe r;
  for (const auto& i : j.at("inputs")) {
    RecipeInput in;
    in.source_col = i.at("source_col").get<size_t>();
    in.name = i.at("name").get<std::string>();
    const auto kind = i.at("kind").get<std::string>();
    in.kind = kind == "categorical" ? ColumnKind::kCategorical
              : kind == "boolean"   ? ColumnKind::kBoolean
                                    : ColumnKind::kNumeric;
    in.lo = i.at("lo").get<double>();
    in.hi = i.at("hi").get<double>();
    in.categories = i.at("categories").get<std::vector<std::string>>();
    r.inputs.push_back(std::move(in));
  }
  r.source_schema_hash = j.at("source_schema_hash").get<std::string>();
  r.dropped_constant = j.at("dropped_constant").get<std::vector<std::string>>();
  return r;
}

Recipe fit_recipe(const features::FeatureMatrix& f, const std::vector<size_t>& train_rows,
                  const std::vector<int>& y, size_t max_features) {
  Recipe r;
  r.source_schema_hash = f.schema_hash();
  std::vector<size_t> cols;
  if (max_features == 0 || max_features >= f.cols()) {
    for (size_t c = 0; c < f.cols(); ++c) cols.push_back(c);
  } else {
    cols = select_features(f, train_rows, y, max_features);
  }
  for (size_t c = 0; c < f.cols(); ++c) {
    if (is_constant(f, c, train_rows)) r.dropped_constant.push_back(f.columns[c].name);
  }
  for (size_t c : cols) {
    if (is_constant(f, c, train_rows)) continue;
    RecipeInput in;
    in.source_col = c;
    in.name = f.columns[c].name;
    in.kind = f.columns[c].kind;
    if (in.kind == ColumnKind::kCategorical) {
      std::set<std::string> levels;
      for (size_t row : train_rows) levels.insert(f.categorical[c][row]);
      in.categories.assign(levels.begin(), levels.end());
    } else {
      in.lo = in.hi = f.numeric[c][train_rows[0]];
      for (size_t row : train_rows) {
        in.lo = std::min(in.lo, f.numeric[c][row]);
        in.hi = std::max(in.hi, f.numeric[c][row]);
      }
    }
    r.inputs.push_back(std::move(in));
  }
  return r;
}

}  // namespace aia::models
