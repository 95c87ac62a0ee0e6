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
#include "models/model.hpp"

#include <cmath>
#include <set>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "eval/metrics.hpp"

namespace aia::models {
namespace {

using Json = nlohmann::json;
constexpr int kModelFormat = 1;

}  // namespace

std::vector<Hyperparams> HyperparamGrid::points() const {
  std::vector<Hyperparams> out(1);
  for (const auto& [name, values] : axes) {
    if (values.empty()) fail(ErrorCode::kConfig, "grid axis '" + name + "' is empty");
    std::vector<Hyperparams> next;
    for (const auto& p : out) {
      for (double v : values) {
        Hyperparams q = p;
        q.values[name] = v;
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  return out;
}

Json HyperparamGrid::to_json() const {
  Json j = Json::array();
  for (const auto& [name, values] : axes) j.push_back({{"name", name}, {"values", values}});
  return j;
}

HyperparamGrid HyperparamGrid::from_json(const Json& j) {
  HyperparamGrid g;
  try {
    if (j.is_object()) {
      for (const auto& [name, values] : j.items()) {
        g.axes.emplace_back(name, values.get<std::vector<double>>());
      }
    } else {
      for (const auto& a : j) {
        g.axes.emplace_back(a.at("name").get<std::string>(),
                            a.at("values").get<std::vector<double>>());
      }
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kConfig, std::string("hyperparameter grid: ") + e.what());
  }
  return g;
}

HyperparamGrid default_grid(Algorithm algorithm, GridPreset preset) {
  const bool full = preset == GridPreset::kFull;
  HyperparamGrid g;
  switch (algorithm) {
    case Algorithm::kLogisticRegression:
      g.axes = {{"l2", full ? std::vector<double>{0.01, 0.1, 1, 10} : std::vector<double>{0.1, 1}}};
      break;
    case Algorithm::kDecisionTree:
      g.axes = {{"max_depth", full ? std::vector<double>{3, 5, 10, 0} : std::vector<double>{3, 5}},
                {"min_leaf", full ? std::vector<double>{1, 5, 20} : std::vector<double>{1, 5}}};
      break;
    case Algorithm::kRandomForest:
      g.axes = {{"trees", full ? std::vector<double>{100, 300} : std::vector<double>{50}},
                {"max_depth", full ? std::vector<double>{3, 5, 10, 0} : std::vector<double>{5, 0}}};
      break;
    case Algorithm::kMlp:
      g.axes = {{"hidden", full ? std::vector<double>{32, 128} : std::vector<double>{32}},
                {"learning_rate",
                 full ? std::vector<double>{1e-2, 1e-3} : std::vector<double>{1e-2}},
                {"max_epochs", {full ? 200.0 : 100.0}}};
      break;
    case Algorithm::kDummyStratified:
      break;
  }
  return g;
}

std::string_view selection_metric_name(SelectionMetric m) {
  switch (m) {
    case SelectionMetric::kMacroF1: return "macro_f1";
    case SelectionMetric::kPrecision: return "precision";
    case SelectionMetric::kAccuracy: return "accuracy";
  }
  return "macro_f1";
}

SelectionMetric selection_metric_from_name(std::string_view s) {
  if (s == "macro_f1" || s == "f1") return SelectionMetric::kMacroF1;
  if (s == "precision") return SelectionMetric::kPrecision;
  if (s == "accuracy") return SelectionMetric::kAccuracy;
  fail(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(s) + "'");
}

Dense resample(const Dense& data, const ResampleOptions& options, uint64_t seed,
               ResampleLog* log) {
  if (!options.enabled) return data;
  Dense cleaned = enn_undersample(data, options.enn_k, log);
  return smote_oversample(cleaned, options.smote_k, seed, log);
}

std::vector<int> stratified_folds(const std::vector<int>& y, int k, uint64_t seed) {
  if (k < 2) fail(ErrorCode::kInvalidArgument, "need at least two folds");
  std::map<int, std::vector<size_t>> by_class;
  for (size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  std::vector<int> fold(y.size(), 0);
  Rng rng(seed);
  int next = 0;
  for (auto& [_, rows] : by_class) {
    rng.shuffle(rows);
    for (size_t r : rows) {
      fold[r] = next;
      next = (next + 1) % k;
    }
  }
  return fold;
}

double selection_score(SelectionMetric metric, const std::vector<int>& y_true,
                       const std::vector<int>& y_pred, int n_classes) {
  const auto m = eval::compute_metrics(y_true, y_pred, n_classes);
  switch (metric) {
    case SelectionMetric::kMacroF1: return m.macro_f1;
    case SelectionMetric::kAccuracy: return m.accuracy;
    case SelectionMetric::kPrecision: return n_classes == 2 ? m.positive_precision : m.precision;
  }
  return m.macro_f1;
}

GridResult grid_search(Algorithm algorithm, const HyperparamGrid& grid, const Dense& data,
                       int inner_folds, SelectionMetric metric, uint64_t seed,
                       const ResampleOptions& resampling) {
  if (inner_folds < 2) fail(ErrorCode::kInvalidArgument, "inner_folds must be at least 2");
  const auto points = grid.points();
  GridResult out;
  out.best = points.front();
  if (points.size() == 1) {
    out.scores.assign(1, 0.0);
    return out;
  }
  const auto fold = stratified_folds(data.y, inner_folds, derive_seed(seed, {0}));
  // Resampled training folds are shared by every grid point.
  std::vector<Dense> train(inner_folds);
  std::vector<Dense> test(inner_folds);
  for (int f = 0; f < inner_folds; ++f) {
    std::vector<size_t> tr, te;
    for (size_t i = 0; i < data.n; ++i) (fold[i] == f ? te : tr).push_back(i);
    train[f] = resample(data.subset(tr), resampling, derive_seed(seed, {1, static_cast<uint64_t>(f)}));
    test[f] = data.subset(te);
  }
  double best = -1.0;
  for (size_t p = 0; p < points.size(); ++p) {
    std::vector<int> truth, pred;
    for (int f = 0; f < inner_folds; ++f) {
      if (test[f].n == 0 || train[f].n == 0) continue;
      auto model = fit_classifier(algorithm, train[f], points[p],
                                  derive_seed(seed, {2, p, static_cast<uint64_t>(f)}));
      for (size_t i = 0; i < test[f].n; ++i) {
        truth.push_back(test[f].y[i]);
        pred.push_back(eval::argmax(model->predict_proba(test[f].row(i))));
      }
    }
    const double score = truth.empty() ? 0.0 : selection_score(metric, truth, pred, data.n_classes);
    out.scores.push_back(score);
    if (score > best) {
      best = score;
      out.best = points[p];
    }
  }
  return out;
}

std::vector<double> TrainedModel::predict_proba_dense(std::span<const double> row) const {
  if (row.size() != recipe.width()) {
    fail(ErrorCode::kSchemaMismatch, "row width differs from the model input width");
  }
  return impl->predict_proba(row);
}

std::vector<double> TrainedModel::predict_proba(const features::FeatureMatrix& f,
                                                size_t row) const {
  return predict_proba(f, std::vector<size_t>{row}).front();
}

std::vector<std::vector<double>> TrainedModel::predict_proba(
    const features::FeatureMatrix& f, const std::vector<size_t>& rows) const {
  const Dense d = recipe.transform(f, rows, {}, static_cast<int>(class_list.size()));
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (size_t i = 0; i < d.n; ++i) out.push_back(impl->predict_proba(d.row(i)));
  return out;
}

Json TrainedModel::to_json() const {
  return {{"format_version", kModelFormat},
          {"algorithm", std::string(algorithm_name(algorithm))},
          {"classes", class_list},
          {"schema_hash", recipe.source_schema_hash},
          {"recipe", recipe.to_json()},
          {"params", params.to_json()},
          {"seed", seed},
          {"fit", {{"converged", fit_info.converged}, {"iterations", fit_info.iterations}}},
          {"model", impl->to_json()}};
}

TrainedModel TrainedModel::from_json(const Json& j) {
  TrainedModel m;
  try {
    if (j.at("format_version").get<int>() != kModelFormat) {
      fail(ErrorCode::kSchemaMismatch, "unsupported model format version");
    }
    m.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
    m.class_list = j.at("classes").get<std::vector<std::string>>();
    m.recipe = Recipe::from_json(j.at("recipe"));
    if (j.at("schema_hash").get<std::string>() != m.recipe.source_schema_hash) {
      fail(ErrorCode::kSchemaMismatch, "model schema hash disagrees with its recipe");
    }
    for (const auto& [k, v] : j.at("params").items()) m.params.values[k] = v.get<double>();
    m.seed = j.at("seed").get<uint64_t>();
    m.fit_info.converged = j.at("fit").at("converged").get<bool>();
    m.fit_info.iterations = j.at("fit").at("iterations").get<int>();
    m.impl = classifier_from_json(m.algorithm, j.at("model"));
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchema, std::string("model file: ") + e.what());
  }
  return m;
}

TrainedModel fit_dense(const Recipe& recipe, const Dense& data,
                       const std::vector<std::string>& class_list, Algorithm algorithm,
                       const Hyperparams& params, uint64_t seed) {
  TrainedModel m;
  m.algorithm = algorithm;
  m.class_list = class_list;
  m.recipe = recipe;
  m.params = params;
  m.seed = seed;
  m.impl = fit_classifier(algorithm, data, params, seed, &m.fit_info);
  return m;
}

TrainedModel fit(const features::FeatureMatrix& f, const std::vector<size_t>& rows,
                 const std::vector<int>& y, const std::vector<std::string>& class_list,
                 const TrainOptions& options) {
  if (rows.size() != y.size()) fail(ErrorCode::kLengthMismatch, "rows and labels differ in length");
  const int k = static_cast<int>(class_list.size());
  std::set<int> present;
  for (int v : y) {
    if (v < 0 || v >= k) fail(ErrorCode::kInvalidArgument, "label code outside class_list");
    present.insert(v);
  }
  if (present.size() < 2 && options.algorithm != Algorithm::kDummyStratified) {
    fail(ErrorCode::kInvalidArgument, "training data needs at least two classes");
  }
  const Recipe recipe = fit_recipe(f, rows, y, options.max_features);
  Dense d = recipe.transform(f, rows, y, k);
  ResampleLog log;
  d = resample(d, options.resampling, derive_seed(options.seed, {7}), &log);
  TrainedModel m = fit_dense(recipe, d, class_list, options.algorithm, options.params, options.seed);
  m.resample_log = log;
  return m;
}

std::string save_model(const TrainedModel& model) { return model.to_json().dump() + "\n"; }

TrainedModel load_model(const std::string& text, const std::string& expected_schema_hash) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::kSchema, "model file is not JSON");
  TrainedModel m = TrainedModel::from_json(j);
  if (!expected_schema_hash.empty() && m.recipe.source_schema_hash != expected_schema_hash) {
    fail(ErrorCode::kSchemaMismatch, "model was trained on a different feature schema");
  }
  return m;
}

}  // namespace aia::models
