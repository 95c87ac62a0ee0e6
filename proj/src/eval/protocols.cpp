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
#include "eval/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/util.hpp"
#include "eval/metrics.hpp"

namespace aia::eval {
namespace {

using attributes::Attribute;
using features::FeatureMatrix;
using models::Algorithm;
using Json = nlohmann::json;

size_t attr_index(Attribute a) { return static_cast<size_t>(a); }

std::string attr_name(Attribute a) { return std::string(attributes::info(a).name); }

std::vector<std::string> class_names(Attribute a) { return attributes::info(a).classes; }

std::map<uint64_t, std::vector<size_t>> rows_by_owner(const FeatureMatrix& f,
                                                       const LabelMap& labels) {
  std::map<uint64_t, std::vector<size_t>> out;
  for (size_t r = 0; r < f.rows(); ++r) {
    if (labels.count(f.row_owner[r]) != 0) out[f.row_owner[r]].push_back(r);
  }
  return out;
}

struct PlayerSplit {
  std::vector<uint64_t> train, validation, test;
};

// Stratified by the per-owner label. Every class with at least two members
// lands in the test side at least once; the validation share is carved out
// of the remaining training owners the same way.
PlayerSplit split_players(const std::vector<uint64_t>& owners, const std::vector<int>& y,
                          double test_fraction, double validation_fraction, uint64_t seed) {
  std::map<int, std::vector<uint64_t>> by_class;
  for (size_t i = 0; i < owners.size(); ++i) by_class[y[i]].push_back(owners[i]);
  Rng rng(seed);
  PlayerSplit s;
  for (auto& [_, members] : by_class) {
    rng.shuffle(members);
    const size_t n = members.size();
    size_t n_test = static_cast<size_t>(std::lround(test_fraction * static_cast<double>(n)));
    if (n_test == 0 && n >= 2 && test_fraction > 0.0) n_test = 1;
    size_t rest = n - n_test;
    size_t n_val = static_cast<size_t>(std::lround(validation_fraction * static_cast<double>(rest)));
    if (n_val == 0 && rest >= 3 && validation_fraction > 0.0) n_val = 1;
    for (size_t i = 0; i < n; ++i) {
      if (i < n_test) {
        s.test.push_back(members[i]);
      } else if (i < n_test + n_val) {
        s.validation.push_back(members[i]);
      } else {
        s.train.push_back(members[i]);
      }
    }
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<size_t> gather(const std::map<uint64_t, std::vector<size_t>>& by_owner,
                           const std::vector<uint64_t>& owners) {
  std::vector<size_t> rows;
  for (uint64_t o : owners) {
    const auto& r = by_owner.at(o);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

std::vector<int> labels_for(const FeatureMatrix& f, const std::vector<size_t>& rows,
                            const LabelMap& labels, Attribute a) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (size_t r : rows) y.push_back(labels.at(f.row_owner[r])[a]);
  return y;
}

std::vector<uint64_t> owners_of(const FeatureMatrix& f, const std::vector<size_t>& rows) {
  std::vector<uint64_t> o;
  for (size_t r : rows) o.push_back(f.row_owner[r]);
  return o;
}

size_t distinct(const std::vector<int>& y) { return std::set<int>(y.begin(), y.end()).size(); }

int min_class_count(const std::vector<int>& y) {
  std::map<int, int> c;
  for (int v : y) ++c[v];
  int m = std::numeric_limits<int>::max();
  for (const auto& [_, n] : c) m = std::min(m, n);
  return c.empty() ? 0 : m;
}

std::vector<double> priors_of(const std::vector<int>& y, int k) {
  std::vector<double> p(k, 0.0);
  for (int v : y) p[v] += 1.0;
  for (double& v : p) v /= static_cast<double>(y.size());
  return p;
}

std::vector<int> sample_dummy(const std::vector<double>& priors, size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<int> out(n);
  for (auto& v : out) v = static_cast<int>(rng.categorical(priors));
  return out;
}

// Recipe fitted on training rows plus the transformed training design,
// before and after resampling.
struct Prepared {
  models::Recipe recipe;
  models::Dense raw;
  models::Dense balanced;
};

Prepared prepare(const FeatureMatrix& f, const std::vector<size_t>& rows, const std::vector<int>& y,
                 int k, const ProtocolOptions& o, uint64_t seed) {
  Prepared p;
  p.recipe = models::fit_recipe(f, rows, y, o.max_features);
  p.raw = p.recipe.transform(f, rows, y, k);
  p.balanced = models::resample(p.raw, o.resampling, seed);
  return p;
}

std::vector<int> argmax_all(const models::TrainedModel& m, const models::Dense& d) {
  std::vector<int> out;
  out.reserve(d.n);
  for (size_t i = 0; i < d.n; ++i) out.push_back(argmax(m.impl->predict_proba(d.row(i))));
  return out;
}

// Constant prediction used when a training split holds one class only.
models::TrainedModel constant_model(const models::Recipe& recipe, int k, int cls,
                                    const std::vector<std::string>& names) {
  models::Dense one{0, recipe.width(), {}, {}, k};
  std::vector<double> zero(recipe.width(), 0.0);
  one.push_back(zero, cls);
  return models::fit_dense(recipe, one, names, Algorithm::kDummyStratified, {}, 0);
}

std::vector<Algorithm> learners(const ProtocolOptions& o) {
  std::vector<Algorithm> out;
  for (Algorithm a : o.algorithms) {
    if (a != Algorithm::kDummyStratified) out.push_back(a);
  }
  if (out.empty()) fail(ErrorCode::kConfig, "protocol needs at least one non-dummy algorithm");
  return out;
}

// Model selected on validation rows (macro F1) among every learner and grid
// point; ties keep the earliest candidate.
models::TrainedModel select_on_validation(const Prepared& prep, const models::Dense& val,
                                          const std::vector<Algorithm>& algs,
                                          const ProtocolOptions& o, int k,
                                          const std::vector<std::string>& names, uint64_t seed,
                                          std::string* chosen) {
  if (distinct(prep.raw.y) < 2) {
    if (chosen) *chosen = "constant";
    return constant_model(prep.recipe, k, prep.raw.y.front(), names);
  }
  std::optional<models::TrainedModel> best;
  double best_score = -1.0;
  uint64_t idx = 0;
  for (Algorithm a : algs) {
    const auto points = o.grid_for(a).points();
    for (const auto& hp : points) {
      auto m = models::fit_dense(prep.recipe, prep.balanced, names, a, hp, derive_seed(seed, {idx++}));
      double score = 0.0;
      if (val.n > 0) score = models::selection_score(o.metric, val.y, argmax_all(m, val), k);
      if (!best || score > best_score) {
        best_score = score;
        best = std::move(m);
        if (chosen) *chosen = std::string(models::algorithm_name(a)) + " " + hp.to_json().dump();
      }
      if (val.n == 0) break;
    }
  }
  return *best;
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.5 + 0.05 * i);
  return t;
}

}  // namespace

models::HyperparamGrid ProtocolOptions::grid_for(Algorithm a) const {
  auto it = grids.find(a);
  return it != grids.end() ? it->second : models::default_grid(a, grid_preset);
}

std::vector<Attribute> ProtocolOptions::attribute_list() const {
  if (!attributes.empty()) return attributes;
  const auto& all = attributes::all_attributes();
  return {all.begin(), all.end()};
}

std::vector<size_t> ProtocolOptions::sweep() const {
  if (!n_sweep.empty()) return n_sweep;
  std::vector<size_t> s(30);
  std::iota(s.begin(), s.end(), size_t{1});
  return s;
}

Json ProtocolOptions::to_json() const {
  Json algs = Json::array(), grids_json = Json::object();
  for (Algorithm a : algorithms) {
    algs.push_back(std::string(models::algorithm_name(a)));
    grids_json[std::string(models::algorithm_name(a))] = grid_for(a).to_json();
  }
  Json attrs = Json::array();
  for (Attribute a : attribute_list()) attrs.push_back(attr_name(a));
  return {{"algorithms", algs},
          {"grids", grids_json},
          {"attributes", attrs},
          {"outer_folds", outer_folds},
          {"inner_folds", inner_folds},
          {"selection_metric", std::string(models::selection_metric_name(metric))},
          {"resampling",
           {{"enabled", resampling.enabled},
            {"order", "enn_then_smote"},
            {"enn_k", resampling.enn_k},
            {"smote_k", resampling.smote_k}}},
          {"max_features", max_features},
          {"feature_selection", "univariate_p_value"},
          {"test_fraction", test_fraction},
          {"validation_fraction", validation_fraction},
          {"repeats", repeats},
          {"targeted_repeats", targeted_repeats},
          {"n_sweep", sweep()},
          {"draws", draws},
          {"indiscriminate_n", indiscriminate_n},
          {"thresholds", thresholds.empty() ? default_thresholds() : thresholds},
          {"argmax_ties", "schema_order"},
          {"seed", seed}};
}

const MetricCell* AttackReport::find(std::string_view dataset, std::string_view attribute,
                                     std::string_view model, std::string_view metric) const {
  for (const auto& c : cells) {
    if (c.dataset == dataset && c.attribute == attribute && c.model == model && c.metric == metric) {
      return &c;
    }
  }
  return nullptr;
}

Json AttackReport::to_json() const {
  Json cj = Json::array();
  for (const auto& c : cells) {
    cj.push_back({{"dataset", c.dataset}, {"attribute", c.attribute}, {"model", c.model},
                  {"metric", c.metric},   {"mean", c.mean},           {"std", c.std},
                  {"n_runs", c.n_runs}});
  }
  Json cv = Json::array();
  for (const auto& p : curves) {
    cv.push_back({{"attribute", p.attribute}, {"series", p.series}, {"n", p.n},
                  {"mean", p.mean},           {"std", p.std},       {"n_runs", p.n_runs},
                  {"headline", p.headline}});
  }
  return {{"protocol", protocol},
          {"cells", cj},
          {"curves", cv},
          {"config", config},
          {"notes", notes},
          {"player_disjoint", player_disjoint},
          {"disjointness_checks", disjointness_checks}};
}

std::string AttackReport::cells_csv() const {
  std::string out = "dataset,attribute,model,metric,mean,std,n_runs\n";
  for (const auto& c : cells) {
    out += c.dataset + "," + c.attribute + "," + c.model + "," + c.metric + "," +
           format_double(c.mean) + "," + format_double(c.std) + "," + std::to_string(c.n_runs) +
           "\n";
  }
  return out;
}

std::string AttackReport::curves_csv() const {
  std::string out = "attribute,series,n,mean,std,n_runs,headline\n";
  for (const auto& p : curves) {
    out += p.attribute + "," + p.series + "," + std::to_string(p.n) + "," + format_double(p.mean) +
           "," + format_double(p.std) + "," + std::to_string(p.n_runs) + "," +
           (p.headline ? "1" : "0") + "\n";
  }
  return out;
}

Summary summarize(const std::vector<double>& v) {
  Summary s;
  std::vector<double> ok;
  for (double x : v) {
    if (std::isfinite(x)) ok.push_back(x);
  }
  s.n = ok.size();
  if (ok.empty()) return s;
  s.mean = mean(ok);
  s.std = ok.size() > 1 ? stddev(ok) : 0.0;
  return s;
}

void assert_player_disjoint(const std::vector<uint64_t>& train, const std::vector<uint64_t>& test) {
  std::set<uint64_t> a(train.begin(), train.end());
  for (uint64_t o : test) {
    if (a.count(o) != 0) {
      fail(ErrorCode::kInternal, "player " + std::to_string(o) + " is on both sides of a split");
    }
  }
}

AveragedPrediction sophisticated_predict(const std::vector<std::vector<double>>& match_probas) {
  if (match_probas.empty()) fail(ErrorCode::kEmptyInput, "no match predictions to average");
  AveragedPrediction out;
  out.average.assign(match_probas.front().size(), 0.0);
  for (const auto& p : match_probas) {
    if (p.size() != out.average.size()) {
      fail(ErrorCode::kLengthMismatch, "probability vectors differ in length");
    }
    for (size_t c = 0; c < p.size(); ++c) out.average[c] += p[c];
  }
  for (double& v : out.average) v /= static_cast<double>(match_probas.size());
  out.predicted = argmax(out.average);
  return out;
}

AttackReport simple_aia(const FeatureMatrix& p, const LabelMap& labels,
                        const ProtocolOptions& o) {
  if (p.variant != features::Variant::kP) {
    fail(ErrorCode::kInvalidArgument, "the simple protocol runs on the per-player matrix");
  }
  AttackReport report;
  report.protocol = "simple";
  report.config = o.to_json();
  const auto attrs = o.attribute_list();
  std::vector<size_t> rows;
  for (size_t r = 0; r < p.rows(); ++r) {
    if (labels.count(p.row_owner[r]) != 0) rows.push_back(r);
  }
  if (rows.size() < 4) fail(ErrorCode::kEmptyInput, "too few labelled players for cross-validation");

  struct Plan {
    Attribute attr;
    std::vector<int> y;
    std::vector<int> fold;
    int k;
  };
  std::vector<Plan> plans;
  for (size_t ai = 0; ai < attrs.size(); ++ai) {
    Plan plan{attrs[ai], labels_for(p, rows, labels, attrs[ai]), {}, o.outer_folds};
    const int smallest = min_class_count(plan.y);
    if (smallest < plan.k) {
      plan.k = std::max(2, smallest);
      report.notes.push_back(attr_name(attrs[ai]) + ": smallest class has " +
                             std::to_string(smallest) + " members, using " +
                             std::to_string(plan.k) + " outer folds");
    }
    plan.fold = models::stratified_folds(plan.y, plan.k, derive_seed(o.seed, {attr_index(attrs[ai]), 0}));
    plans.push_back(std::move(plan));
  }
  struct Unit {
    size_t plan;
    int fold;
  };
  std::vector<Unit> units;
  for (size_t pi = 0; pi < plans.size(); ++pi) {
    for (int f = 0; f < plans[pi].k; ++f) units.push_back({pi, f});
  }
  // scores[unit][algorithm]
  std::vector<std::vector<double>> scores(units.size());
  parallel_for(units.size(), o.jobs, [&](size_t ui) {
    const Plan& plan = plans[units[ui].plan];
    const int f = units[ui].fold;
    const Attribute a = plan.attr;
    const int k = static_cast<int>(attributes::class_count(a));
    const auto names = class_names(a);
    std::vector<size_t> train, test;
    std::vector<int> ytr, yte;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (plan.fold[i] == f) {
        test.push_back(rows[i]);
        yte.push_back(plan.y[i]);
      } else {
        train.push_back(rows[i]);
        ytr.push_back(plan.y[i]);
      }
    }
    assert_player_disjoint(owners_of(p, train), owners_of(p, test));
    const uint64_t useed = derive_seed(o.seed, {attr_index(a), 1, static_cast<uint64_t>(f)});
    const Prepared prep = prepare(p, train, ytr, k, o, derive_seed(useed, {0}));
    const models::Dense test_d = prep.recipe.transform(p, test, yte, k);
    for (size_t ai = 0; ai < o.algorithms.size(); ++ai) {
      const Algorithm alg = o.algorithms[ai];
      const uint64_t aseed = derive_seed(useed, {1, ai});
      std::vector<int> pred;
      if (alg == Algorithm::kDummyStratified) {
        pred = sample_dummy(priors_of(ytr, k), test.size(), aseed);
      } else if (distinct(ytr) < 2) {
        pred.assign(test.size(), ytr.front());
      } else {
        const auto grid = o.grid_for(alg);
        models::Hyperparams hp = grid.points().front();
        const int inner = std::min(o.inner_folds, min_class_count(ytr));
        if (inner >= 2 && grid.points().size() > 1) {
          hp = models::grid_search(alg, grid, prep.raw, inner, o.metric, aseed, o.resampling).best;
        }
        const auto model = models::fit_dense(prep.recipe, prep.balanced, names, alg, hp, aseed);
        pred = argmax_all(model, test_d);
      }
      scores[ui].push_back(compute_metrics(yte, pred, k).macro_f1);
    }
  });
  report.disjointness_checks = units.size();
  for (size_t pi = 0; pi < plans.size(); ++pi) {
    for (size_t ai = 0; ai < o.algorithms.size(); ++ai) {
      std::vector<double> v;
      for (size_t ui = 0; ui < units.size(); ++ui) {
        if (units[ui].plan == pi) v.push_back(scores[ui][ai]);
      }
      const Summary s = summarize(v);
      report.cells.push_back({"P", attr_name(plans[pi].attr),
                              std::string(models::algorithm_name(o.algorithms[ai])), "macro_f1",
                              s.mean, s.std, s.n});
    }
  }
  return report;
}

namespace {

// One-match runs over (dataset, run, attribute) units. Returns cells.
std::vector<MetricCell> one_match_cells(const std::vector<const FeatureMatrix*>& runs,
                                        const std::string& dataset, const LabelMap& labels,
                                        const ProtocolOptions& o, size_t* checks) {
  const auto attrs = o.attribute_list();
  const size_t n_units = runs.size() * attrs.size();
  std::vector<std::vector<double>> scores(n_units);
  parallel_for(n_units, o.jobs, [&](size_t ui) {
    const size_t run = ui / attrs.size();
    const Attribute a = attrs[ui % attrs.size()];
    const FeatureMatrix& f = *runs[run];
    const int k = static_cast<int>(attributes::class_count(a));
    const auto names = class_names(a);
    const auto by_owner = rows_by_owner(f, labels);
    std::vector<uint64_t> owners;
    std::vector<int> yo;
    for (const auto& [owner, _] : by_owner) {
      owners.push_back(owner);
      yo.push_back(labels.at(owner)[a]);
    }
    const uint64_t split_seed = derive_seed(o.seed, {attr_index(a), 2, run});
    const auto split = split_players(owners, yo, o.test_fraction, o.validation_fraction, split_seed);
    auto fit_side = split.train;
    fit_side.insert(fit_side.end(), split.validation.begin(), split.validation.end());
    assert_player_disjoint(fit_side, split.test);
    assert_player_disjoint(split.train, split.validation);
    const auto train = gather(by_owner, split.train);
    const auto val = gather(by_owner, split.validation);
    const auto test = gather(by_owner, split.test);
    const auto ytr = labels_for(f, train, labels, a);
    const auto yva = labels_for(f, val, labels, a);
    const auto yte = labels_for(f, test, labels, a);
    const uint64_t useed = derive_seed(split_seed, {static_cast<uint64_t>(dataset.size())});
    const Prepared prep = prepare(f, train, ytr, k, o, derive_seed(useed, {0}));
    const models::Dense val_d = prep.recipe.transform(f, val, yva, k);
    const models::Dense test_d = prep.recipe.transform(f, test, yte, k);
    for (size_t ai = 0; ai < o.algorithms.size(); ++ai) {
      const Algorithm alg = o.algorithms[ai];
      const uint64_t aseed = derive_seed(useed, {1, ai});
      std::vector<int> pred;
      if (test.empty()) {
        scores[ui].push_back(std::nan(""));
        continue;
      }
      if (alg == Algorithm::kDummyStratified) {
        pred = sample_dummy(priors_of(ytr, k), test.size(), aseed);
      } else {
        const auto model = select_on_validation(prep, val_d, {alg}, o, k, names, aseed, nullptr);
        pred = argmax_all(model, test_d);
      }
      scores[ui].push_back(compute_metrics(yte, pred, k).macro_f1);
    }
  });
  if (checks) *checks += 2 * n_units;
  std::vector<MetricCell> cells;
  for (size_t ai_attr = 0; ai_attr < attrs.size(); ++ai_attr) {
    for (size_t ai = 0; ai < o.algorithms.size(); ++ai) {
      std::vector<double> v;
      for (size_t run = 0; run < runs.size(); ++run) v.push_back(scores[run * attrs.size() + ai_attr][ai]);
      const Summary s = summarize(v);
      cells.push_back({dataset, attr_name(attrs[ai_attr]),
                       std::string(models::algorithm_name(o.algorithms[ai])), "macro_f1", s.mean,
                       s.std, s.n});
    }
  }
  return cells;
}

std::vector<const FeatureMatrix*> expand_runs(const std::vector<FeatureMatrix>& variants,
                                              size_t repeats) {
  std::vector<const FeatureMatrix*> runs;
  if (variants.size() == 1 && variants[0].variant == features::Variant::kM) {
    for (size_t r = 0; r < std::max<size_t>(repeats, 1); ++r) runs.push_back(&variants[0]);
  } else {
    for (const auto& v : variants) runs.push_back(&v);
  }
  return runs;
}

}  // namespace

AttackReport one_match_aia(const std::vector<FeatureMatrix>& variants, const LabelMap& labels,
                           const ProtocolOptions& o) {
  if (variants.empty()) fail(ErrorCode::kEmptyInput, "no feature matrices given");
  for (const auto& v : variants) {
    if (v.variant == features::Variant::kP) {
      fail(ErrorCode::kInvalidArgument, "the one-match protocol runs on per-match matrices");
    }
  }
  AttackReport report;
  report.protocol = "one_match";
  report.config = o.to_json();
  const auto runs = expand_runs(variants, o.repeats);
  report.cells = one_match_cells(runs, std::string(features::variant_name(variants[0].variant)),
                                 labels, o, &report.disjointness_checks);
  return report;
}

AttackReport one_match_comparison(const FeatureMatrix& m, const std::vector<FeatureMatrix>& mbar,
                                  const LabelMap& labels, const ProtocolOptions& o) {
  if (mbar.empty()) fail(ErrorCode::kEmptyInput, "no distilled matrices given");
  AttackReport report;
  report.protocol = "one_match";
  report.config = o.to_json();
  // The naive attacker repeats the split once per distilled variant so both
  // sides see the same players in every run.
  std::vector<const FeatureMatrix*> naive(mbar.size(), &m);
  std::vector<const FeatureMatrix*> expert;
  for (const auto& v : mbar) expert.push_back(&v);
  report.cells = one_match_cells(naive, "M", labels, o, &report.disjointness_checks);
  auto more = one_match_cells(expert, "Mbar", labels, o, &report.disjointness_checks);
  report.cells.insert(report.cells.end(), more.begin(), more.end());
  return report;
}

std::vector<double> sampled_accuracy(const PlayerPredictions& preds, size_t n, size_t draws,
                                     uint64_t seed, bool top2) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "n must be at least 1");
  std::vector<double> out;
  if (preds.owners.empty()) return out;
  for (size_t d = 0; d < draws; ++d) {
    Rng rng(derive_seed(seed, {d}));
    size_t correct = 0;
    for (size_t i = 0; i < preds.owners.size(); ++i) {
      const auto& matches = preds.match_probas[i];
      const auto pick = rng.sample_without_replacement(matches.size(), std::min(n, matches.size()));
      std::vector<std::vector<double>> chosen;
      chosen.reserve(pick.size());
      for (size_t j : pick) chosen.push_back(matches[j]);
      const auto avg = sophisticated_predict(chosen);
      const bool ok = top2 ? in_top2(avg.average, preds.truth[i]) : avg.predicted == preds.truth[i];
      correct += ok ? 1 : 0;
    }
    out.push_back(static_cast<double>(correct) / static_cast<double>(preds.owners.size()));
  }
  return out;
}

namespace {

// Trains on the training players of one distilled variant and returns the
// per-match probabilities of the test players.
PlayerPredictions predict_players(const FeatureMatrix& f, const LabelMap& labels, Attribute a,
                                  size_t run, const ProtocolOptions& o, std::string* chosen) {
  const int k = static_cast<int>(attributes::class_count(a));
  const auto names = class_names(a);
  const auto by_owner = rows_by_owner(f, labels);
  std::vector<uint64_t> owners;
  std::vector<int> yo;
  for (const auto& [owner, _] : by_owner) {
    owners.push_back(owner);
    yo.push_back(labels.at(owner)[a]);
  }
  const uint64_t split_seed = derive_seed(o.seed, {attr_index(a), 3, run});
  const auto split = split_players(owners, yo, o.test_fraction, o.validation_fraction, split_seed);
  auto fit_side = split.train;
  fit_side.insert(fit_side.end(), split.validation.begin(), split.validation.end());
  assert_player_disjoint(fit_side, split.test);
  assert_player_disjoint(split.train, split.validation);
  const auto train = gather(by_owner, split.train);
  const auto val = gather(by_owner, split.validation);
  const auto ytr = labels_for(f, train, labels, a);
  const auto yva = labels_for(f, val, labels, a);
  const Prepared prep = prepare(f, train, ytr, k, o, derive_seed(split_seed, {0}));
  const models::Dense val_d = prep.recipe.transform(f, val, yva, k);
  const auto model = select_on_validation(prep, val_d, learners(o), o, k, names,
                                          derive_seed(split_seed, {1}), chosen);
  PlayerPredictions out;
  out.n_classes = static_cast<size_t>(k);
  for (uint64_t owner : split.test) {
    const auto& rows = by_owner.at(owner);
    out.owners.push_back(owner);
    out.truth.push_back(labels.at(owner)[a]);
    out.match_probas.push_back(model.predict_proba(f, rows));
  }
  return out;
}

std::vector<const FeatureMatrix*> distilled_runs(const std::vector<FeatureMatrix>& mbar,
                                                 size_t repeats) {
  if (mbar.empty()) fail(ErrorCode::kEmptyInput, "no distilled matrices given");
  return expand_runs(mbar, repeats);
}

}  // namespace

AttackReport sophisticated_aia(const std::vector<FeatureMatrix>& mbar, const LabelMap& labels,
                               const ProtocolOptions& o) {
  AttackReport report;
  report.protocol = "sophisticated";
  report.config = o.to_json();
  const auto runs = distilled_runs(mbar, o.repeats);
  const auto attrs = o.attribute_list();
  const auto sweep = o.sweep();
  const size_t n_units = runs.size() * attrs.size();
  // acc[unit][sweep index] -> draws
  std::vector<std::vector<std::vector<double>>> acc(n_units);
  std::vector<std::string> chosen(n_units);
  parallel_for(n_units, o.jobs, [&](size_t ui) {
    const size_t run = ui / attrs.size();
    const Attribute a = attrs[ui % attrs.size()];
    const auto preds = predict_players(*runs[run], labels, a, run, o, &chosen[ui]);
    for (size_t si = 0; si < sweep.size(); ++si) {
      acc[ui].push_back(sampled_accuracy(preds, sweep[si], o.draws,
                                         derive_seed(o.seed, {attr_index(a), 4, run, sweep[si]})));
    }
  });
  report.disjointness_checks = 2 * n_units;
  for (size_t ai = 0; ai < attrs.size(); ++ai) {
    for (size_t si = 0; si < sweep.size(); ++si) {
      std::vector<double> all;
      for (size_t run = 0; run < runs.size(); ++run) {
        // One value per run: the mean over that run's draws.
        const auto& v = acc[run * attrs.size() + ai][si];
        if (!v.empty()) all.push_back(mean(v));
      }
      const Summary s = summarize(all);
      // The gender curve is kept but left out of the headline figure: the
      // class imbalance inflates its accuracy.
      report.curves.push_back({attr_name(attrs[ai]), "accuracy", sweep[si], s.mean, s.std, s.n,
                               attrs[ai] != Attribute::kGender});
    }
  }
  for (size_t ui = 0; ui < n_units; ++ui) {
    report.notes.push_back("run " + std::to_string(ui / attrs.size()) + " " +
                           attr_name(attrs[ui % attrs.size()]) + ": " + chosen[ui]);
  }
  return report;
}

AttackReport indiscriminate_aia(const std::vector<FeatureMatrix>& mbar, const LabelMap& labels,
                                const ProtocolOptions& o) {
  std::vector<Attribute> attrs;
  if (!o.attributes.empty()) {
    for (Attribute a : o.attributes) {
      if (attributes::class_count(a) < 3) {
        fail(ErrorCode::kAttributeArity,
             attr_name(a) + " has two classes; top-2 success would be trivial");
      }
      attrs.push_back(a);
    }
  } else {
    for (Attribute a : attributes::all_attributes()) {
      if (attributes::class_count(a) >= 3) attrs.push_back(a);
    }
  }
  ProtocolOptions local = o;
  local.attributes = attrs;
  AttackReport report;
  report.protocol = "indiscriminate";
  report.config = local.to_json();
  const auto runs = distilled_runs(mbar, o.repeats);
  const size_t n_units = runs.size() * attrs.size();
  std::vector<std::vector<double>> top1(n_units), top2(n_units);
  parallel_for(n_units, o.jobs, [&](size_t ui) {
    const size_t run = ui / attrs.size();
    const Attribute a = attrs[ui % attrs.size()];
    const auto preds = predict_players(*runs[run], labels, a, run, local, nullptr);
    const uint64_t s = derive_seed(o.seed, {attr_index(a), 5, run});
    top1[ui] = sampled_accuracy(preds, o.indiscriminate_n, o.draws, s, false);
    top2[ui] = sampled_accuracy(preds, o.indiscriminate_n, o.draws, s, true);
  });
  report.disjointness_checks = 2 * n_units;
  for (size_t ai = 0; ai < attrs.size(); ++ai) {
    std::vector<double> t1, t2, gain;
    for (size_t run = 0; run < runs.size(); ++run) {
      const size_t ui = run * attrs.size() + ai;
      for (size_t d = 0; d < top1[ui].size(); ++d) {
        if (top2[ui][d] < top1[ui][d]) {
          fail(ErrorCode::kInternal, "top-2 accuracy fell below top-1 accuracy");
        }
      }
      if (top1[ui].empty()) continue;
      t1.push_back(mean(top1[ui]));
      t2.push_back(mean(top2[ui]));
      gain.push_back(t2.back() - t1.back());
    }
    const std::string name = attr_name(attrs[ai]);
    const Summary s1 = summarize(t1), s2 = summarize(t2), sg = summarize(gain);
    report.cells.push_back({"Mbar", name, "selected", "top1_accuracy", s1.mean, s1.std, s1.n});
    report.cells.push_back({"Mbar", name, "selected", "top2_accuracy", s2.mean, s2.std, s2.n});
    report.cells.push_back({"Mbar", name, "selected", "improvement", sg.mean, sg.std, sg.n});
  }
  size_t checked = 0;
  for (const auto& v : top1) checked += v.size();
  report.notes.push_back("top-2 accuracy >= top-1 accuracy held on all " + std::to_string(checked) +
                         " draws");
  return report;
}

bool TargetSpec::matches(const attributes::AttributeLabels& l) const {
  for (const auto& [attr, accepted] : terms) {
    if (std::find(accepted.begin(), accepted.end(), l[attr]) == accepted.end()) return false;
  }
  return true;
}

Json TargetSpec::to_json() const {
  Json t = Json::array();
  for (const auto& [attr, accepted] : terms) {
    Json cls = Json::array();
    for (uint8_t c : accepted) cls.push_back(attributes::info(attr).classes[c]);
    t.push_back({{"attribute", attr_name(attr)}, {"classes", cls}});
  }
  return {{"name", name}, {"terms", t}};
}

const std::vector<TargetSpec>& builtin_targets() {
  static const std::vector<TargetSpec> kTargets = {
      {"very_young", {{Attribute::kAge, {0}}}},
      {"purchasers", {{Attribute::kPurchaseHabits, {1, 2}}}},
      {"introverts", {{Attribute::kExtraversion, {0}}}},
      {"purchasers_and_workers",
       {{Attribute::kOccupation, {1}}, {Attribute::kPurchaseHabits, {1, 2}}}},
  };
  return kTargets;
}

TargetSpec parse_target(std::string_view text) {
  for (const auto& t : builtin_targets()) {
    if (t.name == text) return t;
  }
  TargetSpec spec;
  spec.name = std::string(text);
  for (const auto& term : split(text, ',')) {
    const auto eq = term.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kInvalidArgument, "target term '" + term + "' is not attribute=classes");
    }
    const auto attr = attributes::attribute_from_name(trim(term.substr(0, eq)));
    if (!attr) fail(ErrorCode::kInvalidArgument, "unknown attribute in target '" + term + "'");
    std::vector<uint8_t> accepted;
    for (const auto& c : split(term.substr(eq + 1), '|')) {
      const auto code = attributes::class_from_name(*attr, trim(c));
      if (!code) fail(ErrorCode::kInvalidArgument, "unknown class '" + c + "' in target");
      accepted.push_back(*code);
    }
    spec.terms.emplace_back(*attr, accepted);
  }
  if (spec.terms.empty()) fail(ErrorCode::kInvalidArgument, "empty target specification");
  return spec;
}

namespace {

struct Confusion {
  double tp = 0, fp = 0, fn = 0;
  double precision() const { return tp + fp > 0 ? tp / (tp + fp) : std::nan(""); }
  double recall() const { return tp + fn > 0 ? tp / (tp + fn) : std::nan(""); }
};

// Player-level confusion from averaged positive-class probabilities.
Confusion threshold_confusion(const std::vector<double>& positive_proba,
                              const std::vector<int>& truth, double threshold) {
  Confusion c;
  for (size_t i = 0; i < truth.size(); ++i) {
    const bool pred = positive_proba[i] >= threshold;
    if (pred && truth[i] == 1) c.tp += 1;
    if (pred && truth[i] == 0) c.fp += 1;
    if (!pred && truth[i] == 1) c.fn += 1;
  }
  return c;
}

}  // namespace

AttackReport targeted_aia(const TargetSpec& target, const std::vector<FeatureMatrix>& mbar,
                          const LabelMap& labels, const ProtocolOptions& o) {
  if (target.terms.empty()) fail(ErrorCode::kInvalidArgument, "empty target specification");
  AttackReport report;
  report.protocol = "targeted";
  report.config = o.to_json();
  report.config["target"] = target.to_json();
  report.config["selection"] = "precision on validation players, then recall, then candidate order";
  if (mbar.empty()) fail(ErrorCode::kEmptyInput, "no distilled matrices given");
  std::vector<const FeatureMatrix*> runs;
  for (size_t r = 0; r < std::max<size_t>(o.targeted_repeats, 1); ++r) {
    runs.push_back(&mbar[r % mbar.size()]);
  }
  const auto sweep = o.sweep();
  const auto thresholds = o.thresholds.empty() ? default_thresholds() : o.thresholds;
  const std::vector<std::string> names = {"other", "target"};
  const uint64_t tseed = fnv1a64(target.name);

  struct RunResult {
    std::vector<double> precision, recall, untuned_precision, untuned_recall;
    std::string note;
  };
  std::vector<RunResult> results(runs.size());
  parallel_for(runs.size(), o.jobs, [&](size_t run) {
    const FeatureMatrix& f = *runs[run];
    const auto by_owner = rows_by_owner(f, labels);
    std::vector<uint64_t> owners;
    std::vector<int> yo;
    std::map<uint64_t, int> ybin;
    for (const auto& [owner, _] : by_owner) {
      owners.push_back(owner);
      const int v = target.matches(labels.at(owner)) ? 1 : 0;
      yo.push_back(v);
      ybin[owner] = v;
    }
    const uint64_t split_seed = derive_seed(o.seed, {tseed, 6, run});
    const auto split = split_players(owners, yo, o.test_fraction, o.validation_fraction, split_seed);
    auto fit_side = split.train;
    fit_side.insert(fit_side.end(), split.validation.begin(), split.validation.end());
    assert_player_disjoint(fit_side, split.test);
    assert_player_disjoint(split.train, split.validation);
    auto positives = [&](const std::vector<uint64_t>& side) {
      size_t n = 0;
      for (uint64_t w : side) n += static_cast<size_t>(ybin[w]);
      return n;
    };
    if (positives(split.train) == 0 || positives(split.validation) == 0 ||
        positives(split.test) == 0) {
      fail(ErrorCode::kNoPositives, "target '" + target.name +
                                        "' has no positive players in some split of run " +
                                        std::to_string(run));
    }
    const auto train = gather(by_owner, split.train);
    std::vector<int> ytr;
    for (size_t r : train) ytr.push_back(ybin[f.row_owner[r]]);
    const Prepared prep = prepare(f, train, ytr, 2, o, derive_seed(split_seed, {0}));

    // Candidates are scored on validation players with all their matches
    // averaged.
    auto player_scores = [&](const models::TrainedModel& m, const std::vector<uint64_t>& side) {
      std::vector<std::vector<std::vector<double>>> per;
      for (uint64_t w : side) per.push_back(m.predict_proba(f, by_owner.at(w)));
      return per;
    };
    std::vector<int> val_truth;
    for (uint64_t w : split.validation) val_truth.push_back(ybin[w]);

    std::optional<models::TrainedModel> best;
    double best_threshold = 0.5, best_precision = -1.0, best_recall = -1.0;
    std::string best_name;
    uint64_t idx = 0;
    for (Algorithm alg : learners(o)) {
      for (const auto& hp : o.grid_for(alg).points()) {
        auto m = models::fit_dense(prep.recipe, prep.balanced, names, alg, hp,
                                   derive_seed(split_seed, {1, idx++}));
        const auto per = player_scores(m, split.validation);
        std::vector<double> pos;
        for (const auto& matches : per) pos.push_back(sophisticated_predict(matches).average[1]);
        for (double t : thresholds) {
          const auto c = threshold_confusion(pos, val_truth, t);
          if (c.tp + c.fp < 1) continue;
          const double p = c.precision(), r = c.recall();
          if (p > best_precision || (p == best_precision && r > best_recall)) {
            best_precision = p;
            best_recall = r;
            best_threshold = t;
            best = m;
            best_name = std::string(models::algorithm_name(alg)) + " " + hp.to_json().dump();
          }
        }
      }
    }
    if (!best) {
      // Nothing flagged a validation player: keep the first candidate at 0.5.
      const Algorithm alg = learners(o).front();
      best = models::fit_dense(prep.recipe, prep.balanced, names, alg,
                               o.grid_for(alg).points().front(), derive_seed(split_seed, {1, 0}));
      best_name = std::string(models::algorithm_name(alg)) + " (no validation positives flagged)";
    }
    RunResult& rr = results[run];
    rr.note = "run " + std::to_string(run) + ": " + best_name + " threshold " +
              format_double(best_threshold) + " validation precision " +
              format_double(best_precision);

    PlayerPredictions preds;
    preds.n_classes = 2;
    for (uint64_t w : split.test) {
      preds.owners.push_back(w);
      preds.truth.push_back(ybin[w]);
      preds.match_probas.push_back(best->predict_proba(f, by_owner.at(w)));
    }
    for (size_t si = 0; si < sweep.size(); ++si) {
      Confusion tuned, untuned;
      for (size_t d = 0; d < o.draws; ++d) {
        Rng rng(derive_seed(split_seed, {2, sweep[si], d}));
        std::vector<double> pos;
        for (const auto& matches : preds.match_probas) {
          const auto pick =
              rng.sample_without_replacement(matches.size(), std::min(sweep[si], matches.size()));
          std::vector<std::vector<double>> chosen;
          for (size_t j : pick) chosen.push_back(matches[j]);
          pos.push_back(sophisticated_predict(chosen).average[1]);
        }
        const auto c1 = threshold_confusion(pos, preds.truth, best_threshold);
        const auto c2 = threshold_confusion(pos, preds.truth, 0.5);
        tuned.tp += c1.tp;
        tuned.fp += c1.fp;
        tuned.fn += c1.fn;
        untuned.tp += c2.tp;
        untuned.fp += c2.fp;
        untuned.fn += c2.fn;
      }
      rr.precision.push_back(tuned.precision());
      rr.recall.push_back(tuned.recall());
      rr.untuned_precision.push_back(untuned.precision());
      rr.untuned_recall.push_back(untuned.recall());
    }
  });
  report.disjointness_checks = 2 * runs.size();
  const std::string attr = target.name;
  for (size_t si = 0; si < sweep.size(); ++si) {
    std::vector<double> p, r, up, ur;
    for (const auto& rr : results) {
      p.push_back(rr.precision[si]);
      r.push_back(rr.recall[si]);
      up.push_back(rr.untuned_precision[si]);
      ur.push_back(rr.untuned_recall[si]);
    }
    auto add = [&](const char* series, const std::vector<double>& v) {
      const Summary s = summarize(v);
      report.curves.push_back({attr, series, sweep[si], s.mean, s.std, s.n, true});
    };
    add("precision", p);
    add("recall", r);
    add("untuned_precision", up);
    add("untuned_recall", ur);
  }
  for (const auto& rr : results) report.notes.push_back(rr.note);
  report.notes.push_back("precision is undefined for a run with no predicted positives; such runs "
                         "are left out of the mean and n_runs says how many remained");
  return report;
}

}  // namespace aia::eval
