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
#include "aia/aia.h"

#include <algorithm>
#include <exception>
#include <memory>
#include <string>

#include "common/error.hpp"
#include "common/util.hpp"
#include "eval/protocols.hpp"
#include "features/matrix.hpp"
#include "models/model.hpp"
#include "pipeline/pipeline.hpp"
#include "stats/correlation.hpp"
#include "validate/validate.hpp"

struct aia_context {
  unsigned jobs = aia::default_jobs();
  std::string error;
  std::string result;
};

struct aia_matrix {
  aia::features::FeatureMatrix m;
  std::string schema_hash;
};

struct aia_model {
  aia::models::TrainedModel model;
};

namespace {

using aia::ErrorCode;
using aia::fail;
using Json = nlohmann::json;
namespace fs = std::filesystem;

// Runs `body`, translating exceptions into status codes and messages.
template <typename F>
aia_status guard(aia_context* ctx, F&& body) {
  if (ctx == nullptr) return AIA_ERR_INVALID_ARGUMENT;
  ctx->error.clear();
  try {
    body();
    return AIA_OK;
  } catch (const aia::Error& e) {
    ctx->error = e.what();
    return static_cast<aia_status>(e.code());
  } catch (const Json::exception& e) {
    ctx->error = std::string("malformed JSON: ") + e.what();
    return AIA_ERR_CONFIG;
  } catch (const std::filesystem::filesystem_error& e) {
    ctx->error = e.what();
    return AIA_ERR_IO;
  } catch (const std::exception& e) {
    ctx->error = e.what();
    return AIA_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

Json parse_options(const char* text) {
  need(text, "options_json");
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(ErrorCode::kConfig, "options must be a JSON object");
  return doc;
}

// Reads a required string key; paths are never guessed.
std::string req(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_string() || doc[key].get<std::string>().empty()) {
    fail(ErrorCode::kConfig, std::string("missing required option '") + key + "'");
  }
  return doc[key].get<std::string>();
}

void only_keys(const Json& doc, std::initializer_list<const char*> keys) {
  for (const auto& [k, _] : doc.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) fail(ErrorCode::kConfig, "unknown option '" + k + "'");
  }
}

}  // namespace

extern "C" {

const char* aia_version(void) { return aia::kToolVersion; }

const char* aia_status_name(aia_status status) {
  if (status == AIA_OK) return "Ok";
  if (status < AIA_ERR_INVALID_ARGUMENT || status > AIA_ERR_INTERNAL) return "unknown";
  return aia::error_code_name(static_cast<ErrorCode>(status));
}

aia_status aia_context_create(aia_context** out) {
  if (out == nullptr) return AIA_ERR_INVALID_ARGUMENT;
  try {
    *out = new aia_context();
  } catch (...) {
    *out = nullptr;
    return AIA_ERR_INTERNAL;
  }
  return AIA_OK;
}

void aia_context_destroy(aia_context* ctx) { delete ctx; }

aia_status aia_context_set_jobs(aia_context* ctx, unsigned jobs) {
  return guard(ctx, [&] { ctx->jobs = jobs == 0 ? aia::default_jobs() : jobs; });
}

unsigned aia_context_jobs(const aia_context* ctx) { return ctx ? ctx->jobs : 0; }

const char* aia_last_error(const aia_context* ctx) { return ctx ? ctx->error.c_str() : ""; }

const char* aia_last_result(const aia_context* ctx) { return ctx ? ctx->result.c_str() : ""; }

aia_status aia_spearman(aia_context* ctx, const double* x, const double* y, size_t n, double* rho,
                        double* p_value) {
  return guard(ctx, [&] {
    need(x, "x");
    need(y, "y");
    need(rho, "rho");
    const auto a = aia::stats::spearman({x, n}, {y, n});
    *rho = a.value;
    if (p_value) *p_value = a.p_value;
  });
}

aia_status aia_cramers_v(aia_context* ctx, const int64_t* x, const int64_t* y, size_t n,
                         int bias_corrected, double* v, double* p_value) {
  return guard(ctx, [&] {
    need(x, "x");
    need(y, "y");
    need(v, "v");
    const auto a = aia::stats::cramers_v(std::span<const int64_t>(x, n),
                                         std::span<const int64_t>(y, n), bias_corrected != 0);
    *v = a.value;
    if (p_value) *p_value = a.p_value;
  });
}

aia_status aia_required_sample_size(aia_context* ctx, double confidence, double margin,
                                    double proportion, uint64_t population, uint64_t* out) {
  return guard(ctx, [&] {
    need(out, "out");
    *out = aia::stats::required_sample_size(confidence, margin, proportion, population);
  });
}

aia_status aia_two_sample_ttest(aia_context* ctx, double mean_a, double std_a, size_t n_a,
                                double mean_b, double std_b, size_t n_b, int welch, double* t,
                                double* df, double* p_value) {
  return guard(ctx, [&] {
    need(p_value, "p_value");
    const auto r = aia::validate::two_sample_ttest(
        {"a", mean_a, std_a, static_cast<int>(n_a)}, {"b", mean_b, std_b, static_cast<int>(n_b)}, 0.05,
        welch ? aia::validate::Variance::kWelch : aia::validate::Variance::kPooled);
    if (t) *t = r.t;
    if (df) *df = r.df;
    *p_value = r.p_value;
  });
}

aia_status aia_average_probabilities(aia_context* ctx, const double* probs, size_t n_matches,
                                     size_t n_classes, double* average, size_t* predicted) {
  return guard(ctx, [&] {
    need(probs, "probs");
    need(average, "average");
    std::vector<std::vector<double>> rows(n_matches);
    for (size_t i = 0; i < n_matches; ++i) {
      rows[i].assign(probs + i * n_classes, probs + (i + 1) * n_classes);
    }
    const auto r = aia::eval::sophisticated_predict(rows);
    std::copy(r.average.begin(), r.average.end(), average);
    if (predicted) *predicted = static_cast<size_t>(r.predicted);
  });
}

aia_status aia_matrix_load(aia_context* ctx, const char* csv_path, aia_matrix** out) {
  return guard(ctx, [&] {
    need(csv_path, "csv_path");
    need(out, "out");
    *out = nullptr;
    auto m = std::make_unique<aia_matrix>();
    m->m = aia::features::load_matrix(csv_path);
    m->schema_hash = m->m.schema_hash();
    *out = m.release();
  });
}

void aia_matrix_destroy(aia_matrix* m) { delete m; }

size_t aia_matrix_rows(const aia_matrix* m) { return m ? m->m.rows() : 0; }

size_t aia_matrix_cols(const aia_matrix* m) { return m ? m->m.cols() : 0; }

const char* aia_matrix_column_name(const aia_matrix* m, size_t col) {
  if (m == nullptr || col >= m->m.cols()) return nullptr;
  return m->m.columns[col].name.c_str();
}

const char* aia_matrix_schema_hash(const aia_matrix* m) { return m ? m->schema_hash.c_str() : ""; }

aia_status aia_model_train(aia_context* ctx, const aia_matrix* features, const char* labels_csv,
                           const char* options_json, aia_model** out) {
  return guard(ctx, [&] {
    need(features, "features");
    need(labels_csv, "labels_csv");
    need(out, "out");
    *out = nullptr;
    const Json o = parse_options(options_json);
    only_keys(o, {"algorithm", "attribute", "params", "resampling", "seed", "max_features"});
    const auto attr = aia::attributes::attribute_from_name(req(o, "attribute"));
    if (!attr) fail(ErrorCode::kConfig, "unknown attribute '" + o["attribute"].get<std::string>() + "'");
    const auto labels = aia::pipeline::load_label_map(labels_csv);
    aia::models::TrainOptions t;
    t.algorithm = aia::models::algorithm_from_name(o.value("algorithm", std::string("random_forest")));
    if (o.contains("params")) {
      for (const auto& [k, v] : o["params"].items()) t.params.values[k] = v.get<double>();
    }
    t.seed = o.value("seed", uint64_t{1});
    t.max_features = o.value("max_features", size_t{0});
    t.resampling.enabled = o.value("resampling", false);
    const auto& f = features->m;
    std::vector<size_t> rows;
    std::vector<int> y;
    for (size_t r = 0; r < f.rows(); ++r) {
      auto it = labels.find(f.row_owner[r]);
      if (it == labels.end()) continue;
      rows.push_back(r);
      y.push_back(it->second[*attr]);
    }
    if (rows.empty()) fail(ErrorCode::kEmptyInput, "no matrix row has a label");
    const auto& info = aia::attributes::info(*attr);
    std::vector<std::string> classes(info.classes.begin(), info.classes.end());
    auto m = std::make_unique<aia_model>();
    m->model = aia::models::fit(f, rows, y, classes, t);
    *out = m.release();
  });
}

void aia_model_destroy(aia_model* model) { delete model; }

size_t aia_model_classes(const aia_model* model) { return model ? model->model.class_list.size() : 0; }

aia_status aia_model_predict_proba(aia_context* ctx, const aia_model* model,
                                   const aia_matrix* features, double* out, size_t out_len) {
  return guard(ctx, [&] {
    need(model, "model");
    need(features, "features");
    need(out, "out");
    const size_t k = model->model.class_list.size();
    const auto& f = features->m;
    if (out_len < f.rows() * k) fail(ErrorCode::kLengthMismatch, "output buffer too small");
    for (size_t r = 0; r < f.rows(); ++r) {
      const auto p = model->model.predict_proba(f, r);
      std::copy(p.begin(), p.end(), out + r * k);
    }
  });
}

aia_status aia_run_ingest(aia_context* ctx, const char* options_json) {
  return guard(ctx, [&] {
    const Json o = parse_options(options_json);
    only_keys(o, {"handles", "handles_file", "cache", "window_days", "offline", "base_url",
                  "requests_per_second", "max_retries", "backoff_s", "timeout_s"});
    aia::pipeline::IngestOptions in;
    if (o.contains("handles")) in.handles = o["handles"].get<std::vector<uint64_t>>();
    if (o.contains("handles_file")) {
      const auto more = aia::pipeline::read_handles(req(o, "handles_file"));
      in.handles.insert(in.handles.end(), more.begin(), more.end());
    }
    if (in.handles.empty()) fail(ErrorCode::kEmptyInput, "no handles given");
    in.client.cache_dir = req(o, "cache");
    in.window_days = o.value("window_days", 30);
    in.client.offline = o.value("offline", false);
    in.client.base_url = o.value("base_url", in.client.base_url);
    in.client.requests_per_second = o.value("requests_per_second", in.client.requests_per_second);
    in.client.max_retries = o.value("max_retries", in.client.max_retries);
    in.client.backoff_base_s = o.value("backoff_s", in.client.backoff_base_s);
    in.client.timeout_s = o.value("timeout_s", in.client.timeout_s);
    ctx->result = aia::pipeline::run_ingest(in).dump(1);
  });
}

aia_status aia_run_labels(aia_context* ctx, const char* options_json) {
  return guard(ctx, [&] {
    const Json o = parse_options(options_json);
    only_keys(o, {"in", "out", "low_max", "medium_max", "min_age", "max_age"});
    aia::attributes::BinningConfig b;
    b.low_max = o.value("low_max", b.low_max);
    b.medium_max = o.value("medium_max", b.medium_max);
    b.min_age = o.value("min_age", b.min_age);
    b.max_age = o.value("max_age", b.max_age);
    if (!(b.low_max < b.medium_max)) fail(ErrorCode::kConfig, "low_max must be below medium_max");
    if (!(b.min_age <= b.max_age)) fail(ErrorCode::kConfig, "min_age must not exceed max_age");
    ctx->result = aia::pipeline::run_labels(req(o, "in"), req(o, "out"), b).report.dump(1);
  });
}

aia_status aia_run_featurize(aia_context* ctx, const char* options_json) {
  return guard(ctx, [&] {
    const Json o = parse_options(options_json);
    only_keys(o, {"cache", "labels", "out", "data_dir", "variants", "window_days", "min_matches",
                  "max_per_player", "n_variants", "seed", "early_window_s", "after_kill_window_s",
                  "min_human_players"});
    aia::pipeline::FeaturizeOptions f;
    f.cache_dir = req(o, "cache");
    f.labels_csv = req(o, "labels");
    f.out_dir = req(o, "out");
    f.data_dir = o.value("data_dir", std::string());
    if (o.contains("variants")) f.variants = o["variants"].get<std::vector<std::string>>();
    f.window_days = o.value("window_days", f.window_days);
    auto& c = f.config;
    c.min_matches = o.value("min_matches", c.min_matches);
    c.max_per_player = o.value("max_per_player", c.max_per_player);
    c.n_variants = o.value("n_variants", c.n_variants);
    c.seed = o.value("seed", c.seed);
    c.early_window_s = o.value("early_window_s", c.early_window_s);
    c.after_kill_window_s = o.value("after_kill_window_s", c.after_kill_window_s);
    c.min_human_players = o.value("min_human_players", c.min_human_players);
    if (c.max_per_player == 0 || c.n_variants == 0) {
      fail(ErrorCode::kConfig, "max_per_player and n_variants must be positive");
    }
    f.jobs = ctx->jobs;
    ctx->result = aia::pipeline::run_featurize(f).dump(1);
  });
}

aia_status aia_run_correlate(aia_context* ctx, const char* options_json) {
  return guard(ctx, [&] {
    const Json o = parse_options(options_json);
    only_keys(o, {"features", "labels", "out", "alpha", "top_k", "bias_corrected", "strong_threshold"});
    aia::stats::ReportOptions r;
    r.alpha = o.value("alpha", r.alpha);
    r.top_k = o.value("top_k", r.top_k);
    r.bias_corrected = o.value("bias_corrected", r.bias_corrected);
    r.strong_threshold = o.value("strong_threshold", r.strong_threshold);
    r.jobs = ctx->jobs;
    if (!(r.alpha > 0.0 && r.alpha < 1.0)) fail(ErrorCode::kDomain, "alpha must lie in (0, 1)");
    ctx->result = aia::pipeline::run_correlate(req(o, "features"), req(o, "labels"), r, req(o, "out")).dump(1);
  });
}

aia_status aia_run_attack(aia_context* ctx, const char* options_json) {
  return guard(ctx, [&] {
    const Json o = parse_options(options_json);
    only_keys(o, {"protocol", "dataset", "target", "features", "labels", "out", "options"});
    aia::pipeline::AttackRequest r;
    r.protocol = req(o, "protocol");
    r.dataset = o.value("dataset", r.dataset);
    r.target = o.value("target", std::string());
    if (o.contains("options")) r.options = aia::pipeline::protocol_options_from_json(o["options"]);
    r.options.jobs = ctx->jobs;
    const auto report = aia::pipeline::run_attack(r, req(o, "features"), req(o, "labels"), req(o, "out"));
    Json summary = {{"protocol", report.protocol},
                    {"cells", report.cells.size()},
                    {"curve_points", report.curves.size()},
                    {"player_disjoint", report.player_disjoint},
                    {"disjointness_checks", report.disjointness_checks},
                    {"notes", report.notes}};
    ctx->result = summary.dump(1);
  });
}

aia_status aia_run_validate(aia_context* ctx, const char* options_json) {
  return guard(ctx, [&] {
    const Json o = parse_options(options_json);
    only_keys(o, {"pairs", "alpha", "out"});
    const auto ledger = aia::pipeline::run_validate(req(o, "pairs"), o.value("alpha", 0.05), req(o, "out"));
    Json families = Json::array();
    for (const auto& f : ledger.families) {
      families.push_back({{"family", f.family}, {"rejected", f.rejected}, {"total", f.total}});
    }
    ctx->result = Json{{"alpha", ledger.alpha}, {"families", families}}.dump(1);
  });
}

aia_status aia_run_synth(aia_context* ctx, const char* options_json) {
  return guard(ctx, [&] {
    const Json o = parse_options(options_json);
    only_keys(o, {"config", "out", "fixture"});
    Json doc = o.value("fixture", false) ? aia::synth::regression_fixture_config().to_json()
                                         : Json::object();
    doc.merge_patch(o.value("config", Json::object()));
    const auto config = aia::synth::SynthConfig::from_json(doc);
    ctx->result = aia::pipeline::run_synth(config, req(o, "out"), ctx->jobs).dump(1);
  });
}

aia_status aia_reproduce_table8(aia_context* ctx, const char* options_json) {
  return guard(ctx, [&] {
    const Json o = parse_options(options_json);
    only_keys(o, {"tables", "alpha", "out"});
    const fs::path tables = o.contains("tables") ? fs::path(req(o, "tables"))
                                                 : aia::pipeline::default_tables_path();
    const auto ledger = aia::pipeline::reproduce_table8(tables, o.value("alpha", 0.05), req(o, "out"));
    Json families = Json::array();
    for (const auto& f : ledger.families) {
      families.push_back({{"family", f.family},
                          {"rejected", f.rejected},
                          {"total", f.total},
                          {"max_p_value", f.max_p}});
    }
    ctx->result = Json{{"alpha", ledger.alpha}, {"families", families}}.dump(1);
  });
}

}  // extern "C"
