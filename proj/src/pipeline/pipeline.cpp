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
#include "pipeline/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "common/error.hpp"
#include "common/util.hpp"
#include "features/matrix.hpp"
#include "features/resources.hpp"
#include "ingest/filter.hpp"

namespace aia::pipeline {
namespace {

void write_json(const fs::path& p, const Json& doc) { write_file_atomic(p, doc.dump(1) + "\n"); }

std::string mbar_name(size_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "Mbar_%02zu.csv", v);
  return buf;
}

features::Resources resources_from(const fs::path& data_dir) {
  return features::load_resources(data_dir.empty() ? features::default_data_dir() : data_dir);
}

// Digest of a file's bytes, so reports pin the exact inputs they saw.
std::string file_digest(const fs::path& p) { return hex64(fnv1a64(read_file(p))); }

}  // namespace

Json stamp(const Json& config, uint64_t seed) {
  return {{"report_schema", kReportSchema},
          {"tool_version", kToolVersion},
          {"config_hash", hex64(fnv1a64(config.dump()))},
          {"seed", seed}};
}

std::vector<uint64_t> read_handles(const fs::path& path) {
  std::vector<uint64_t> out;
  size_t line_no = 0;
  for (const auto& raw : split(read_file(path), '\n')) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    try {
      const int64_t v = parse_int(line);
      if (v <= 0) throw Error(ErrorCode::kInvalidArgument, "handle must be positive");
      out.push_back(static_cast<uint64_t>(v));
    } catch (const Error& e) {
      fail(ErrorCode::kInvalidArgument,
           path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

Json run_ingest(const IngestOptions& options, std::unique_ptr<ingest::Transport> transport) {
  ingest::OpenDotaClient client(options.client, std::move(transport));
  std::vector<uint64_t> handles = options.handles;
  std::sort(handles.begin(), handles.end());
  handles.erase(std::unique(handles.begin(), handles.end()), handles.end());
  size_t players = 0, not_found = 0, schema_errors = 0, matches = 0, match_errors = 0;
  std::set<int64_t> seen;
  Json failures = Json::array();
  for (uint64_t h : handles) {
    ingest::PlayerRecord rec;
    try {
      rec = client.fetch_player(h, options.window_days);
      ++players;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNotFound) {
        ++not_found;
        continue;
      }
      if (e.code() == ErrorCode::kSchema) {
        ++schema_errors;
        failures.push_back({{"handle", h}, {"error", e.what()}});
        continue;
      }
      throw;
    }
    for (int64_t id : rec.match_ids) {
      if (!seen.insert(id).second) continue;
      try {
        client.fetch_match(id);
        ++matches;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNotFound && e.code() != ErrorCode::kSchema) throw;
        ++match_errors;
        failures.push_back({{"match_id", id}, {"error", e.what()}});
      }
    }
  }
  const auto st = client.stats();
  Json config = {{"window_days", options.window_days},
                 {"base_url", options.client.base_url},
                 {"requests_per_second", options.client.requests_per_second},
                 {"max_retries", options.client.max_retries}};
  Json report = stamp(config, 0);
  report["config"] = config;
  report["handles"] = handles.size();
  report["players"] = players;
  report["not_found"] = not_found;
  report["schema_errors"] = schema_errors;
  report["matches"] = matches;
  report["match_errors"] = match_errors;
  report["failures"] = failures;
  report["requests"] = st.requests;
  report["cache_hits"] = st.cache_hits;
  report["retries"] = st.retries;
  write_json(options.client.cache_dir / "ingest_report.json", report);
  return report;
}

LabelsResult run_labels(const fs::path& survey_csv, const fs::path& labels_csv,
                        const attributes::BinningConfig& binning) {
  const auto loaded = attributes::read_survey_csv(read_file(survey_csv));
  LabelsResult out;
  Json rejected = Json::array();
  for (const auto& [line, reason] : loaded.rejected) {
    rejected.push_back({{"line", line}, {"reason", reason}});
  }
  for (const auto& row : loaded.rows) {
    try {
      out.labels.push_back(attributes::bin_labels(row, binning));
    } catch (const Error& e) {
      rejected.push_back({{"handle", row.handle}, {"reason", e.what()}});
    }
  }
  std::sort(out.labels.begin(), out.labels.end(),
            [](const auto& a, const auto& b) { return a.handle < b.handle; });
  Json config = {{"low_max", binning.low_max},
                 {"medium_max", binning.medium_max},
                 {"min_age", binning.min_age},
                 {"max_age", binning.max_age}};
  out.report = stamp(config, 0);
  out.report["config"] = config;
  out.report["input_digest"] = file_digest(survey_csv);
  out.report["rows"] = loaded.rows.size() + loaded.rejected.size();
  out.report["valid"] = out.labels.size();
  out.report["rejected"] = rejected;
  if (!out.labels.empty()) {
    const auto dist = attributes::class_distribution(out.labels);
    Json d = Json::object();
    for (auto a : attributes::all_attributes()) {
      const auto& info = attributes::info(a);
      Json cls = Json::object();
      for (size_t c = 0; c < info.classes.size(); ++c) {
        cls[info.classes[c]] = dist[static_cast<size_t>(a)][c];
      }
      d[std::string(info.name)] = cls;
    }
    out.report["distribution"] = d;
  }
  if (labels_csv.has_parent_path()) fs::create_directories(labels_csv.parent_path());
  write_file_atomic(labels_csv, attributes::write_labels_csv(out.labels));
  return out;
}

eval::LabelMap load_label_map(const fs::path& labels_csv) {
  const auto loaded = attributes::read_labels_csv(read_file(labels_csv));
  if (!loaded.rejected.empty()) {
    const auto& [line, reason] = loaded.rejected.front();
    fail(ErrorCode::kSchema, labels_csv.string() + ":" + std::to_string(line) + ": " + reason);
  }
  return attributes::index_by_handle(loaded.labels);
}

Json run_featurize(const FeaturizeOptions& options) {
  const auto resources = resources_from(options.data_dir);
  const auto labels = load_label_map(options.labels_csv);

  // Candidate handles: everyone labelled plus everyone in the cache.
  std::set<uint64_t> handles;
  for (const auto& [h, _] : labels) handles.insert(h);
  const fs::path players_dir = options.cache_dir / "players";
  if (fs::is_directory(players_dir)) {
    for (const auto& entry : fs::directory_iterator(players_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.size() < 6 || name.find('.') != name.size() - 5) continue;  // "<id>.json" only
      try {
        const int64_t h = parse_int(name.substr(0, name.size() - 5));
        if (h > 0) handles.insert(static_cast<uint64_t>(h));
      } catch (const Error&) {
      }
    }
  }
  ingest::ClientConfig cc;
  cc.cache_dir = options.cache_dir;
  cc.offline = true;
  ingest::OpenDotaClient client(cc);
  std::vector<ingest::Candidate> candidates;
  size_t uncached = 0, schema_errors = 0;
  for (uint64_t h : handles) {
    ingest::Candidate c;
    c.handle = h;
    if (auto it = labels.find(h); it != labels.end()) c.labels = it->second;
    try {
      c.record = client.fetch_player(h, options.window_days);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo) ++uncached;
      if (e.code() == ErrorCode::kSchema) ++schema_errors;
      if (e.code() != ErrorCode::kNotFound && e.code() != ErrorCode::kIo &&
          e.code() != ErrorCode::kSchema) {
        throw;
      }
    }
    candidates.push_back(std::move(c));
  }
  auto filtered = ingest::filter_players(std::move(candidates), options.config.min_matches);

  features::Corpus corpus;
  size_t missing_matches = 0, dropped_after_load = 0;
  for (auto& [record, l] : filtered.retained) {
    std::vector<int64_t> loaded;
    for (int64_t id : record.match_ids) {
      if (corpus.matches.count(id) != 0) {
        loaded.push_back(id);
        continue;
      }
      try {
        corpus.matches.emplace(id, client.fetch_match(id));
        loaded.push_back(id);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kIo && e.code() != ErrorCode::kSchema &&
            e.code() != ErrorCode::kNotFound) {
          throw;
        }
        ++missing_matches;
      }
    }
    if (loaded.size() < options.config.min_matches) {
      ++dropped_after_load;
      continue;
    }
    record.match_ids = loaded;
    corpus.players.emplace_back(record, l);
  }
  if (corpus.players.empty()) fail(ErrorCode::kEmptyInput, "no eligible players to featurize");

  auto wanted = [&](const char* v) {
    return std::find(options.variants.begin(), options.variants.end(), v) != options.variants.end();
  };
  for (const auto& v : options.variants) {
    if (v != "P" && v != "M" && v != "Mbar") fail(ErrorCode::kInvalidArgument, "unknown variant '" + v + "'");
  }
  fs::create_directories(options.out_dir);
  Json shapes = Json::object();
  if (wanted("P")) {
    const auto p = features::build_player_matrix(corpus, resources, options.config, options.jobs);
    features::save_matrix(p, (options.out_dir / "P.csv").string());
    shapes["P"] = {{"rows", p.rows()}, {"cols", p.cols()}};
  }
  if (wanted("M") || wanted("Mbar")) {
    const auto tables = features::build_match_tables(corpus, resources, options.config, options.jobs);
    if (wanted("M")) {
      features::save_matrix(tables.m, (options.out_dir / "M.csv").string());
      shapes["M"] = {{"rows", tables.m.rows()}, {"cols", tables.m.cols()}};
    }
    if (wanted("Mbar")) {
      const auto mbar = features::build_distilled(tables.m, tables.augmentation,
                                                  options.config.max_per_player,
                                                  options.config.n_variants, options.config.seed);
      for (size_t v = 0; v < mbar.size(); ++v) {
        features::save_matrix(mbar[v], (options.out_dir / mbar_name(v)).string());
      }
      shapes["Mbar"] = {{"variants", mbar.size()},
                        {"rows", mbar.empty() ? 0 : mbar[0].rows()},
                        {"cols", mbar.empty() ? 0 : mbar[0].cols()}};
    }
  }

  const auto& fr = filtered.report;
  Json config = {{"features", features::config_hash(options.config, resources)},
                 {"window_days", options.window_days},
                 {"labels_digest", file_digest(options.labels_csv)}};
  Json report = stamp(config, options.config.seed);
  report["config"] = config;
  report["filter"] = {{"input", fr.input},
                      {"invalid_labels", fr.invalid_labels},
                      {"not_visible", fr.not_visible},
                      {"inactive", fr.inactive},
                      {"duplicates", fr.duplicates},
                      {"retained", fr.retained}};
  report["uncached_players"] = uncached;
  report["player_schema_errors"] = schema_errors;
  report["missing_matches"] = missing_matches;
  report["dropped_after_load"] = dropped_after_load;
  report["players"] = corpus.players.size();
  report["matches"] = corpus.matches.size();
  report["shapes"] = shapes;
  write_json(options.out_dir / "featurize_report.json", report);
  return report;
}

FeatureSet load_features(const fs::path& dir, bool want_p, bool want_m, bool want_mbar) {
  FeatureSet s;
  auto need = [&](const fs::path& p) {
    if (!fs::exists(p)) fail(ErrorCode::kNotFound, "feature file " + p.string() + " not found");
    return p.string();
  };
  if (want_p) s.p = features::load_matrix(need(dir / "P.csv"));
  if (want_m) s.m = features::load_matrix(need(dir / "M.csv"));
  if (want_mbar) {
    for (size_t v = 0;; ++v) {
      const fs::path p = dir / mbar_name(v);
      if (!fs::exists(p)) break;
      s.mbar.push_back(features::load_matrix(p.string()));
    }
    if (s.mbar.empty()) fail(ErrorCode::kNotFound, "no Mbar_NN.csv files in " + dir.string());
  }
  return s;
}

Json run_correlate(const fs::path& features_dir, const fs::path& labels_csv,
                   const stats::ReportOptions& options, const fs::path& out_dir) {
  const auto labels = load_label_map(labels_csv);
  const auto set = load_features(features_dir, true, false, false);
  const auto report = stats::correlation_report(*set.p, labels, options);

  auto row = [](const stats::CorrelationResult& r) {
    return r.feature + "," + std::string(attributes::info(r.attribute).name) + "," +
           std::string(stats::metric_name(r.metric)) + "," + format_double(r.value) + "," +
           format_double(r.p_value) + "," + std::to_string(r.n) + "," + (r.strong ? "1" : "0") + "\n";
  };
  const std::string header = "feature,attribute,metric,value,p_value,n,strong\n";
  std::string all = header, top = header;
  for (const auto& r : report.all) all += row(r);
  Json top_json = Json::object();
  for (auto a : attributes::all_attributes()) {
    Json list = Json::array();
    for (const auto& r : report.top[static_cast<size_t>(a)]) {
      top += row(r);
      list.push_back({{"feature", r.feature},
                      {"metric", std::string(stats::metric_name(r.metric))},
                      {"value", r.value},
                      {"p_value", r.p_value},
                      {"n", r.n},
                      {"strong", r.strong}});
    }
    top_json[std::string(attributes::info(a).name)] = list;
  }
  std::string sig = "attribute,metric,alpha,count\n";
  for (const auto& c : stats::significance_counts(report.all)) {
    sig += std::string(attributes::info(c.attribute).name) + "," +
           std::string(stats::metric_name(c.metric)) + "," + format_double(c.alpha) + "," +
           std::to_string(c.count) + "\n";
  }
  Json config = {{"alpha", options.alpha},
                 {"top_k", options.top_k},
                 {"bias_corrected", options.bias_corrected},
                 {"strong_threshold", options.strong_threshold},
                 {"features_schema", set.p->schema_hash()},
                 {"labels_digest", file_digest(labels_csv)}};
  Json out = stamp(config, 0);
  out["config"] = config;
  out["pairs"] = report.all.size();
  out["degenerate"] = report.degenerate;
  out["top"] = top_json;
  fs::create_directories(out_dir);
  write_file_atomic(out_dir / "correlations.csv", all);
  write_file_atomic(out_dir / "top_correlations.csv", top);
  write_file_atomic(out_dir / "significance.csv", sig);
  write_json(out_dir / "correlate_report.json", out);
  return out;
}

eval::ProtocolOptions protocol_options_from_json(const Json& doc) {
  static const std::set<std::string> kKeys = {
      "algorithms", "grid", "grids", "attributes", "outer_folds", "inner_folds",
      "selection_metric", "resampling", "max_features", "test_fraction", "validation_fraction",
      "repeats", "targeted_repeats", "n_sweep", "draws", "indiscriminate_n", "thresholds", "seed"};
  eval::ProtocolOptions o;
  if (!doc.is_object()) fail(ErrorCode::kConfig, "protocol options must be a JSON object");
  try {
    for (const auto& [k, v] : doc.items()) {
      if (kKeys.count(k) == 0) fail(ErrorCode::kConfig, "unknown protocol option '" + k + "'");
    }
    if (doc.contains("algorithms")) {
      for (const auto& a : doc["algorithms"]) {
        o.algorithms.push_back(models::algorithm_from_name(a.get<std::string>()));
      }
    }
    if (doc.contains("grid")) {
      const auto g = doc["grid"].get<std::string>();
      if (g == "full") {
        o.grid_preset = models::GridPreset::kFull;
      } else if (g == "quick") {
        o.grid_preset = models::GridPreset::kQuick;
      } else {
        fail(ErrorCode::kConfig, "grid must be 'full' or 'quick'");
      }
    }
    if (doc.contains("grids")) {
      for (const auto& [k, v] : doc["grids"].items()) {
        o.grids[models::algorithm_from_name(k)] = models::HyperparamGrid::from_json(v);
      }
    }
    if (doc.contains("attributes")) {
      for (const auto& a : doc["attributes"]) {
        const auto attr = attributes::attribute_from_name(a.get<std::string>());
        if (!attr) fail(ErrorCode::kConfig, "unknown attribute '" + a.get<std::string>() + "'");
        o.attributes.push_back(*attr);
      }
    }
    o.outer_folds = doc.value("outer_folds", o.outer_folds);
    o.inner_folds = doc.value("inner_folds", o.inner_folds);
    if (doc.contains("selection_metric")) {
      o.metric = models::selection_metric_from_name(doc["selection_metric"].get<std::string>());
    }
    if (doc.contains("resampling")) {
      const auto& r = doc["resampling"];
      o.resampling.enabled = r.value("enabled", o.resampling.enabled);
      o.resampling.enn_k = r.value("enn_k", o.resampling.enn_k);
      o.resampling.smote_k = r.value("smote_k", o.resampling.smote_k);
    }
    o.max_features = doc.value("max_features", o.max_features);
    o.test_fraction = doc.value("test_fraction", o.test_fraction);
    o.validation_fraction = doc.value("validation_fraction", o.validation_fraction);
    o.repeats = doc.value("repeats", o.repeats);
    o.targeted_repeats = doc.value("targeted_repeats", o.targeted_repeats);
    if (doc.contains("n_sweep")) o.n_sweep = doc["n_sweep"].get<std::vector<size_t>>();
    o.draws = doc.value("draws", o.draws);
    o.indiscriminate_n = doc.value("indiscriminate_n", o.indiscriminate_n);
    if (doc.contains("thresholds")) o.thresholds = doc["thresholds"].get<std::vector<double>>();
    o.seed = doc.value("seed", o.seed);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kConfig, std::string("protocol options: ") + e.what());
  }
  if (o.outer_folds < 2 || o.inner_folds < 2) fail(ErrorCode::kConfig, "fold counts must be >= 2");
  if (!(o.test_fraction > 0.0 && o.test_fraction < 1.0) ||
      !(o.validation_fraction >= 0.0 && o.validation_fraction < 1.0)) {
    fail(ErrorCode::kConfig, "split fractions must lie in (0, 1)");
  }
  if (o.draws == 0) fail(ErrorCode::kConfig, "draws must be positive");
  return o;
}

std::vector<models::Algorithm> default_algorithms(const std::string& protocol) {
  using models::Algorithm;
  if (protocol == "simple" || protocol == "one-match") {
    return {Algorithm::kLogisticRegression, Algorithm::kDecisionTree, Algorithm::kRandomForest,
            Algorithm::kMlp, Algorithm::kDummyStratified};
  }
  return {Algorithm::kRandomForest};
}

eval::AttackReport run_attack(const AttackRequest& request, const fs::path& features_dir,
                              const fs::path& labels_csv, const fs::path& out_dir) {
  const auto labels = load_label_map(labels_csv);
  eval::ProtocolOptions o = request.options;
  if (o.algorithms.empty()) o.algorithms = default_algorithms(request.protocol);
  eval::AttackReport report;
  const std::string& p = request.protocol;
  if (p == "simple") {
    report = eval::simple_aia(*load_features(features_dir, true, false, false).p, labels, o);
  } else if (p == "one-match") {
    if (request.dataset == "M") {
      const auto set = load_features(features_dir, false, true, false);
      report = eval::one_match_aia({*set.m}, labels, o);
    } else if (request.dataset == "Mbar") {
      report = eval::one_match_aia(load_features(features_dir, false, false, true).mbar, labels, o);
    } else if (request.dataset == "both") {
      const auto set = load_features(features_dir, false, true, true);
      report = eval::one_match_comparison(*set.m, set.mbar, labels, o);
    } else {
      fail(ErrorCode::kInvalidArgument, "dataset must be M, Mbar or both");
    }
  } else if (p == "sophisticated") {
    report = eval::sophisticated_aia(load_features(features_dir, false, false, true).mbar, labels, o);
  } else if (p == "indiscriminate") {
    report = eval::indiscriminate_aia(load_features(features_dir, false, false, true).mbar, labels, o);
  } else if (p == "targeted") {
    if (request.target.empty()) fail(ErrorCode::kInvalidArgument, "targeted protocol needs a target");
    report = eval::targeted_aia(eval::parse_target(request.target),
                                load_features(features_dir, false, false, true).mbar, labels, o);
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown protocol '" + p + "'");
  }
  Json config = report.config;
  config["protocol"] = p;
  if (p == "one-match") config["dataset"] = request.dataset;
  config["labels_digest"] = file_digest(labels_csv);
  const Json st = stamp(config, o.seed);
  report.config = config;
  Json doc = report.to_json();
  for (const auto& [k, v] : st.items()) doc[k] = v;
  fs::create_directories(out_dir);
  write_json(out_dir / "report.json", doc);
  write_file_atomic(out_dir / "cells.csv", report.cells_csv());
  write_file_atomic(out_dir / "curves.csv", report.curves_csv());
  return report;
}

namespace {

void write_ledger(const validate::HypothesisLedger& ledger, const Json& config, const fs::path& out_dir) {
  Json doc = ledger.to_json();
  const Json stamped = stamp(config, 0);
  for (const auto& [k, v] : stamped.items()) doc[k] = v;
  doc["config"] = config;
  fs::create_directories(out_dir);
  write_file_atomic(out_dir / "ledger.csv", ledger.to_csv());
  write_file_atomic(out_dir / "ledger_summary.csv", ledger.summary_csv());
  write_json(out_dir / "ledger.json", doc);
}

std::vector<validate::StatPair> load_pairs(const fs::path& pairs) {
  const std::string text = read_file(pairs);
  if (pairs.extension() == ".json") {
    const Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail(ErrorCode::kSchema, pairs.string() + " is not valid JSON");
    return validate::pairs_from_tables(doc);
  }
  return validate::read_pairs_csv(text);
}

}  // namespace

validate::HypothesisLedger run_validate(const fs::path& pairs, double alpha, const fs::path& out_dir) {
  const auto ledger = validate::hypothesis_table(load_pairs(pairs), alpha);
  write_ledger(ledger, {{"alpha", alpha}, {"pairs_digest", file_digest(pairs)}}, out_dir);
  return ledger;
}

Json run_synth(const synth::SynthConfig& config, const fs::path& out_dir, unsigned jobs) {
  const auto resources = resources_from({});
  const auto pop = synth::generate_population(config, resources, jobs);
  fs::create_directories(out_dir);
  const auto written = synth::write_population(pop, out_dir);
  Json report = pop.manifest();
  report["files"] = written.size();
  return report;
}

fs::path default_tables_path() {
  return features::default_data_dir() / "published_tables.json";
}

validate::HypothesisLedger reproduce_table8(const fs::path& tables, double alpha,
                                            const fs::path& out_dir) {
  return run_validate(tables, alpha, out_dir);
}

}  // namespace aia::pipeline
