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

// Stage runners shared by the command line tool and the C API. Each stage
// reads its inputs, writes its artifacts under one output directory and
// returns a JSON summary stamped with tool version, config hash and seed.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "attributes/attributes.hpp"
#include "eval/protocols.hpp"
#include "features/build.hpp"
#include "ingest/client.hpp"
#include "json.hpp"
#include "stats/report.hpp"
#include "synth/synth.hpp"
#include "validate/validate.hpp"

namespace aia::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// {"tool_version", "config_hash", "seed"} for a config document.
// Bumped whenever a report field is renamed or removed.
inline constexpr int kReportSchema = 1;

Json stamp(const Json& config, uint64_t seed);

std::vector<uint64_t> read_handles(const fs::path& path);

struct IngestOptions {
  std::vector<uint64_t> handles;
  ingest::ClientConfig client;
  int window_days = 30;
};

// Fetches every handle and the matches in its window into the cache.
Json run_ingest(const IngestOptions& options, std::unique_ptr<ingest::Transport> transport = nullptr);

struct LabelsResult {
  std::vector<attributes::AttributeLabels> labels;
  Json report;
};

// Writes the binned labels to `labels_csv`; the report is returned only.
LabelsResult run_labels(const fs::path& survey_csv, const fs::path& labels_csv,
                        const attributes::BinningConfig& binning = {});

eval::LabelMap load_label_map(const fs::path& labels_csv);

struct FeaturizeOptions {
  fs::path cache_dir;
  fs::path labels_csv;
  fs::path out_dir;
  fs::path data_dir;  // empty = default resources
  features::FeatureConfig config;
  int window_days = 30;
  unsigned jobs = 1;
  // Any of "P", "M", "Mbar"; Mbar also needs the match table.
  std::vector<std::string> variants = {"P", "M", "Mbar"};
};

Json run_featurize(const FeaturizeOptions& options);

struct FeatureSet {
  std::optional<features::FeatureMatrix> p;
  std::optional<features::FeatureMatrix> m;
  std::vector<features::FeatureMatrix> mbar;
};

// Loads P.csv, M.csv and Mbar_NN.csv from a featurize output directory.
FeatureSet load_features(const fs::path& dir, bool want_p, bool want_m, bool want_mbar);

Json run_correlate(const fs::path& features_dir, const fs::path& labels_csv,
                   const stats::ReportOptions& options, const fs::path& out_dir);

eval::ProtocolOptions protocol_options_from_json(const Json& doc);

struct AttackRequest {
  std::string protocol;  // simple | one-match | sophisticated | indiscriminate | targeted
  std::string dataset = "both";  // one-match only: M | Mbar | both
  std::string target;            // targeted only
  eval::ProtocolOptions options;
};

std::vector<models::Algorithm> default_algorithms(const std::string& protocol);

eval::AttackReport run_attack(const AttackRequest& request, const fs::path& features_dir,
                              const fs::path& labels_csv, const fs::path& out_dir);

// `pairs` is a pairs CSV or a published-tables JSON file.
validate::HypothesisLedger run_validate(const fs::path& pairs, double alpha, const fs::path& out_dir);

Json run_synth(const synth::SynthConfig& config, const fs::path& out_dir, unsigned jobs = 1);

fs::path default_tables_path();

validate::HypothesisLedger reproduce_table8(const fs::path& tables, double alpha,
                                            const fs::path& out_dir);

}  // namespace aia::pipeline
