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

// Synthetic player population with planted attribute/feature dependences.
// Every planted channel drives one raw telemetry quantity through a latent
// variable L = a * z + sqrt(1 - a^2) * eps, where z is the standardized
// attribute code (or a subgroup indicator) and `a` is solved so that the
// population Spearman correlation between the channel's per-player mean and
// the attribute equals the configured rho.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "attributes/attributes.hpp"
#include "eval/protocols.hpp"
#include "features/build.hpp"
#include "features/resources.hpp"
#include "ingest/filter.hpp"
#include "ingest/records.hpp"
#include "json.hpp"

namespace aia::synth {

using Json = nlohmann::json;

struct Effect {
  std::string channel;
  // Exactly one of attribute / target is set.
  std::optional<attributes::Attribute> attribute;
  std::optional<eval::TargetSpec> target;
  double rho = 0.0;
};

struct SynthConfig {
  size_t n_players = 500;
  size_t min_matches = 5;
  size_t max_matches = 120;
  int window_days = 30;
  int64_t reference_time = 1767225600;  // 2026-01-01T00:00:00Z
  std::array<std::vector<double>, attributes::kAttributeCount> priors = default_priors();
  std::vector<Effect> effects;
  // Multiplies every channel's per-match noise.
  double noise = 1.0;
  uint64_t seed = 1;
  // Planted ineligible players, on top of n_players.
  size_t n_inactive = 0;
  size_t n_hidden = 0;
  size_t n_invalid_labels = 0;

  static std::array<std::vector<double>, attributes::kAttributeCount> default_priors();

  // Throws kConfig on invalid priors, unknown channels, duplicated channels,
  // out-of-range rho or match ranges.
  void validate() const;
  Json to_json() const;
  static SynthConfig from_json(const Json& doc);
  std::string hash() const;
};

struct ChannelInfo {
  std::string name;
  // Player-level column whose rank order the latent fixes.
  std::string player_feature;
  double lo = 0.0;
  double hi = 1.0;
  double noise_sd = 0.0;
};

const std::vector<ChannelInfo>& channels();

// Population Spearman correlation between a discrete ordinal variable with
// class probabilities `pi` (codes 0..K-1) and L = a * z + sqrt(1 - a^2) * eps.
double population_spearman(const std::vector<double>& pi, double a);

// Loading `a` in [-1, 1] reaching `rho`; throws kConfig when |rho| exceeds
// the attainable maximum for these class probabilities.
double solve_loading(const std::vector<double>& pi, double rho);

struct PlantedEffect {
  Effect effect;
  std::vector<double> class_probabilities;
  double loading = 0.0;
  double max_attainable = 0.0;
};

struct Population {
  SynthConfig config;
  std::vector<ingest::PlayerRecord> players;  // visible players, sorted by handle
  std::vector<uint64_t> hidden;               // handles with no public profile
  std::vector<ingest::MatchRecord> matches;   // sorted by match_id
  std::vector<attributes::RawSurveyRow> survey;
  std::vector<attributes::AttributeLabels> labels;  // ground truth, valid rows only
  std::vector<PlantedEffect> planted;
  std::vector<uint64_t> planted_inactive;
  std::vector<uint64_t> planted_invalid;

  Json manifest() const;
};

Population generate_population(const SynthConfig& config, const features::Resources& resources,
                               unsigned jobs = 1);

// Writes the same cache layout the ingest client produces, plus
// survey.csv, handles.txt and manifest.json. Returns the written paths.
std::vector<std::filesystem::path> write_population(const Population& pop,
                                                    const std::filesystem::path& dir);

// Eligible players joined with their ground-truth labels, after the usual
// filters, and the matches they reference.
features::Corpus to_corpus(const Population& pop, ingest::FilterReport* report = nullptr);

// Small corpus used by the regression tests: 50 players, at most 30 matches
// each, strong planted signal including a very_young subgroup and a hero
// channel that only the augmentation columns can see.
SynthConfig regression_fixture_config();

}  // namespace aia::synth
