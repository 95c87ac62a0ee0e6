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

// Builders for the per-match, per-player and distilled datasets.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "attributes/attributes.hpp"
#include "features/chat.hpp"
#include "features/matrix.hpp"
#include "features/resources.hpp"
#include "ingest/records.hpp"

namespace aia::features {

struct FeatureConfig {
  double early_window_s = 90.0;
  double after_kill_window_s = 10.0;
  // Matches reporting fewer human players are skipped; 0 keeps everything.
  int min_human_players = 0;
  size_t min_matches = 5;
  size_t max_per_player = 30;
  size_t n_variants = 20;
  uint64_t seed = 1;
};

std::string config_hash(const FeatureConfig& config, const Resources& resources);

// Canonical per-match row for the player in `slot` (index into players).
FeatureRow build_match_features(const ingest::MatchRecord& match, size_t slot,
                                const Resources& resources, const FeatureConfig& config = {});

// Domain-knowledge columns appended by distillation: hero metadata and the
// player's standing within the match.
FeatureRow build_augmentation(const ingest::MatchRecord& match, size_t slot,
                              const Resources& resources);

// Aggregates over the player's matches. Matches the handle did not play in
// are ignored; throws kInsufficientMatches below config.min_matches.
FeatureRow build_player_features(const ingest::PlayerRecord& player,
                                 const std::vector<ingest::MatchRecord>& matches,
                                 const Resources& resources, const FeatureConfig& config = {});

// Uniform sample of at most max_per_player rows per owner from `m`, then the
// row-aligned augmentation columns appended. Variant v uses a seed derived
// from (seed, v); per-owner draws are independent of row order.
std::vector<FeatureMatrix> build_distilled(const FeatureMatrix& m, const FeatureMatrix& augmentation,
                                           size_t max_per_player, size_t n_variants,
                                           uint64_t seed);

struct Corpus {
  // Eligible players with labels, sorted by handle.
  std::vector<std::pair<ingest::PlayerRecord, attributes::AttributeLabels>> players;
  std::map<int64_t, ingest::MatchRecord> matches;
};

struct MatchTables {
  FeatureMatrix m;             // plain per-match set
  FeatureMatrix augmentation;  // row-aligned augmentation columns
};

// Rows sorted by (owner, match id). Results do not depend on `jobs`.
MatchTables build_match_tables(const Corpus& corpus, const Resources& resources,
                               const FeatureConfig& config, unsigned jobs = 1);
FeatureMatrix build_player_matrix(const Corpus& corpus, const Resources& resources,
                                  const FeatureConfig& config, unsigned jobs = 1);

// Day index with Monday = 0, from a unix timestamp (UTC).
int weekday_of(int64_t unix_time);
int hour_of(int64_t unix_time);

}  // namespace aia::features
