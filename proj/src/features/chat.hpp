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

#include <array>
#include <string>
#include <vector>

#include "features/resources.hpp"
#include "ingest/records.hpp"

namespace aia::features {

struct ChatFeatures {
  // Token hits per lexicon category, in lexicon_categories() order.
  std::array<int, 5> lexicon{};
  int typed_msgs = 0;
  int question_only_msgs = 0;
  int question_marks = 0;
  int exclamation_marks = 0;
  int capital_letters = 0;
  int early_game_msgs = 0;
  int after_kill_msgs = 0;
  // Wheel phrases per category, in wheel_categories() order. Phrases outside
  // the category table only count toward the channel totals.
  std::array<int, 4> wheel_global{};
  std::array<int, 4> wheel_team{};
  int wheel_global_total = 0;
  int wheel_team_total = 0;
  int hero_wheel_msgs = 0;
  int sound_count = 0;
  int spray_count = 0;

  int wheel_total() const { return wheel_global_total + wheel_team_total; }
  bool operator==(const ChatFeatures&) const = default;
};

// Lowercased tokens of a typed message; apostrophes stay inside tokens.
std::vector<std::string> tokenize(const std::string& text);

// `slot` indexes match.players; chat sender_slot uses the same indexing.
// Throws kSlotNotFound when the slot does not exist.
ChatFeatures extract_chat_features(const ingest::MatchRecord& match, size_t slot,
                                   const Resources& resources, double early_window_s = 90.0,
                                   double after_kill_window_s = 10.0);

}  // namespace aia::features
