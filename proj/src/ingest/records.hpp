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

// Typed telemetry records in the OpenDota schema and their JSON mapping.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace aia::ingest {

using Json = nlohmann::json;

enum class ChatKind { kTypedText, kChatwheelGeneral, kChatwheelHero, kSound, kSpray };
enum class ChatChannel { kGlobal, kTeam };

std::string_view chat_kind_name(ChatKind k);
std::string_view chat_channel_name(ChatChannel c);

struct ChatMessage {
  int sender_slot = 0;
  double time_s = 0.0;
  ChatKind kind = ChatKind::kTypedText;
  ChatChannel channel = ChatChannel::kGlobal;
  std::string text_or_id;
  Json extra = Json::object();

  bool operator==(const ChatMessage&) const = default;
};

struct Cosmetic {
  int64_t item_id = 0;
  int owner_slot = 0;
  double price = 0.0;

  bool operator==(const Cosmetic&) const = default;
};

struct MatchPlayerSlot {
  std::optional<uint64_t> handle;
  int player_slot = 0;
  int hero_id = 0;
  int kills = 0;
  int deaths = 0;
  int assists = 0;
  int denies = 0;
  int last_hits = 0;
  bool is_radiant = true;
  std::map<std::string, int> word_counts;
  Json extra = Json::object();

  bool operator==(const MatchPlayerSlot&) const = default;
};

struct MatchRecord {
  int64_t match_id = 0;
  int64_t duration_s = 0;
  int64_t start_time = 0;
  int game_mode = 0;
  int lobby_type = 0;
  int region = 0;
  int patch = 0;
  std::optional<int> skill;
  std::optional<int> human_players;
  std::optional<int> positive_votes;
  bool radiant_win = false;
  int radiant_score = 0;
  int dire_score = 0;
  int tower_status_radiant = 0;
  int tower_status_dire = 0;
  int barracks_status_radiant = 0;
  int barracks_status_dire = 0;
  int64_t first_blood_time = 0;
  std::optional<int64_t> throw_value;
  std::optional<int64_t> comeback;
  std::optional<int64_t> loss;
  std::optional<int64_t> win;
  std::vector<ChatMessage> chat;
  std::vector<Cosmetic> cosmetics;
  std::vector<MatchPlayerSlot> players;
  Json objectives = Json::array();
  Json teamfights = Json::array();
  Json picks_bans = Json::array();
  Json draft_timings = Json::array();
  Json radiant_team = Json();
  Json dire_team = Json();
  std::vector<double> radiant_gold_adv;
  std::vector<double> radiant_xp_adv;
  std::map<std::string, int> all_word_counts;
  // Fields outside the typed schema, kept verbatim.
  Json extra = Json::object();

  bool operator==(const MatchRecord&) const = default;

  // Index into `players` of the slot owned by `handle`, if any.
  std::optional<size_t> slot_of(uint64_t handle) const;
};

struct PlayerRecord {
  uint64_t handle = 0;
  std::optional<int> rank_tier;
  bool has_plus = false;
  std::vector<int64_t> match_ids;

  bool operator==(const PlayerRecord&) const = default;
};

struct ParseDiagnostics {
  size_t unknown_fields = 0;
  std::vector<std::string> unknown_paths;
};

// Throws Error(kSchema) naming the JSON path of the first violation.
MatchRecord parse_match(std::string_view bytes, ParseDiagnostics* diagnostics = nullptr);
MatchRecord match_from_json(const Json& doc, ParseDiagnostics* diagnostics = nullptr);
Json match_to_json(const MatchRecord& match);
std::string serialize_match(const MatchRecord& match);

// `profile` is the /players/{id} payload and `matches` the
// /players/{id}/matches payload. Throws kNotFound for hidden profiles.
PlayerRecord parse_player(uint64_t handle, std::string_view profile, std::string_view matches);
std::string serialize_player_profile(const PlayerRecord& player);
std::string serialize_player_matches(const PlayerRecord& player,
                                     const std::vector<int64_t>& start_times = {});

}  // namespace aia::ingest
