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
#include "ingest/records.hpp"

#include <cmath>
#include <set>

#include "common/error.hpp"

namespace aia::ingest {
namespace {

constexpr uint64_t kAnonymousAccount = 4294967295ULL;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  fail(ErrorCode::kSchema, path + ": " + what);
}

std::string child(const std::string& path, std::string_view key) {
  return path + "." + std::string(key);
}

std::string index(const std::string& path, size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const Json* find(const Json& obj, std::string_view key) {
  auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

int64_t read_int(const Json& obj, std::string_view key, const std::string& path,
                 int64_t fallback, bool required = false) {
  const Json* v = find(obj, key);
  if (v == nullptr) {
    if (required) schema_error(child(path, key), "required field missing");
    return fallback;
  }
  if (v->is_number_integer()) return v->get<int64_t>();
  if (v->is_number_float()) {
    const double d = v->get<double>();
    if (std::floor(d) == d && std::isfinite(d)) return static_cast<int64_t>(d);
  }
  if (v->is_boolean()) return v->get<bool>() ? 1 : 0;
  schema_error(child(path, key), "expected an integer");
}

std::optional<int64_t> read_optional_int(const Json& obj, std::string_view key,
                                         const std::string& path) {
  if (find(obj, key) == nullptr) return std::nullopt;
  return read_int(obj, key, path, 0);
}

int read_count(const Json& obj, std::string_view key, const std::string& path) {
  const int64_t v = read_int(obj, key, path, 0);
  if (v < 0) schema_error(child(path, key), "count must be non-negative");
  return static_cast<int>(v);
}

double read_number(const Json& obj, std::string_view key, const std::string& path,
                   double fallback) {
  const Json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) schema_error(child(path, key), "expected a number");
  return v->get<double>();
}

bool read_bool(const Json& obj, std::string_view key, const std::string& path, bool fallback) {
  const Json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (v->is_boolean()) return v->get<bool>();
  if (v->is_number_integer()) return v->get<int64_t>() != 0;
  schema_error(child(path, key), "expected a boolean");
}

const Json& read_array(const Json& obj, std::string_view key, const std::string& path) {
  static const Json kEmpty = Json::array();
  const Json* v = find(obj, key);
  if (v == nullptr) return kEmpty;
  if (!v->is_array()) schema_error(child(path, key), "expected an array");
  return *v;
}

std::map<std::string, int> read_word_counts(const Json& obj, std::string_view key,
                                            const std::string& path) {
  std::map<std::string, int> out;
  const Json* v = find(obj, key);
  if (v == nullptr) return out;
  if (!v->is_object()) schema_error(child(path, key), "expected an object");
  for (auto it = v->begin(); it != v->end(); ++it) {
    if (!it.value().is_number_integer() || it.value().get<int64_t>() < 0) {
      schema_error(child(child(path, key), it.key()), "expected a non-negative integer");
    }
    out[it.key()] = static_cast<int>(it.value().get<int64_t>());
  }
  return out;
}

Json collect_extra(const Json& obj, const std::set<std::string>& known, const std::string& path,
                   ParseDiagnostics* diagnostics) {
  Json extra = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (known.count(it.key()) != 0) continue;
    extra[it.key()] = it.value();
    if (diagnostics != nullptr) {
      ++diagnostics->unknown_fields;
      diagnostics->unknown_paths.push_back(child(path, it.key()));
    }
  }
  return extra;
}

const std::set<std::string> kMatchKeys = {
    "match_id", "duration", "start_time", "game_mode", "lobby_type", "region", "patch",
    "skill", "human_players", "positive_votes", "radiant_win", "radiant_score", "dire_score",
    "tower_status_radiant", "tower_status_dire", "barracks_status_radiant",
    "barracks_status_dire", "first_blood_time", "throw", "comeback", "loss", "win", "chat",
    "cosmetics", "players", "objectives", "teamfights", "picks_bans", "draft_timings",
    "radiant_team", "dire_team", "radiant_gold_adv", "radiant_xp_adv", "all_word_counts"};

const std::set<std::string> kPlayerKeys = {"account_id", "player_slot", "hero_id", "kills",
                                           "deaths",     "assists",     "denies",  "last_hits",
                                           "isRadiant",  "my_word_counts"};

const std::set<std::string> kChatKeys = {"time", "type", "key", "slot", "channel", "kind"};

ChatKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "typed_text") return ChatKind::kTypedText;
  if (s == "chatwheel_general") return ChatKind::kChatwheelGeneral;
  if (s == "chatwheel_hero") return ChatKind::kChatwheelHero;
  if (s == "sound") return ChatKind::kSound;
  if (s == "spray") return ChatKind::kSpray;
  schema_error(path, "unknown chat kind '" + s + "'");
}

ChatMessage parse_chat(const Json& c, const std::string& path, ParseDiagnostics* diagnostics) {
  if (!c.is_object()) schema_error(path, "expected an object");
  ChatMessage m;
  m.time_s = read_number(c, "time", path, 0.0);
  m.sender_slot = static_cast<int>(read_int(c, "slot", path, 0));
  const Json* kind = find(c, "kind");
  const Json* type = find(c, "type");
  if (kind != nullptr) {
    if (!kind->is_string()) schema_error(child(path, "kind"), "expected a string");
    m.kind = parse_kind(kind->get<std::string>(), child(path, "kind"));
  } else if (type != nullptr && type->is_string() && type->get<std::string>() == "chatwheel") {
    m.kind = ChatKind::kChatwheelGeneral;
  } else {
    m.kind = ChatKind::kTypedText;
  }
  if (const Json* ch = find(c, "channel")) {
    const std::string v = ch->is_string() ? ch->get<std::string>() : "";
    if (v == "global") {
      m.channel = ChatChannel::kGlobal;
    } else if (v == "team") {
      m.channel = ChatChannel::kTeam;
    } else {
      schema_error(child(path, "channel"), "expected \"global\" or \"team\"");
    }
  }
  if (m.kind == ChatKind::kTypedText && m.channel != ChatChannel::kGlobal) {
    schema_error(child(path, "channel"), "typed text is only public on the global channel");
  }
  if (const Json* key = find(c, "key")) {
    if (key->is_string()) {
      m.text_or_id = key->get<std::string>();
    } else if (key->is_number_integer()) {
      m.text_or_id = std::to_string(key->get<int64_t>());
    } else {
      schema_error(child(path, "key"), "expected a string or integer");
    }
  }
  m.extra = collect_extra(c, kChatKeys, path, diagnostics);
  return m;
}

MatchPlayerSlot parse_slot(const Json& p, const std::string& path, ParseDiagnostics* diagnostics) {
  if (!p.is_object()) schema_error(path, "expected an object");
  MatchPlayerSlot s;
  if (const Json* id = find(p, "account_id")) {
    if (!id->is_number_integer() || id->get<int64_t>() < 0) {
      schema_error(child(path, "account_id"), "expected a non-negative integer");
    }
    const uint64_t v = id->get<uint64_t>();
    if (v != 0 && v != kAnonymousAccount) s.handle = v;
  }
  s.player_slot = static_cast<int>(read_int(p, "player_slot", path, 0));
  s.hero_id = static_cast<int>(read_int(p, "hero_id", path, 0));
  s.kills = read_count(p, "kills", path);
  s.deaths = read_count(p, "deaths", path);
  s.assists = read_count(p, "assists", path);
  s.denies = read_count(p, "denies", path);
  s.last_hits = read_count(p, "last_hits", path);
  s.is_radiant = read_bool(p, "isRadiant", path, s.player_slot < 128);
  s.word_counts = read_word_counts(p, "my_word_counts", path);
  s.extra = collect_extra(p, kPlayerKeys, path, diagnostics);
  return s;
}

std::vector<double> read_series(const Json& obj, std::string_view key, const std::string& path) {
  std::vector<double> out;
  const Json& arr = read_array(obj, key, path);
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) schema_error(index(child(path, key), i), "expected a number");
    out.push_back(arr[i].get<double>());
  }
  return out;
}

Json number_json(double v) {
  if (std::floor(v) == v && std::fabs(v) < 9e15) return Json(static_cast<int64_t>(v));
  return Json(v);
}

}  // namespace

std::string_view chat_kind_name(ChatKind k) {
  switch (k) {
    case ChatKind::kTypedText: return "typed_text";
    case ChatKind::kChatwheelGeneral: return "chatwheel_general";
    case ChatKind::kChatwheelHero: return "chatwheel_hero";
    case ChatKind::kSound: return "sound";
    case ChatKind::kSpray: return "spray";
  }
  return "typed_text";
}

std::string_view chat_channel_name(ChatChannel c) {
  return c == ChatChannel::kGlobal ? "global" : "team";
}

std::optional<size_t> MatchRecord::slot_of(uint64_t handle) const {
  for (size_t i = 0; i < players.size(); ++i) {
    if (players[i].handle && *players[i].handle == handle) return i;
  }
  return std::nullopt;
}

MatchRecord match_from_json(const Json& doc, ParseDiagnostics* diagnostics) {
  const std::string root = "$";
  if (!doc.is_object()) schema_error(root, "expected a JSON object");
  MatchRecord m;
  m.match_id = read_int(doc, "match_id", root, 0, true);
  if (m.match_id <= 0) schema_error("$.match_id", "must be positive");
  m.duration_s = read_int(doc, "duration", root, 0, true);
  if (m.duration_s < 0) schema_error("$.duration", "must be non-negative");
  m.start_time = read_int(doc, "start_time", root, 0);
  m.game_mode = static_cast<int>(read_int(doc, "game_mode", root, 0));
  m.lobby_type = static_cast<int>(read_int(doc, "lobby_type", root, 0));
  m.region = static_cast<int>(read_int(doc, "region", root, 0));
  m.patch = static_cast<int>(read_int(doc, "patch", root, 0));
  if (auto v = read_optional_int(doc, "skill", root)) m.skill = static_cast<int>(*v);
  if (auto v = read_optional_int(doc, "human_players", root)) m.human_players = static_cast<int>(*v);
  if (auto v = read_optional_int(doc, "positive_votes", root)) m.positive_votes = static_cast<int>(*v);
  m.radiant_win = read_bool(doc, "radiant_win", root, false);
  m.radiant_score = read_count(doc, "radiant_score", root);
  m.dire_score = read_count(doc, "dire_score", root);
  m.tower_status_radiant = static_cast<int>(read_int(doc, "tower_status_radiant", root, 0));
  m.tower_status_dire = static_cast<int>(read_int(doc, "tower_status_dire", root, 0));
  m.barracks_status_radiant = static_cast<int>(read_int(doc, "barracks_status_radiant", root, 0));
  m.barracks_status_dire = static_cast<int>(read_int(doc, "barracks_status_dire", root, 0));
  m.first_blood_time = read_int(doc, "first_blood_time", root, 0);
  m.throw_value = read_optional_int(doc, "throw", root);
  m.comeback = read_optional_int(doc, "comeback", root);
  m.loss = read_optional_int(doc, "loss", root);
  m.win = read_optional_int(doc, "win", root);

  const Json* players = find(doc, "players");
  if (players == nullptr) schema_error("$.players", "required field missing");
  if (!players->is_array()) schema_error("$.players", "expected an array");
  if (players->empty() || players->size() > 10) {
    schema_error("$.players", "a match has between 1 and 10 player slots");
  }
  std::set<uint64_t> seen;
  for (size_t i = 0; i < players->size(); ++i) {
    const std::string path = index("$.players", i);
    auto slot = parse_slot((*players)[i], path, diagnostics);
    if (slot.handle && !seen.insert(*slot.handle).second) {
      schema_error(child(path, "account_id"), "handle appears in more than one slot");
    }
    m.players.push_back(std::move(slot));
  }

  const Json& chat = read_array(doc, "chat", root);
  for (size_t i = 0; i < chat.size(); ++i) {
    m.chat.push_back(parse_chat(chat[i], index("$.chat", i), diagnostics));
  }
  const Json& cosmetics = read_array(doc, "cosmetics", root);
  for (size_t i = 0; i < cosmetics.size(); ++i) {
    const std::string path = index("$.cosmetics", i);
    const Json& c = cosmetics[i];
    if (!c.is_object()) schema_error(path, "expected an object");
    Cosmetic cos;
    cos.item_id = read_int(c, "item_id", path, 0, true);
    cos.owner_slot = static_cast<int>(read_int(c, "player_slot", path, 0));
    cos.price = read_number(c, "price", path, 0.0);
    if (cos.price < 0.0) schema_error(child(path, "price"), "must be non-negative");
    m.cosmetics.push_back(cos);
  }
  m.objectives = read_array(doc, "objectives", root);
  m.teamfights = read_array(doc, "teamfights", root);
  m.picks_bans = read_array(doc, "picks_bans", root);
  m.draft_timings = read_array(doc, "draft_timings", root);
  if (const Json* v = find(doc, "radiant_team")) m.radiant_team = *v;
  if (const Json* v = find(doc, "dire_team")) m.dire_team = *v;
  m.radiant_gold_adv = read_series(doc, "radiant_gold_adv", root);
  m.radiant_xp_adv = read_series(doc, "radiant_xp_adv", root);
  m.all_word_counts = read_word_counts(doc, "all_word_counts", root);
  m.extra = collect_extra(doc, kMatchKeys, root, diagnostics);
  return m;
}

MatchRecord parse_match(std::string_view bytes, ParseDiagnostics* diagnostics) {
  Json doc = Json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (doc.is_discarded()) schema_error("$", "not a valid JSON document");
  return match_from_json(doc, diagnostics);
}

Json match_to_json(const MatchRecord& m) {
  Json doc = m.extra.is_object() ? m.extra : Json::object();
  doc["match_id"] = m.match_id;
  doc["duration"] = m.duration_s;
  doc["start_time"] = m.start_time;
  doc["game_mode"] = m.game_mode;
  doc["lobby_type"] = m.lobby_type;
  doc["region"] = m.region;
  doc["patch"] = m.patch;
  if (m.skill) doc["skill"] = *m.skill;
  if (m.human_players) doc["human_players"] = *m.human_players;
  if (m.positive_votes) doc["positive_votes"] = *m.positive_votes;
  doc["radiant_win"] = m.radiant_win;
  doc["radiant_score"] = m.radiant_score;
  doc["dire_score"] = m.dire_score;
  doc["tower_status_radiant"] = m.tower_status_radiant;
  doc["tower_status_dire"] = m.tower_status_dire;
  doc["barracks_status_radiant"] = m.barracks_status_radiant;
  doc["barracks_status_dire"] = m.barracks_status_dire;
  doc["first_blood_time"] = m.first_blood_time;
  if (m.throw_value) doc["throw"] = *m.throw_value;
  if (m.comeback) doc["comeback"] = *m.comeback;
  if (m.loss) doc["loss"] = *m.loss;
  if (m.win) doc["win"] = *m.win;

  Json players = Json::array();
  for (const auto& s : m.players) {
    Json p = s.extra.is_object() ? s.extra : Json::object();
    p["account_id"] = s.handle ? Json(*s.handle) : Json();
    p["player_slot"] = s.player_slot;
    p["hero_id"] = s.hero_id;
    p["kills"] = s.kills;
    p["deaths"] = s.deaths;
    p["assists"] = s.assists;
    p["denies"] = s.denies;
    p["last_hits"] = s.last_hits;
    p["isRadiant"] = s.is_radiant;
    if (!s.word_counts.empty()) p["my_word_counts"] = s.word_counts;
    players.push_back(std::move(p));
  }
  doc["players"] = std::move(players);

  Json chat = Json::array();
  for (const auto& c : m.chat) {
    Json e = c.extra.is_object() ? c.extra : Json::object();
    e["time"] = number_json(c.time_s);
    e["type"] = c.kind == ChatKind::kTypedText ? "chat" : "chatwheel";
    e["kind"] = std::string(chat_kind_name(c.kind));
    e["channel"] = std::string(chat_channel_name(c.channel));
    e["key"] = c.text_or_id;
    e["slot"] = c.sender_slot;
    chat.push_back(std::move(e));
  }
  doc["chat"] = std::move(chat);

  Json cosmetics = Json::array();
  for (const auto& c : m.cosmetics) {
    cosmetics.push_back({{"item_id", c.item_id}, {"player_slot", c.owner_slot},
                         {"price", number_json(c.price)}});
  }
  doc["cosmetics"] = std::move(cosmetics);
  doc["objectives"] = m.objectives;
  doc["teamfights"] = m.teamfights;
  doc["picks_bans"] = m.picks_bans;
  doc["draft_timings"] = m.draft_timings;
  if (!m.radiant_team.is_null()) doc["radiant_team"] = m.radiant_team;
  if (!m.dire_team.is_null()) doc["dire_team"] = m.dire_team;
  Json gold = Json::array();
  for (double v : m.radiant_gold_adv) gold.push_back(number_json(v));
  doc["radiant_gold_adv"] = std::move(gold);
  Json xp = Json::array();
  for (double v : m.radiant_xp_adv) xp.push_back(number_json(v));
  doc["radiant_xp_adv"] = std::move(xp);
  if (!m.all_word_counts.empty()) doc["all_word_counts"] = m.all_word_counts;
  return doc;
}

std::string serialize_match(const MatchRecord& match) { return match_to_json(match).dump(); }

PlayerRecord parse_player(uint64_t handle, std::string_view profile, std::string_view matches) {
  Json p = Json::parse(profile.begin(), profile.end(), nullptr, false);
  if (p.is_discarded() || !p.is_object()) schema_error("$", "player payload is not a JSON object");
  const Json* prof = find(p, "profile");
  if (prof == nullptr || !prof->is_object()) {
    fail(ErrorCode::kNotFound, "no public profile for handle " + std::to_string(handle));
  }
  PlayerRecord rec;
  rec.handle = handle;
  if (const Json* id = find(*prof, "account_id")) {
    if (!id->is_number_integer() || id->get<uint64_t>() != handle) {
      schema_error("$.profile.account_id", "does not match requested handle");
    }
  }
  rec.has_plus = read_bool(*prof, "plus", "$.profile", false);
  if (auto v = read_optional_int(p, "rank_tier", "$")) rec.rank_tier = static_cast<int>(*v);

  Json list = Json::parse(matches.begin(), matches.end(), nullptr, false);
  if (list.is_discarded() || !list.is_array()) {
    schema_error("$", "match list payload is not a JSON array");
  }
  std::set<int64_t> seen;
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string path = index("$", i);
    if (!list[i].is_object()) schema_error(path, "expected an object");
    const int64_t id = read_int(list[i], "match_id", path, 0, true);
    if (id <= 0) schema_error(child(path, "match_id"), "must be positive");
    if (seen.insert(id).second) rec.match_ids.push_back(id);
  }
  return rec;
}

std::string serialize_player_profile(const PlayerRecord& player) {
  Json doc = {{"profile", {{"account_id", player.handle}, {"plus", player.has_plus}}}};
  doc["rank_tier"] = player.rank_tier ? Json(*player.rank_tier) : Json();
  return doc.dump();
}

std::string serialize_player_matches(const PlayerRecord& player,
                                     const std::vector<int64_t>& start_times) {
  Json list = Json::array();
  for (size_t i = 0; i < player.match_ids.size(); ++i) {
    Json e = {{"match_id", player.match_ids[i]}};
    if (i < start_times.size()) e["start_time"] = start_times[i];
    list.push_back(std::move(e));
  }
  return list.dump();
}

}  // namespace aia::ingest
