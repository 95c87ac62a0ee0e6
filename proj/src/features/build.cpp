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
#include "features/build.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/util.hpp"
#include "json.hpp"

namespace aia::features {
namespace {

constexpr int kRankedLobby = 7;
const char* kWeekdays[7] = {"monday", "tuesday", "wednesday", "thursday",
                            "friday", "saturday", "sunday"};

double guard(double d) { return std::max(d, 1.0); }

bool slot_won(const ingest::MatchRecord& m, const ingest::MatchPlayerSlot& s) {
  return s.is_radiant == m.radiant_win;
}

std::string optional_code(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string("unknown");
}

bool uses_match(const ingest::MatchRecord& m, const FeatureConfig& config) {
  return config.min_human_players <= 0 || !m.human_players ||
         *m.human_players >= config.min_human_players;
}

// 1 = highest value; ties share the best rank.
int rank_among(double mine, const std::vector<double>& all) {
  int better = 0;
  for (double v : all) better += v > mine ? 1 : 0;
  return better + 1;
}

}  // namespace

int weekday_of(int64_t t) {
  int64_t days = t >= 0 ? t / 86400 : (t - 86399) / 86400;
  // 1970-01-01 was a Thursday.
  return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

int hour_of(int64_t t) {
  const int64_t s = ((t % 86400) + 86400) % 86400;
  return static_cast<int>(s / 3600);
}

std::string config_hash(const FeatureConfig& c, const Resources& resources) {
  nlohmann::json doc = {{"early_window_s", c.early_window_s},
                        {"after_kill_window_s", c.after_kill_window_s},
                        {"min_human_players", c.min_human_players},
                        {"min_matches", c.min_matches},
                        {"max_per_player", c.max_per_player},
                        {"n_variants", c.n_variants},
                        {"seed", c.seed},
                        {"resources", resources.version}};
  return hex64(fnv1a64(doc.dump()));
}

FeatureRow build_match_features(const ingest::MatchRecord& m, size_t slot,
                                const Resources& resources, const FeatureConfig& config) {
  if (slot >= m.players.size()) {
    fail(ErrorCode::kSlotNotFound, "slot " + std::to_string(slot) + " not in match " +
                                       std::to_string(m.match_id));
  }
  const auto& p = m.players[slot];
  const bool radiant = p.is_radiant;
  const double minutes = static_cast<double>(m.duration_s) / 60.0;
  const int team_score = radiant ? m.radiant_score : m.dire_score;
  const int enemy_score = radiant ? m.dire_score : m.radiant_score;
  const double side = radiant ? 1.0 : -1.0;

  FeatureRow r;
  r.flag("win", slot_won(m, p));
  r.flag("is_radiant", radiant);
  r.flag("ranked", m.lobby_type == kRankedLobby);
  r.num("duration_min", minutes);
  r.num("kills", p.kills);
  r.num("deaths", p.deaths);
  r.num("assists", p.assists);
  r.num("denies", p.denies);
  r.num("last_hits", p.last_hits);
  r.num("kda", (p.kills + p.assists) / guard(p.deaths));
  r.num("kill_participation", (p.kills + p.assists) / guard(team_score));
  r.num("kills_per_min", p.kills / guard(minutes));
  r.num("deaths_per_min", p.deaths / guard(minutes));
  r.num("assists_per_min", p.assists / guard(minutes));
  r.num("last_hits_per_min", p.last_hits / guard(minutes));
  r.num("denies_per_min", p.denies / guard(minutes));
  r.num("team_score", team_score);
  r.num("enemy_score", enemy_score);
  r.num("first_blood_time", static_cast<double>(m.first_blood_time));
  r.num("comeback", static_cast<double>(m.comeback.value_or(0)));
  r.num("throw", static_cast<double>(m.throw_value.value_or(0)));
  r.num("loss_value", static_cast<double>(m.loss.value_or(0)));
  r.num("win_value", static_cast<double>(m.win.value_or(0)));
  r.cat("lobby_type", std::to_string(m.lobby_type));
  r.cat("game_mode", std::to_string(m.game_mode));
  r.cat("region", std::to_string(m.region));
  r.cat("patch", std::to_string(m.patch));
  r.cat("skill", optional_code(m.skill));
  const int wd = weekday_of(m.start_time);
  r.cat("weekday", kWeekdays[wd]);
  r.flag("weekend", wd >= 5);
  r.num("start_hour", hour_of(m.start_time));

  const auto own_towers = static_cast<unsigned>(radiant ? m.tower_status_radiant : m.tower_status_dire);
  const auto enemy_towers = static_cast<unsigned>(radiant ? m.tower_status_dire : m.tower_status_radiant);
  const auto own_rax =
      static_cast<unsigned>(radiant ? m.barracks_status_radiant : m.barracks_status_dire);
  const auto enemy_rax =
      static_cast<unsigned>(radiant ? m.barracks_status_dire : m.barracks_status_radiant);
  r.num("towers_own_alive", std::popcount(own_towers));
  r.num("towers_enemy_alive", std::popcount(enemy_towers));
  r.num("barracks_own_alive", std::popcount(own_rax));
  r.num("barracks_enemy_alive", std::popcount(enemy_rax));

  double gold_final = 0.0, gold_max = 0.0, gold_min = 0.0, xp_final = 0.0;
  if (!m.radiant_gold_adv.empty()) {
    gold_final = side * m.radiant_gold_adv.back();
    gold_max = gold_min = side * m.radiant_gold_adv.front();
    for (double g : m.radiant_gold_adv) {
      gold_max = std::max(gold_max, side * g);
      gold_min = std::min(gold_min, side * g);
    }
  }
  if (!m.radiant_xp_adv.empty()) xp_final = side * m.radiant_xp_adv.back();
  r.num("gold_adv_final", gold_final);
  r.num("gold_adv_max", gold_max);
  r.num("gold_adv_min", gold_min);
  r.num("xp_adv_final", xp_final);

  double price = 0.0;
  int items = 0;
  for (const auto& c : m.cosmetics) {
    if (c.owner_slot == p.player_slot) {
      price += c.price;
      ++items;
    }
  }
  r.num("cosmetics_price", price);
  r.num("cosmetics_count", items);

  int words = 0;
  for (const auto& [_, n] : p.word_counts) words += n;
  r.num("words_total", words);
  r.num("words_distinct", static_cast<double>(p.word_counts.size()));

  const auto chat = extract_chat_features(m, slot, resources, config.early_window_s,
                                          config.after_kill_window_s);
  r.num("chat_typed_msgs", chat.typed_msgs);
  for (size_t c = 0; c < lexicon_categories().size(); ++c) {
    r.num("chat_lex_" + lexicon_categories()[c], chat.lexicon[c]);
  }
  r.num("chat_question_only_msgs", chat.question_only_msgs);
  r.num("chat_question_marks", chat.question_marks);
  r.num("chat_exclamation_marks", chat.exclamation_marks);
  r.num("chat_capital_letters", chat.capital_letters);
  r.num("chat_early_game_msgs", chat.early_game_msgs);
  r.num("chat_after_kill_msgs", chat.after_kill_msgs);
  for (size_t c = 0; c < wheel_categories().size(); ++c) {
    r.num("wheel_global_" + wheel_categories()[c], chat.wheel_global[c]);
    r.num("wheel_team_" + wheel_categories()[c], chat.wheel_team[c]);
  }
  r.num("wheel_global_total", chat.wheel_global_total);
  r.num("wheel_team_total", chat.wheel_team_total);
  r.num("wheel_hero_msgs", chat.hero_wheel_msgs);
  r.num("sound_count", chat.sound_count);
  r.num("spray_count", chat.spray_count);
  return r;
}

FeatureRow build_augmentation(const ingest::MatchRecord& m, size_t slot,
                              const Resources& resources) {
  if (slot >= m.players.size()) {
    fail(ErrorCode::kSlotNotFound, "slot " + std::to_string(slot) + " not in match " +
                                       std::to_string(m.match_id));
  }
  const auto& p = m.players[slot];
  const HeroInfo hero = resources.hero(p.hero_id);

  std::vector<int> typed(m.players.size(), 0);
  for (const auto& msg : m.chat) {
    if (msg.kind == ingest::ChatKind::kTypedText && msg.sender_slot >= 0 &&
        static_cast<size_t>(msg.sender_slot) < typed.size()) {
      ++typed[msg.sender_slot];
    }
  }
  std::vector<double> chat_all, lh_team, kills_all;
  for (size_t i = 0; i < m.players.size(); ++i) {
    chat_all.push_back(typed[i]);
    kills_all.push_back(m.players[i].kills);
    if (m.players[i].is_radiant == p.is_radiant) lh_team.push_back(m.players[i].last_hits);
  }
  FeatureRow r;
  r.cat("hero_gender", hero.gender, true);
  r.cat("hero_primary_attr", hero.primary_attr, true);
  r.cat("hero_role", hero.role, true);
  r.flag("hero_is_female", hero.gender == "female", true);
  r.num("rank_chat", rank_among(typed[slot], chat_all), true);
  r.num("rank_kills", rank_among(p.kills, kills_all), true);
  r.num("rank_last_hits_team", rank_among(p.last_hits, lh_team), true);
  return r;
}

FeatureRow build_player_features(const ingest::PlayerRecord& player,
                                 const std::vector<ingest::MatchRecord>& matches,
                                 const Resources& resources, const FeatureConfig& config) {
  // Per-match rows for the matches this handle actually played.
  std::vector<FeatureRow> rows;
  std::vector<const ingest::MatchRecord*> used;
  std::vector<size_t> slots;
  for (const auto& m : matches) {
    if (!uses_match(m, config)) continue;
    auto slot = m.slot_of(player.handle);
    if (!slot) continue;
    rows.push_back(build_match_features(m, *slot, resources, config));
    used.push_back(&m);
    slots.push_back(*slot);
  }
  if (rows.size() < config.min_matches || rows.empty()) {
    fail(ErrorCode::kInsufficientMatches,
         "player " + std::to_string(player.handle) + " has " + std::to_string(rows.size()) +
             " usable matches, need " + std::to_string(config.min_matches));
  }
  const double n = static_cast<double>(rows.size());

  FeatureRow r;
  const auto& cols = rows[0].columns;
  for (size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].kind == ColumnKind::kCategorical || cols[c].name == "win") continue;
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& row : rows) v.push_back(std::get<double>(row.cells[c]));
    r.num("mean_" + cols[c].name, mean(v));
    if (cols[c].kind == ColumnKind::kNumeric) r.num("std_" + cols[c].name, stddev(v));
  }

  int wins = 0, ranked = 0, ranked_wins = 0;
  std::array<double, 7> days{};
  std::array<double, 6> hours{};
  double cosmetics = 0.0, typed = 0.0, female = 0.0;
  std::map<int, int> hero_counts;
  for (size_t i = 0; i < used.size(); ++i) {
    const auto& m = *used[i];
    const auto& s = m.players[slots[i]];
    const bool won = slot_won(m, s);
    wins += won;
    if (m.lobby_type == kRankedLobby) {
      ++ranked;
      ranked_wins += won;
    }
    days[weekday_of(m.start_time)] += 1.0;
    hours[hour_of(m.start_time) / 4] += 1.0;
    for (const auto& c : m.cosmetics) {
      if (c.owner_slot == s.player_slot) cosmetics += c.price;
    }
    for (const auto& msg : m.chat) {
      if (msg.kind == ingest::ChatKind::kTypedText &&
          msg.sender_slot == static_cast<int>(slots[i])) {
        typed += 1.0;
      }
    }
    ++hero_counts[s.hero_id];
    if (resources.hero(s.hero_id).gender == "female") female += 1.0;
  }
  const int normal = static_cast<int>(rows.size()) - ranked;
  r.num("match_count", n);
  r.num("win_rate", wins / n);
  r.num("ranked_win_rate", ranked_wins / guard(ranked));
  r.num("normal_win_rate", (wins - ranked_wins) / guard(normal));
  r.num("ranked_match_share", ranked / n);
  for (int d = 0; d < 7; ++d) r.num(std::string("play_rate_") + kWeekdays[d], days[d] / n);
  for (int h = 0; h < 6; ++h) {
    r.num("play_rate_hours_" + std::to_string(h * 4) + "_" + std::to_string(h * 4 + 4),
          hours[h] / n);
  }
  r.num("cosmetics_total_price", cosmetics);
  r.flag("has_plus", player.has_plus);
  r.flag("has_rank_tier", player.rank_tier.has_value());
  r.num("rank_tier", player.rank_tier.value_or(0));
  r.num("ratio_chat_msg", typed / n);

  int top_hero = 0, top_count = -1;
  for (const auto& [id, count] : hero_counts) {
    if (count > top_count) {
      top_hero = id;
      top_count = count;
    }
  }
  const HeroInfo top = resources.hero(top_hero);
  r.num("distinct_heroes", static_cast<double>(hero_counts.size()));
  r.cat("most_played_hero_gender", top.gender);
  r.cat("most_played_hero_attr", top.primary_attr);
  r.cat("most_played_hero_role", top.role);
  r.num("female_hero_ratio", female / n);
  return r;
}

std::vector<FeatureMatrix> build_distilled(const FeatureMatrix& m, const FeatureMatrix& augmentation,
                                           size_t max_per_player, size_t n_variants,
                                           uint64_t seed) {
  if (m.variant != Variant::kM) fail(ErrorCode::kInvalidArgument, "distillation needs the M variant");
  if (max_per_player == 0) fail(ErrorCode::kInvalidArgument, "max_per_player must be positive");
  const FeatureMatrix full = FeatureMatrix::hconcat(m, augmentation);

  std::map<uint64_t, std::vector<size_t>> by_owner;
  for (size_t r = 0; r < m.rows(); ++r) by_owner[m.row_owner[r]].push_back(r);
  for (auto& [_, rows] : by_owner) {
    std::sort(rows.begin(), rows.end(), [&](size_t a, size_t b) {
      return m.row_match.empty() ? a < b : m.row_match[a] < m.row_match[b];
    });
  }

  std::vector<FeatureMatrix> out;
  for (size_t v = 0; v < n_variants; ++v) {
    const uint64_t vseed = derive_seed(seed, {v});
    std::vector<size_t> keep;
    for (const auto& [owner, rows] : by_owner) {
      if (rows.size() <= max_per_player) {
        keep.insert(keep.end(), rows.begin(), rows.end());
        continue;
      }
      Rng rng(derive_seed(vseed, {owner}));
      auto pick = rng.sample_without_replacement(rows.size(), max_per_player);
      std::sort(pick.begin(), pick.end());
      for (size_t i : pick) keep.push_back(rows[i]);
    }
    FeatureMatrix d = full.select_rows(keep);
    d.variant = Variant::kMbar;
    d.variant_seed = vseed;
    out.push_back(std::move(d));
  }
  return out;
}

MatchTables build_match_tables(const Corpus& corpus, const Resources& resources,
                               const FeatureConfig& config, unsigned jobs) {
  struct Unit {
    uint64_t owner;
    const ingest::MatchRecord* match;
    size_t slot;
  };
  std::vector<Unit> units;
  for (const auto& [player, _] : corpus.players) {
    std::vector<int64_t> ids = player.match_ids;
    std::sort(ids.begin(), ids.end());
    for (int64_t id : ids) {
      auto it = corpus.matches.find(id);
      if (it == corpus.matches.end() || !uses_match(it->second, config)) continue;
      auto slot = it->second.slot_of(player.handle);
      if (!slot) continue;
      units.push_back({player.handle, &it->second, *slot});
    }
  }
  std::vector<FeatureRow> base(units.size()), aug(units.size());
  parallel_for(units.size(), jobs, [&](size_t i) {
    base[i] = build_match_features(*units[i].match, units[i].slot, resources, config);
    aug[i] = build_augmentation(*units[i].match, units[i].slot, resources);
  });
  MatchTables t;
  t.m.variant = Variant::kM;
  t.augmentation.variant = Variant::kM;
  t.m.config_hash = t.augmentation.config_hash = config_hash(config, resources);
  for (size_t i = 0; i < units.size(); ++i) {
    t.m.append(base[i], units[i].owner, units[i].match->match_id);
    t.augmentation.append(aug[i], units[i].owner, units[i].match->match_id);
  }
  return t;
}

FeatureMatrix build_player_matrix(const Corpus& corpus, const Resources& resources,
                                  const FeatureConfig& config, unsigned jobs) {
  std::vector<FeatureRow> rows(corpus.players.size());
  parallel_for(rows.size(), jobs, [&](size_t i) {
    const auto& player = corpus.players[i].first;
    std::vector<ingest::MatchRecord> matches;
    for (int64_t id : player.match_ids) {
      auto it = corpus.matches.find(id);
      if (it != corpus.matches.end()) matches.push_back(it->second);
    }
    rows[i] = build_player_features(player, matches, resources, config);
  });
  FeatureMatrix p;
  p.variant = Variant::kP;
  p.config_hash = config_hash(config, resources);
  for (size_t i = 0; i < rows.size(); ++i) p.append(rows[i], corpus.players[i].first.handle);
  return p;
}

}  // namespace aia::features
