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
#include "features/chat.hpp"

#include <cctype>

#include "common/error.hpp"
#include "common/util.hpp"

namespace aia::features {
namespace {

bool is_kill_objective(const ingest::Json& o) {
  if (!o.is_object() || !o.contains("type") || !o["type"].is_string()) return false;
  const auto& t = o["type"].get_ref<const std::string&>();
  return t == "kill" || t == "CHAT_MESSAGE_FIRSTBLOOD";
}

bool involves(const ingest::Json& o, size_t slot) {
  for (const char* key : {"slot", "key"}) {
    if (!o.contains(key)) continue;
    const auto& v = o[key];
    if (v.is_number_integer() && v.get<int64_t>() == static_cast<int64_t>(slot)) return true;
    if (v.is_string() && v.get<std::string>() == std::to_string(slot)) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u) || ch == '\'' || u >= 0x80) {
      cur += static_cast<char>(std::tolower(u));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

ChatFeatures extract_chat_features(const ingest::MatchRecord& match, size_t slot,
                                   const Resources& resources, double early_window_s,
                                   double after_kill_window_s) {
  if (slot >= match.players.size()) {
    fail(ErrorCode::kSlotNotFound, "slot " + std::to_string(slot) + " not in match " +
                                       std::to_string(match.match_id));
  }
  std::vector<double> kill_times;
  for (const auto& o : match.objectives) {
    if (is_kill_objective(o) && involves(o, slot) && o.contains("time") && o["time"].is_number()) {
      kill_times.push_back(o["time"].get<double>());
    }
  }

  ChatFeatures f;
  for (const auto& msg : match.chat) {
    if (msg.sender_slot != static_cast<int>(slot)) continue;
    switch (msg.kind) {
      case ingest::ChatKind::kTypedText: {
        // Only global typed text is public; the parser rejects anything else.
        ++f.typed_msgs;
        for (const auto& tok : tokenize(msg.text_or_id)) {
          for (size_t c = 0; c < resources.lexicons.size() && c < f.lexicon.size(); ++c) {
            if (resources.lexicons[c].words.count(tok) != 0) ++f.lexicon[c];
          }
        }
        const std::string t = trim(msg.text_or_id);
        if (!t.empty() && t.find_first_not_of('?') == std::string::npos) ++f.question_only_msgs;
        for (char ch : msg.text_or_id) {
          if (ch == '?') ++f.question_marks;
          if (ch == '!') ++f.exclamation_marks;
          if (ch >= 'A' && ch <= 'Z') ++f.capital_letters;
        }
        if (msg.time_s < early_window_s) ++f.early_game_msgs;
        for (double k : kill_times) {
          if (msg.time_s >= k && msg.time_s <= k + after_kill_window_s) {
            ++f.after_kill_msgs;
            break;
          }
        }
        break;
      }
      case ingest::ChatKind::kChatwheelGeneral:
      case ingest::ChatKind::kChatwheelHero: {
        const bool global = msg.channel == ingest::ChatChannel::kGlobal;
        (global ? f.wheel_global_total : f.wheel_team_total) += 1;
        if (msg.kind == ingest::ChatKind::kChatwheelHero) {
          ++f.hero_wheel_msgs;
          break;
        }
        auto it = resources.wheel.find(msg.text_or_id);
        if (it == resources.wheel.end()) break;
        const auto& cats = wheel_categories();
        for (size_t c = 0; c < cats.size(); ++c) {
          if (cats[c] == it->second) (global ? f.wheel_global : f.wheel_team)[c] += 1;
        }
        break;
      }
      case ingest::ChatKind::kSound: ++f.sound_count; break;
      case ingest::ChatKind::kSpray: ++f.spray_count; break;
    }
  }
  return f;
}

}  // namespace aia::features
