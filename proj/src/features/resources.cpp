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
#include "features/resources.hpp"

#include <cstdlib>

#include "common/error.hpp"
#include "common/util.hpp"
#include "json.hpp"

namespace aia::features {

const std::vector<std::string>& lexicon_categories() {
  static const std::vector<std::string> kCategories = {"laugh", "slang", "bad_behavior",
                                                       "good_behavior", "provocative"};
  return kCategories;
}

const std::vector<std::string>& wheel_categories() {
  static const std::vector<std::string> kCategories = {"tactical", "laugh", "deny",
                                                       "good_behavior"};
  return kCategories;
}

std::vector<Lexicon> load_lexicons(const std::filesystem::path& dir) {
  std::vector<Lexicon> out;
  for (const auto& category : lexicon_categories()) {
    const auto path = dir / (category + ".txt");
    if (!std::filesystem::exists(path)) {
      fail(ErrorCode::kConfig, "missing lexicon file " + path.string());
    }
    Lexicon lex{category, {}};
    for (const auto& raw : split(read_file(path), '\n')) {
      std::string line = trim(raw.substr(0, raw.find('#')));
      if (line.empty()) continue;
      line = to_lower(line);
      if (!lex.words.insert(line).second) {
        fail(ErrorCode::kConfig, "duplicate token '" + line + "' in lexicon " + category);
      }
    }
    if (lex.words.empty()) fail(ErrorCode::kConfig, "lexicon " + category + " is empty");
    out.push_back(std::move(lex));
  }
  return out;
}

HeroInfo Resources::hero(int hero_id) const {
  auto it = heroes.find(hero_id);
  if (it == heroes.end()) return {"unknown", "unknown", "unknown", "unknown"};
  return it->second;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("AIA_DATA_DIR"); env != nullptr && *env != '\0') return env;
#ifdef AIA_DATA_DIR
  return AIA_DATA_DIR;
#else
  return "data";
#endif
}

Resources load_resources(const std::filesystem::path& data_dir) {
  Resources r;
  r.lexicons = load_lexicons(data_dir / "lexicons");
  std::string digest;
  for (const auto& lex : r.lexicons) {
    digest += lex.category + ":";
    for (const auto& w : lex.words) digest += w + ",";
  }

  const auto wheel_text = read_file(data_dir / "chatwheel.json");
  const auto hero_text = read_file(data_dir / "heroes.json");
  digest += wheel_text;
  digest += hero_text;
  try {
    const auto wheel = nlohmann::json::parse(wheel_text);
    for (const auto& [category, ids] : wheel.at("categories").items()) {
      bool known = false;
      for (const auto& c : wheel_categories()) known = known || c == category;
      if (!known) fail(ErrorCode::kConfig, "unknown chat-wheel category '" + category + "'");
      for (const auto& id : ids) {
        const std::string key = id.is_string() ? id.get<std::string>() : id.dump();
        if (!r.wheel.emplace(key, category).second) {
          fail(ErrorCode::kConfig, "chat-wheel id " + key + " listed twice");
        }
      }
    }
    const auto heroes = nlohmann::json::parse(hero_text);
    for (const auto& h : heroes.at("heroes")) {
      HeroInfo info{h.at("name").get<std::string>(), h.at("gender").get<std::string>(),
                    h.at("primary_attr").get<std::string>(), h.at("role").get<std::string>()};
      if (!r.heroes.emplace(h.at("id").get<int>(), info).second) {
        fail(ErrorCode::kConfig, "hero id listed twice in heroes.json");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("malformed data table: ") + e.what());
  }
  r.version = hex64(fnv1a64(digest));
  return r;
}

}  // namespace aia::features
