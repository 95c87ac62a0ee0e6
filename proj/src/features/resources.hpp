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

// Editable data tables used by feature extraction: chat lexicons, the
// chat-wheel phrase categories and hero metadata.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace aia::features {

struct Lexicon {
  std::string category;
  std::set<std::string> words;
};

// The five categories reported as chat features, in column order.
const std::vector<std::string>& lexicon_categories();

// Reads <dir>/<category>.txt for every category: one lowercase token per
// line, '#' starts a comment. Throws kConfig on empty lists or duplicates.
std::vector<Lexicon> load_lexicons(const std::filesystem::path& dir);

// Wheel phrase categories, in column order.
const std::vector<std::string>& wheel_categories();

struct HeroInfo {
  std::string name;
  std::string gender;  // female | male | none
  std::string primary_attr;  // str | agi | int | all
  std::string role;  // carry | support | ...
};

struct Resources {
  std::vector<Lexicon> lexicons;
  // wheel phrase id -> category; ids not listed count toward totals only.
  std::map<std::string, std::string> wheel;
  std::map<int, HeroInfo> heroes;
  std::string version;  // hash of the loaded tables

  // "unknown" fields for hero ids missing from the table.
  HeroInfo hero(int hero_id) const;
};

std::filesystem::path default_data_dir();
Resources load_resources(const std::filesystem::path& data_dir);

}  // namespace aia::features
