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
#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "common/error.hpp"
#include "common/util.hpp"
#include "features/build.hpp"
#include "features/chat.hpp"
#include "features/matrix.hpp"
#include "features/resources.hpp"
#include "ingest/records.hpp"
#include "synth/synth.hpp"

namespace aia::features {
namespace {

namespace fs = std::filesystem;

const Resources& resources() {
  static const Resources r = load_resources(default_data_dir());
  return r;
}

ingest::MatchRecord chat_fixture() {
  return ingest::parse_match(read_file(fs::path(AIA_GOLDEN_DIR).parent_path() / "fixtures" / "match_chat.json"));
}

double num(const FeatureRow& r, const std::string& name) {
  for (size_t i = 0; i < r.columns.size(); ++i) {
    if (r.columns[i].name == name) return std::get<double>(r.cells[i]);
  }
  ADD_FAILURE() << "no column " << name;
  return 0.0;
}

size_t lex(const std::string& category) {
  const auto& c = lexicon_categories();
  return static_cast<size_t>(std::find(c.begin(), c.end(), category) - c.begin());
}

size_t wheel(const std::string& category) {
  const auto& c = wheel_categories();
  return static_cast<size_t>(std::find(c.begin(), c.end(), category) - c.begin());
}

TEST(Chat, Tokenizer) {
  EXPECT_EQ(tokenize("Don't GG, wp!!"), (std::vector<std::string>{"don't", "gg", "wp"}));
  EXPECT_TRUE(tokenize("?!.").empty());
}

TEST(Chat, HandTallyOnFixture) {
  // Slot 0 says "gg noob lol" at 12 s, "???" at 300 s and "EZ mid!" at 305 s;
  // it scored first blood at 300 s. Wheel: "5" (team), "0" (global), one
  // hero line (global), one unlisted phrase (team), plus a sound and a spray.
  const auto f = extract_chat_features(chat_fixture(), 0, resources());
  EXPECT_EQ(f.typed_msgs, 3);
  EXPECT_EQ(f.lexicon[lex("laugh")], 1);          // lol
  EXPECT_EQ(f.lexicon[lex("slang")], 3);          // gg, ez, mid
  EXPECT_EQ(f.lexicon[lex("bad_behavior")], 1);   // noob
  EXPECT_EQ(f.lexicon[lex("good_behavior")], 0);
  EXPECT_EQ(f.lexicon[lex("provocative")], 2);    // noob, ez
  EXPECT_EQ(f.question_only_msgs, 1);
  EXPECT_EQ(f.question_marks, 3);
  EXPECT_EQ(f.exclamation_marks, 1);
  EXPECT_EQ(f.capital_letters, 2);
  EXPECT_EQ(f.early_game_msgs, 1);
  EXPECT_EQ(f.after_kill_msgs, 2);
  EXPECT_EQ(f.wheel_team[wheel("good_behavior")], 1);
  EXPECT_EQ(f.wheel_global[wheel("tactical")], 1);
  EXPECT_EQ(f.wheel_team_total, 2);
  EXPECT_EQ(f.wheel_global_total, 2);
  EXPECT_EQ(f.hero_wheel_msgs, 1);
  EXPECT_EQ(f.sound_count, 1);
  EXPECT_EQ(f.spray_count, 1);

  const auto other = extract_chat_features(chat_fixture(), 5, resources());
  EXPECT_EQ(other.typed_msgs, 1);
  EXPECT_EQ(other.lexicon[lex("good_behavior")], 1);  // thanks
  EXPECT_EQ(other.lexicon[lex("slang")], 1);          // wp
  try {
    extract_chat_features(chat_fixture(), 10, resources());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSlotNotFound);
  }
}

TEST(MatchFeatures, FixtureRow) {
  const auto m = chat_fixture();
  const auto r = build_match_features(m, 0, resources());
  EXPECT_EQ(num(r, "win"), 1.0);
  EXPECT_EQ(num(r, "kills"), 0.0);
  EXPECT_EQ(num(r, "deaths"), 10.0);
  EXPECT_EQ(num(r, "cosmetics_price"), 12.5);
  EXPECT_EQ(num(r, "cosmetics_count"), 1.0);
  EXPECT_EQ(num(r, "duration_min"), 40.0);
  EXPECT_EQ(num(r, "chat_lex_slang"), 3.0);
  const auto dire = build_match_features(m, 5, resources());
  EXPECT_EQ(num(dire, "win"), 0.0);
  EXPECT_EQ(num(dire, "cosmetics_price"), 3.0);
  // Same columns for every slot.
  EXPECT_EQ(r.columns, dire.columns);
  const auto aug = build_augmentation(m, 0, resources());
  for (const auto& c : aug.columns) EXPECT_TRUE(c.augmented) << c.name;
}

TEST(Calendar, WeekdayAndHour) {
  EXPECT_EQ(weekday_of(0), 3);  // 1970-01-01 was a Thursday
  EXPECT_EQ(weekday_of(1767225600), 3);  // 2026-01-01
  EXPECT_EQ(hour_of(1767225600 + 5 * 3600 + 59), 5);
  EXPECT_EQ(weekday_of(-1), 2);
}

FeatureMatrix small_matrix() {
  FeatureMatrix m;
  m.variant = Variant::kM;
  for (int i = 0; i < 4; ++i) {
    FeatureRow r;
    r.num("x", i * 0.1);
    r.flag("b", i % 2 == 0);
    r.cat("hero", i % 2 ? "Lina" : "Axe");
    r.num("aug", 1.0 / 3.0 * i, true);
    m.append(r, 10 + i / 2, 100 + i);
  }
  m.config_hash = "abc";
  m.variant_seed = 77;
  return m;
}

TEST(Matrix, CsvRoundTripWithSchema) {
  const auto m = small_matrix();
  const auto back = from_csv(to_csv(m), schema_json(m));
  EXPECT_EQ(back.columns, m.columns);
  EXPECT_EQ(back.numeric, m.numeric);
  EXPECT_EQ(back.categorical, m.categorical);
  EXPECT_EQ(back.row_owner, m.row_owner);
  EXPECT_EQ(back.row_match, m.row_match);
  EXPECT_EQ(back.variant_seed, m.variant_seed);
  EXPECT_EQ(back.config_hash, "abc");
  EXPECT_EQ(back.schema_hash(), m.schema_hash());
  EXPECT_EQ(to_csv(back), to_csv(m));

  const auto dir = fs::temp_directory_path() / "aia_matrix_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  save_matrix(m, (dir / "M.csv").string());
  EXPECT_TRUE(fs::exists(dir / "M.schema.json"));
  EXPECT_EQ(to_csv(load_matrix((dir / "M.csv").string())), to_csv(m));
  fs::remove_all(dir);
}

TEST(Matrix, RejectsMismatchedSchema) {
  const auto m = small_matrix();
  auto other = small_matrix();
  other.columns[0].name = "renamed";
  try {
    from_csv(to_csv(m), schema_json(other));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchema);
  }
  FeatureRow wrong;
  wrong.num("y", 1.0);
  auto copy = small_matrix();
  EXPECT_THROW(copy.append(wrong, 1), Error);
}

TEST(Matrix, SelectAndConcat) {
  const auto m = small_matrix();
  const auto rows = m.select_rows({3, 1});
  EXPECT_EQ(rows.row_match, (std::vector<int64_t>{103, 101}));
  const auto cols = m.select_columns({2});
  EXPECT_EQ(cols.cols(), 1u);
  EXPECT_EQ(cols.columns[0].name, "hero");
  const auto joined = FeatureMatrix::hconcat(m.select_columns({0}), m.select_columns({3}));
  EXPECT_EQ(joined.cols(), 2u);
  EXPECT_EQ(joined.numeric[1], m.numeric[3]);
}

class FixtureCorpus : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    auto cfg = synth::regression_fixture_config();
    cfg.n_players = 20;
    pop_ = new synth::Population(synth::generate_population(cfg, resources()));
    corpus_ = new Corpus(synth::to_corpus(*pop_));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    delete pop_;
  }
  static synth::Population* pop_;
  static Corpus* corpus_;
};

synth::Population* FixtureCorpus::pop_ = nullptr;
Corpus* FixtureCorpus::corpus_ = nullptr;

TEST_F(FixtureCorpus, TablesIndependentOfJobs) {
  FeatureConfig cfg;
  const auto a = build_match_tables(*corpus_, resources(), cfg, 1);
  const auto b = build_match_tables(*corpus_, resources(), cfg, 4);
  EXPECT_EQ(to_csv(a.m), to_csv(b.m));
  EXPECT_EQ(to_csv(a.augmentation), to_csv(b.augmentation));
  EXPECT_EQ(to_csv(build_player_matrix(*corpus_, resources(), cfg, 1)),
            to_csv(build_player_matrix(*corpus_, resources(), cfg, 3)));
  // Rows sorted by owner, then match id.
  for (size_t i = 1; i < a.m.rows(); ++i) {
    const auto prev = std::make_pair(a.m.row_owner[i - 1], a.m.row_match[i - 1]);
    const auto cur = std::make_pair(a.m.row_owner[i], a.m.row_match[i]);
    EXPECT_LT(prev, cur);
  }
  EXPECT_EQ(a.m.rows(), a.augmentation.rows());
}

TEST_F(FixtureCorpus, DistilledVariants) {
  FeatureConfig cfg;
  const auto t = build_match_tables(*corpus_, resources(), cfg);
  const auto variants = build_distilled(t.m, t.augmentation, 12, 4, 9);
  ASSERT_EQ(variants.size(), 4u);
  std::set<std::pair<uint64_t, int64_t>> all_rows;
  for (size_t i = 0; i < t.m.rows(); ++i) all_rows.insert({t.m.row_owner[i], t.m.row_match[i]});
  std::map<uint64_t, size_t> available;
  for (uint64_t o : t.m.row_owner) ++available[o];
  for (const auto& v : variants) {
    EXPECT_EQ(v.cols(), t.m.cols() + t.augmentation.cols());
    std::map<uint64_t, size_t> per_owner;
    for (size_t i = 0; i < v.rows(); ++i) {
      ++per_owner[v.row_owner[i]];
      EXPECT_TRUE(all_rows.count({v.row_owner[i], v.row_match[i]})) << "row not in M";
    }
    for (const auto& [owner, n] : available) EXPECT_EQ(per_owner[owner], std::min<size_t>(n, 12));
    size_t augmented = 0;
    for (const auto& c : v.columns) augmented += c.augmented;
    EXPECT_EQ(augmented, t.augmentation.cols());
  }
  EXPECT_NE(to_csv(variants[0]), to_csv(variants[1]));
  EXPECT_EQ(to_csv(build_distilled(t.m, t.augmentation, 12, 4, 9)[2]), to_csv(variants[2]));
}

TEST_F(FixtureCorpus, PlayerFeaturesNeedEnoughMatches) {
  const auto& [player, labels] = corpus_->players.front();
  std::vector<ingest::MatchRecord> ms;
  for (int64_t id : player.match_ids) ms.push_back(corpus_->matches.at(id));
  const auto row = build_player_features(player, ms, resources());
  EXPECT_FALSE(row.columns.empty());
  ms.resize(4);
  try {
    build_player_features(player, ms, resources());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientMatches);
  }
}

TEST(Resources, LexiconsLoad) {
  const auto& r = resources();
  EXPECT_EQ(r.lexicons.size(), lexicon_categories().size());
  for (const auto& l : r.lexicons) EXPECT_FALSE(l.words.empty()) << l.category;
  EXPECT_EQ(r.hero(99999).role, "unknown");
  EXPECT_EQ(r.hero(1).name, "Anti-Mage");
  EXPECT_EQ(load_resources(default_data_dir()).version, r.version);
}

}  // namespace
}  // namespace aia::features
