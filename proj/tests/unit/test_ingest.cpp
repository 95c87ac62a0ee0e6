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

#include <algorithm>
#include <deque>
#include <filesystem>
#include <thread>

#include "attributes/attributes.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/util.hpp"
#include "features/resources.hpp"
#include "httplib.h"
#include "ingest/client.hpp"
#include "ingest/filter.hpp"
#include "ingest/records.hpp"
#include "synth/synth.hpp"

namespace aia::ingest {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = fs::path(AIA_GOLDEN_DIR).parent_path() / "fixtures";

std::string fixture(const std::string& name) { return read_file(kFixtures / name); }

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("aia_ingest_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(ParseMatch, FixtureWithTenPlayers) {
  ParseDiagnostics diag;
  const auto m = parse_match(fixture("match_chat.json"), &diag);
  EXPECT_EQ(m.match_id, 7000000001);
  EXPECT_EQ(m.duration_s, 2400);
  ASSERT_EQ(m.players.size(), 10u);
  EXPECT_EQ(m.players[0].handle, 111u);
  EXPECT_EQ(m.players[5].handle, 222u);
  EXPECT_FALSE(m.players[1].handle.has_value());  // anonymous account
  EXPECT_TRUE(m.players[0].is_radiant);
  EXPECT_FALSE(m.players[7].is_radiant);
  EXPECT_EQ(m.players[4].last_hits, 165);
  EXPECT_EQ(m.slot_of(222), 5u);
  EXPECT_FALSE(m.slot_of(999).has_value());
  EXPECT_EQ(m.chat.size(), 10u);
  EXPECT_EQ(m.chat[4].kind, ChatKind::kChatwheelGeneral);
  EXPECT_EQ(m.chat[4].channel, ChatChannel::kTeam);
  EXPECT_EQ(m.cosmetics.size(), 2u);
  EXPECT_DOUBLE_EQ(m.cosmetics[0].price, 12.5);
  EXPECT_FALSE(m.throw_value.has_value());
  EXPECT_EQ(m.comeback, 1200);
  EXPECT_EQ(m.radiant_gold_adv, (std::vector<double>{0, 150, -80.5, 1200}));
  // Unknown fields survive in the side channel and are counted.
  EXPECT_EQ(diag.unknown_fields, 2u);
  EXPECT_EQ(m.extra["mystery_field"]["a"], 1);
  EXPECT_EQ(m.players[3].extra["extra_stat"], 17);
}

TEST(ParseMatch, AbsentOptionalsDefault) {
  const auto m = parse_match(fixture("match_minimal.json"));
  EXPECT_TRUE(m.chat.empty());
  EXPECT_TRUE(m.cosmetics.empty());
  EXPECT_TRUE(m.objectives.empty());
  EXPECT_FALSE(m.skill.has_value());
  EXPECT_EQ(m.players.size(), 1u);
}

TEST(ParseMatch, SchemaErrorsNameThePath) {
  auto doc = Json::parse(fixture("match_chat.json"));
  auto broken = doc;
  broken["duration"] = -5;
  EXPECT_EQ(code_of([&] { match_from_json(broken); }), ErrorCode::kSchema);
  EXPECT_EQ(error_text([&] { match_from_json(broken); }).rfind("$.duration", 0), 0u);

  broken = doc;
  broken["players"][2]["kills"] = -1;
  EXPECT_EQ(error_text([&] { match_from_json(broken); }).rfind("$.players[2].kills", 0), 0u);

  broken = doc;
  broken["chat"][0]["channel"] = "team";  // typed team chat is never public
  EXPECT_EQ(error_text([&] { match_from_json(broken); }).rfind("$.chat[0].channel", 0), 0u);

  broken = doc;
  broken["players"][1]["account_id"] = 111;
  EXPECT_EQ(error_text([&] { match_from_json(broken); }).rfind("$.players[1].account_id", 0), 0u);

  broken = doc;
  broken.erase("match_id");
  EXPECT_EQ(error_text([&] { match_from_json(broken); }).rfind("$.match_id", 0), 0u);

  EXPECT_EQ(code_of([] { parse_match("{not json"); }), ErrorCode::kSchema);
}

TEST(ParseMatch, SerializeRoundTrip) {
  for (const char* name : {"match_chat.json", "match_minimal.json"}) {
    const auto m = parse_match(fixture(name));
    EXPECT_EQ(parse_match(serialize_match(m)), m) << name;
  }
  auto cfg = synth::regression_fixture_config();
  cfg.n_players = 6;
  const auto pop = synth::generate_population(cfg, features::load_resources(features::default_data_dir()));
  ASSERT_FALSE(pop.matches.empty());
  for (const auto& m : pop.matches) {
    const auto again = parse_match(serialize_match(m));
    ASSERT_EQ(again, m) << m.match_id;
  }
}

TEST(ParsePlayer, VisibilityAndDeduplication) {
  const std::string profile = R"({"profile": {"account_id": 111, "plus": true}, "rank_tier": 45})";
  const auto p = parse_player(111, profile, R"([{"match_id": 5}, {"match_id": 3}, {"match_id": 5}])");
  EXPECT_EQ(p.match_ids, (std::vector<int64_t>{5, 3}));
  EXPECT_TRUE(p.has_plus);
  EXPECT_EQ(p.rank_tier, 45);
  EXPECT_EQ(parse_player(111, serialize_player_profile(p), serialize_player_matches(p)), p);
  EXPECT_EQ(code_of([] { parse_player(111, R"({"profile": null})", "[]"); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { parse_player(112, profile, "[]"); }), ErrorCode::kSchema);
  EXPECT_EQ(code_of([&] { parse_player(111, profile, R"([{"match_id": -1}])"); }), ErrorCode::kSchema);
}

Candidate candidate(uint64_t handle, size_t matches, bool labels = true, bool visible = true) {
  Candidate c;
  c.handle = handle;
  if (visible) {
    PlayerRecord r;
    r.handle = handle;
    for (size_t i = 0; i < matches; ++i) r.match_ids.push_back(static_cast<int64_t>(handle * 100 + i));
    c.record = r;
  }
  if (labels) {
    attributes::AttributeLabels l;
    l.handle = handle;
    c.labels = l;
  }
  return c;
}

TEST(Filter, CategoriesAndBoundary) {
  std::vector<Candidate> in = {candidate(1, 4), candidate(2, 5), candidate(3, 40, false),
                               candidate(4, 0, true, false), candidate(5, 0), candidate(6, 9),
                               candidate(6, 9)};
  const auto r = filter_players(in);
  EXPECT_EQ(r.report.input, 7u);
  EXPECT_EQ(r.report.inactive, 1u);
  EXPECT_EQ(r.report.invalid_labels, 1u);
  EXPECT_EQ(r.report.not_visible, 2u);  // not found, and an empty match list
  EXPECT_EQ(r.report.duplicates, 2u);
  ASSERT_EQ(r.retained.size(), 1u);
  EXPECT_EQ(r.retained[0].first.handle, 2u);
}

TEST(Filter, OrderIndependent) {
  std::vector<Candidate> in;
  for (uint64_t h = 1; h <= 40; ++h) in.push_back(candidate(h, h % 9, h % 7 != 0, h % 11 != 0));
  const auto base = filter_players(in);
  Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    rng.shuffle(in);
    const auto r = filter_players(in);
    ASSERT_EQ(r.retained.size(), base.retained.size());
    for (size_t i = 0; i < r.retained.size(); ++i) EXPECT_EQ(r.retained[i].first, base.retained[i].first);
    EXPECT_EQ(r.report.inactive, base.report.inactive);
  }
}

TEST(Filter, PlantedInactivePlayersAreCounted) {
  synth::SynthConfig cfg;
  cfg.n_players = 90;
  cfg.n_inactive = 10;
  cfg.max_matches = 20;
  FilterReport report;
  const auto pop = synth::generate_population(cfg, features::load_resources(features::default_data_dir()));
  const auto corpus = synth::to_corpus(pop, &report);
  EXPECT_EQ(report.input, 100u);
  EXPECT_EQ(report.inactive, 10u);
  EXPECT_EQ(corpus.players.size(), 90u);
}

// In-memory transport with scripted responses per target.
class ScriptedTransport : public Transport {
 public:
  std::map<std::string, std::deque<HttpResponse>> script;
  std::vector<std::string> log;

  HttpResponse get(const std::string& target) override {
    log.push_back(target);
    auto& q = script[target];
    if (q.empty()) return {404, "", -1.0};
    HttpResponse r = q.front();
    if (q.size() > 1) q.pop_front();
    return r;
  }
};

struct FakeTime {
  double now = 0.0;
  std::vector<double> sleeps;
  SleepFn sleep() {
    return [this](double s) {
      sleeps.push_back(s);
      now += s;
    };
  }
  ClockFn clock() {
    return [this] { return now; };
  }
};

TEST(TokenBucket, SpacesRequests) {
  FakeTime t;
  TokenBucket b(2.0, t.sleep(), t.clock());
  b.acquire();
  b.acquire();
  b.acquire();
  EXPECT_EQ(t.sleeps, (std::vector<double>{0.5, 0.5}));
  t.now += 10.0;
  b.acquire();
  EXPECT_EQ(t.sleeps.size(), 2u);
}

TEST(Client, RetriesOn429ThenCaches) {
  const auto dir = fresh_dir("retry");
  auto transport = std::make_unique<ScriptedTransport>();
  auto* raw = transport.get();
  const std::string body = fixture("match_chat.json");
  raw->script["/matches/7000000001"] = {{429, "", 3.0}, {429, "", -1.0}, {200, body, -1.0}};
  FakeTime t;
  ClientConfig cfg;
  cfg.cache_dir = dir;
  cfg.requests_per_second = 1000.0;
  OpenDotaClient client(cfg, std::move(transport), t.sleep(), t.clock());
  const auto m = client.fetch_match(7000000001);
  EXPECT_EQ(m.players.size(), 10u);
  const auto st = client.stats();
  EXPECT_EQ(st.requests, 3u);
  EXPECT_EQ(st.retries, 2u);
  // Retry-After (3 s) beats the first backoff step; the second uses 2^1 s.
  EXPECT_DOUBLE_EQ(st.slept_s, 3.0 + 2.0);
  // Cached bytes are exactly what the server sent.
  EXPECT_EQ(read_file(OpenDotaClient::match_path(dir, 7000000001)), body);
  client.fetch_match(7000000001);
  EXPECT_EQ(client.stats().requests, 3u);
  EXPECT_EQ(client.stats().cache_hits, 1u);
}

TEST(Client, GivesUpAfterMaxRetries) {
  auto transport = std::make_unique<ScriptedTransport>();
  transport->script["/matches/9"] = {{429, "", -1.0}};
  FakeTime t;
  ClientConfig cfg;
  cfg.cache_dir = fresh_dir("giveup");
  cfg.max_retries = 3;
  OpenDotaClient client(cfg, std::move(transport), t.sleep(), t.clock());
  try {
    client.fetch_match(9);
    FAIL();
  } catch (const RateLimitedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRateLimited);
  }
  EXPECT_EQ(client.stats().requests, 4u);
  EXPECT_FALSE(fs::exists(OpenDotaClient::match_path(cfg.cache_dir, 9)));
}

TEST(Client, NotFoundAndOffline) {
  const auto dir = fresh_dir("offline");
  auto transport = std::make_unique<ScriptedTransport>();
  transport->script["/players/5"] = {{404, "", -1.0}};
  transport->script["/players/6"] = {{200, R"({"profile": {"account_id": 6}})", -1.0}};
  transport->script["/players/6/matches?date=30"] = {{200, R"([{"match_id": 1}, {"match_id": 2}])", -1.0}};
  FakeTime t;
  ClientConfig cfg;
  cfg.cache_dir = dir;
  {
    OpenDotaClient client(cfg, std::move(transport), t.sleep(), t.clock());
    EXPECT_EQ(code_of([&] { client.fetch_player(5, 30); }), ErrorCode::kNotFound);
    EXPECT_EQ(client.fetch_player(6, 30).match_ids, (std::vector<int64_t>{1, 2}));
    EXPECT_EQ(code_of([&] { client.fetch_match(77); }), ErrorCode::kNotFound);
  }
  cfg.offline = true;
  OpenDotaClient offline(cfg);
  // The negative answer was cached, so offline reruns agree with online ones.
  EXPECT_EQ(code_of([&] { offline.fetch_player(5, 30); }), ErrorCode::kNotFound);
  EXPECT_EQ(offline.fetch_player(6, 30).match_ids, (std::vector<int64_t>{1, 2}));
  EXPECT_EQ(code_of([&] { offline.fetch_match(1); }), ErrorCode::kIo);
  EXPECT_EQ(offline.stats().requests, 0u);
}

TEST(Client, TalksHttpToALocalServer) {
  httplib::Server server;
  const std::string match = fixture("match_chat.json");
  server.Get("/api/players/111", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"profile": {"account_id": 111}, "rank_tier": 12})", "application/json");
  });
  server.Get("/api/players/111/matches", [](const httplib::Request& req, httplib::Response& res) {
    if (req.get_param_value("date") != "30") {
      res.status = 400;
      return;
    }
    res.set_content(R"([{"match_id": 7000000001}])", "application/json");
  });
  server.Get("/api/matches/7000000001", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(match, "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ClientConfig cfg;
  cfg.cache_dir = fresh_dir("http");
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/api";
  cfg.requests_per_second = 50.0;
  cfg.timeout_s = 5.0;
  OpenDotaClient client(cfg);
  const auto p = client.fetch_player(111, 30);
  ASSERT_EQ(p.match_ids.size(), 1u);
  const auto m = client.fetch_match(p.match_ids[0]);
  EXPECT_EQ(m.players.size(), 10u);
  EXPECT_EQ(read_file(OpenDotaClient::match_path(cfg.cache_dir, 7000000001)), match);
  EXPECT_TRUE(fs::exists(OpenDotaClient::player_profile_path(cfg.cache_dir, 111)));
  server.stop();
  th.join();
}

}  // namespace
}  // namespace aia::ingest
