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
#include "ingest/client.hpp"

#include <chrono>
#include <cmath>
#include <regex>
#include <thread>

#include "common/error.hpp"
#include "common/util.hpp"
#include "httplib.h"

namespace aia::ingest {
namespace {

double steady_now() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void real_sleep(double s) {
  if (s > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(s));
}

class HttpTransport : public Transport {
 public:
  HttpTransport(const std::string& base_url, double timeout_s) {
    static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(base_url, m, kUrl)) {
      fail(ErrorCode::kConfig, "base URL must look like http(s)://host[:port][/prefix]: " + base_url);
    }
    origin_ = m[1].str();
    prefix_ = m[2].matched ? m[2].str() : "";
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    timeout_s_ = timeout_s;
  }

  HttpResponse get(const std::string& target) override {
    httplib::Client client(origin_);
    const auto secs = static_cast<time_t>(timeout_s_);
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_follow_location(true);
    auto res = client.Get(prefix_ + target);
    if (!res) {
      fail(ErrorCode::kIo, "request to " + origin_ + prefix_ + target +
                               " failed: " + httplib::to_string(res.error()));
    }
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    if (res->has_header("Retry-After")) {
      try {
        out.retry_after_s = parse_double(res->get_header_value("Retry-After"));
      } catch (const Error&) {
        // HTTP-date form; fall back to the backoff schedule.
      }
    }
    return out;
  }

 private:
  std::string origin_;
  std::string prefix_;
  double timeout_s_ = 30.0;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const std::string& base_url, double timeout_s) {
  return std::make_unique<HttpTransport>(base_url, timeout_s);
}

TokenBucket::TokenBucket(double rate_per_s, SleepFn sleep, ClockFn clock)
    : interval_s_(rate_per_s > 0.0 ? 1.0 / rate_per_s : 0.0),
      sleep_(std::move(sleep)),
      clock_(std::move(clock)) {}

void TokenBucket::acquire() {
  std::lock_guard lock(mu_);
  const double now = clock_();
  if (primed_ && now < next_free_) {
    sleep_(next_free_ - now);
    next_free_ += interval_s_;
  } else {
    next_free_ = now + interval_s_;
  }
  primed_ = true;
}

OpenDotaClient::OpenDotaClient(ClientConfig config, std::unique_ptr<Transport> transport,
                               SleepFn sleep, ClockFn clock)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      sleep_(sleep ? std::move(sleep) : SleepFn(real_sleep)),
      bucket_(config_.requests_per_second, sleep_, clock ? std::move(clock) : ClockFn(steady_now)) {
  if (config_.requests_per_second <= 0.0) {
    fail(ErrorCode::kConfig, "requests_per_second must be positive");
  }
}

std::filesystem::path OpenDotaClient::player_profile_path(const std::filesystem::path& cache,
                                                          uint64_t handle) {
  return cache / "players" / (std::to_string(handle) + ".json");
}

std::filesystem::path OpenDotaClient::player_matches_path(const std::filesystem::path& cache,
                                                          uint64_t handle, int window_days) {
  return cache / "players" /
         (std::to_string(handle) + ".matches." + std::to_string(window_days) + "d.json");
}

std::filesystem::path OpenDotaClient::match_path(const std::filesystem::path& cache,
                                                 int64_t match_id) {
  return cache / "matches" / (std::to_string(match_id) + ".json");
}

ClientStats OpenDotaClient::stats() const {
  std::lock_guard lock(stats_mu_);
  return stats_;
}

HttpResponse OpenDotaClient::request(const std::string& target) {
  if (config_.offline) fail(ErrorCode::kIo, "offline mode and " + target + " is not cached");
  // One logical session: requests are serialized, the bucket spaces them out.
  std::lock_guard lock(request_mu_);
  if (!transport_) transport_ = make_http_transport(config_.base_url, config_.timeout_s);
  double last_retry_after = 0.0;
  for (int attempt = 0;; ++attempt) {
    bucket_.acquire();
    HttpResponse res = transport_->get(target);
    {
      std::lock_guard s(stats_mu_);
      ++stats_.requests;
    }
    if (res.status != 429) return res;
    last_retry_after = res.retry_after_s;
    if (attempt >= config_.max_retries) break;
    const double backoff = config_.backoff_base_s * std::ldexp(1.0, attempt);
    const double wait = std::max(backoff, res.retry_after_s);
    {
      std::lock_guard s(stats_mu_);
      ++stats_.retries;
      stats_.slept_s += wait;
    }
    sleep_(wait);
  }
  throw RateLimitedError("rate limited on " + target + " after " +
                             std::to_string(config_.max_retries) + " retries",
                         last_retry_after);
}

PlayerRecord OpenDotaClient::fetch_player(uint64_t handle, int window_days) {
  if (handle == 0) fail(ErrorCode::kInvalidArgument, "player handle must be nonzero");
  if (window_days <= 0) fail(ErrorCode::kInvalidArgument, "window_days must be positive");
  const auto profile_path = player_profile_path(config_.cache_dir, handle);
  const auto matches_path = player_matches_path(config_.cache_dir, handle, window_days);
  const std::string id = std::to_string(handle);

  std::string profile;
  if (std::filesystem::exists(profile_path)) {
    profile = read_file(profile_path);
    std::lock_guard s(stats_mu_);
    ++stats_.cache_hits;
  } else {
    HttpResponse res = request("/players/" + id);
    if (res.status == 404) {
      // Negative results are cached too so offline reruns agree.
      profile = R"({"profile":null})";
    } else if (res.status != 200) {
      fail(ErrorCode::kIo, "GET /players/" + id + " returned HTTP " + std::to_string(res.status));
    } else {
      profile = res.body;
    }
    if (Json::parse(profile, nullptr, false).is_discarded()) {
      fail(ErrorCode::kSchema, "$: player payload for " + id + " is not JSON");
    }
    write_file_atomic(profile_path, profile);
  }
  Json probe = Json::parse(profile, nullptr, false);
  if (probe.is_discarded() || !probe.is_object()) {
    fail(ErrorCode::kSchema, "$: player payload for " + id + " is not a JSON object");
  }
  if (!probe.contains("profile") || !probe["profile"].is_object()) {
    fail(ErrorCode::kNotFound, "no public profile for handle " + id);
  }

  std::string matches;
  if (std::filesystem::exists(matches_path)) {
    matches = read_file(matches_path);
    std::lock_guard s(stats_mu_);
    ++stats_.cache_hits;
  } else {
    const std::string target =
        "/players/" + id + "/matches?date=" + std::to_string(window_days);
    HttpResponse res = request(target);
    if (res.status == 404) fail(ErrorCode::kNotFound, "no match list for handle " + id);
    if (res.status != 200) {
      fail(ErrorCode::kIo, "GET " + target + " returned HTTP " + std::to_string(res.status));
    }
    matches = res.body;
    parse_player(handle, profile, matches);  // validate before caching
    write_file_atomic(matches_path, matches);
  }
  return parse_player(handle, profile, matches);
}

MatchRecord OpenDotaClient::fetch_match(int64_t match_id, ParseDiagnostics* diagnostics) {
  if (match_id <= 0) fail(ErrorCode::kInvalidArgument, "match id must be positive");
  const auto path = match_path(config_.cache_dir, match_id);
  if (std::filesystem::exists(path)) {
    {
      std::lock_guard s(stats_mu_);
      ++stats_.cache_hits;
    }
    return parse_match(read_file(path), diagnostics);
  }
  const std::string target = "/matches/" + std::to_string(match_id);
  HttpResponse res = request(target);
  if (res.status == 404) fail(ErrorCode::kNotFound, "match " + std::to_string(match_id) + " not found");
  if (res.status != 200) {
    fail(ErrorCode::kIo, "GET " + target + " returned HTTP " + std::to_string(res.status));
  }
  MatchRecord rec = parse_match(res.body, diagnostics);
  write_file_atomic(path, res.body);
  return rec;
}

}  // namespace aia::ingest
