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

// OpenDota client with an on-disk cache and a token-bucket rate limiter.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

#include "ingest/records.hpp"

namespace aia::ingest {

struct HttpResponse {
  int status = 0;
  std::string body;
  // Seconds from a Retry-After header, negative when absent.
  double retry_after_s = -1.0;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // `target` is the path plus query relative to the configured base URL.
  virtual HttpResponse get(const std::string& target) = 0;
};

// Plain HTTP(S) transport. `base_url` may carry a path prefix, e.g.
// https://api.opendota.com/api.
std::unique_ptr<Transport> make_http_transport(const std::string& base_url, double timeout_s);

struct ClientConfig {
  std::string base_url = "https://api.opendota.com/api";
  std::filesystem::path cache_dir = "cache";
  double requests_per_second = 1.0;
  int max_retries = 5;
  double backoff_base_s = 1.0;
  double timeout_s = 30.0;
  bool offline = false;
};

using SleepFn = std::function<void(double seconds)>;
using ClockFn = std::function<double()>;

class TokenBucket {
 public:
  TokenBucket(double rate_per_s, SleepFn sleep, ClockFn clock);
  // Blocks (through the sleep hook) until a request may be issued.
  void acquire();

 private:
  double interval_s_;
  double next_free_ = 0.0;
  bool primed_ = false;
  SleepFn sleep_;
  ClockFn clock_;
  std::mutex mu_;
};

struct ClientStats {
  size_t requests = 0;
  size_t cache_hits = 0;
  size_t retries = 0;
  double slept_s = 0.0;
};

class OpenDotaClient {
 public:
  // A null transport builds the HTTP one lazily; null hooks use the real
  // clock and sleep.
  explicit OpenDotaClient(ClientConfig config, std::unique_ptr<Transport> transport = nullptr,
                          SleepFn sleep = nullptr, ClockFn clock = nullptr);

  // Throws kNotFound for hidden handles, kRateLimited once retries run out,
  // kSchema for unparseable payloads and kIo on an offline cache miss.
  PlayerRecord fetch_player(uint64_t handle, int window_days);
  MatchRecord fetch_match(int64_t match_id, ParseDiagnostics* diagnostics = nullptr);

  ClientStats stats() const;

  static std::filesystem::path player_profile_path(const std::filesystem::path& cache,
                                                   uint64_t handle);
  static std::filesystem::path player_matches_path(const std::filesystem::path& cache,
                                                   uint64_t handle, int window_days);
  static std::filesystem::path match_path(const std::filesystem::path& cache, int64_t match_id);

 private:
  HttpResponse request(const std::string& target);

  ClientConfig config_;
  std::unique_ptr<Transport> transport_;
  SleepFn sleep_;
  TokenBucket bucket_;
  mutable std::mutex stats_mu_;
  std::mutex request_mu_;
  ClientStats stats_;
};

}  // namespace aia::ingest
