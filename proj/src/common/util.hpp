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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aia {

inline constexpr const char* kToolVersion = "1.0.0";

// FNV-1a, 64 bit. Used for config and schema fingerprints, not security.
uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(uint64_t v);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// Strict parse; throws Error(kInvalidArgument) on junk.
double parse_double(std::string_view s);
int64_t parse_int(std::string_view s);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

double mean(std::span<const double> v);
// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> v);

// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index must write
// only to its own output slot. The first exception thrown is rethrown.
void parallel_for(size_t n, unsigned jobs, const std::function<void(size_t)>& body);

unsigned default_jobs();

}  // namespace aia
