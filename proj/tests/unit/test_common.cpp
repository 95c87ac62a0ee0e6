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

#include <atomic>
#include <filesystem>
#include <set>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/util.hpp"

namespace aia {
namespace {

TEST(Util, FormatDoubleRoundTrips) {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, 0.30000000000000004}) {
    EXPECT_EQ(parse_double(format_double(v)), v) << format_double(v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Util, StrictParsing) {
  EXPECT_EQ(parse_int("42"), 42);
  EXPECT_EQ(parse_int("-7"), -7);
  EXPECT_THROW(parse_int("4x"), Error);
  EXPECT_THROW(parse_int(""), Error);
  EXPECT_THROW(parse_double("1.5abc"), Error);
  EXPECT_DOUBLE_EQ(parse_double("1e-3"), 0.001);
}

TEST(Util, StringHelpers) {
  EXPECT_EQ(trim("  a b \t\n"), "a b");
  EXPECT_EQ(to_lower("GG Wp"), "gg wp");
  EXPECT_EQ(split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
}

TEST(Util, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Util, MeanAndSampleStd) {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_NEAR(stddev(v), std::sqrt(32.0 / 7.0), 1e-15);
  EXPECT_EQ(stddev(std::vector<double>{3.0}), 0.0);
}

TEST(Util, AtomicWriteReplacesContent) {
  const auto dir = std::filesystem::temp_directory_path() / "aia_util_test";
  std::filesystem::remove_all(dir);
  const auto p = dir / "sub" / "f.txt";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  EXPECT_EQ(read_file(p), "second");
  size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "sub")) files += e.is_regular_file();
  EXPECT_EQ(files, 1u);
  try {
    read_file(dir / "missing");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
  std::filesystem::remove_all(dir);
}

TEST(Util, ParallelForCoversEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](size_t i) {
                 if (i == 5) fail(ErrorCode::kInternal, "boom");
               }),
               Error);
}

TEST(Rng, SeededStreamsAreReproducible) {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
}

TEST(Rng, DistributionsLookRight) {
  Rng r(1);
  double s = 0, s2 = 0;
  const int n = 200000;
  std::vector<size_t> counts(3, 0);
  const std::vector<double> w = {0.2, 0.5, 0.3};
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    ++counts[r.categorical(w)];
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
  for (size_t c = 0; c < 3; ++c) EXPECT_NEAR(static_cast<double>(counts[c]) / n, w[c], 0.01);
}

TEST(Rng, SampleWithoutReplacementIsDistinct) {
  Rng r(4);
  const auto idx = r.sample_without_replacement(50, 20);
  EXPECT_EQ(idx.size(), 20u);
  EXPECT_EQ(std::set<size_t>(idx.begin(), idx.end()).size(), 20u);
  for (size_t i : idx) EXPECT_LT(i, 50u);
  EXPECT_EQ(r.sample_without_replacement(3, 10).size(), 3u);
}

}  // namespace
}  // namespace aia
