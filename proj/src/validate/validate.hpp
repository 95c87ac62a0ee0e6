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

// Two-sample t-tests over reported summary statistics and the per-family
// reject ledger built from them.

#include <string>
#include <string_view>
#include <vector>

#include "eval/protocols.hpp"
#include "json.hpp"

namespace aia::validate {

using Json = nlohmann::json;

struct SummaryStat {
  std::string label;
  double mean = 0.0;
  double std = 0.0;
  int n = 0;
};

enum class Variance { kPooled, kWelch };

struct HypothesisResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool rejected = false;
  // Both standard deviations are zero; p is 1 for equal means, else 0.
  bool degenerate = false;
};

// Pooled-variance Student t by default, two-sided. Throws kInvalidArgument
// when either n < 2 or a std is negative.
HypothesisResult two_sample_ttest(const SummaryStat& a, const SummaryStat& b, double alpha = 0.05,
                                  Variance variance = Variance::kPooled);

struct StatPair {
  std::string family;
  std::string attribute;
  SummaryStat a;
  SummaryStat b;
};

struct LedgerRow {
  StatPair pair;
  HypothesisResult pooled;
  HypothesisResult welch;
};

struct FamilyTally {
  std::string family;
  size_t rejected = 0;
  size_t total = 0;
  double max_p = 0.0;
  size_t welch_rejected = 0;
};

struct HypothesisLedger {
  double alpha = 0.05;
  std::vector<LedgerRow> rows;
  std::vector<FamilyTally> families;

  const FamilyTally* family(std::string_view name) const;
  std::string to_csv() const;
  std::string summary_csv() const;
  Json to_json() const;
};

// Family names in ledger order.
inline constexpr std::string_view kDummyVsBest = "dummy_vs_best";
inline constexpr std::string_view kDummyVsNaive = "dummy_vs_naive";
inline constexpr std::string_view kDummyVsExpert = "dummy_vs_expert";
inline constexpr std::string_view kSophVsIndisc = "sophisticated_vs_indiscriminate";

HypothesisLedger hypothesis_table(const std::vector<StatPair>& pairs, double alpha = 0.05);

// CSV columns: family,attribute,label_a,mean_a,std_a,n_a,label_b,mean_b,std_b,n_b
std::vector<StatPair> read_pairs_csv(std::string_view text);
std::string write_pairs_csv(const std::vector<StatPair>& pairs);

// Pairs from a published-tables file (see data/published_tables.json). Means are
// percentages there; the tests are scale-free so they are used as is.
std::vector<StatPair> pairs_from_tables(const Json& tables);

// Pairs from attack reports produced by this tool. Any report may be null;
// throws kMissingPair when a family cannot be resolved for an attribute the
// report covers.
std::vector<StatPair> pairs_from_reports(const eval::AttackReport* simple,
                                         const eval::AttackReport* one_match,
                                         const eval::AttackReport* indiscriminate);

}  // namespace aia::validate
