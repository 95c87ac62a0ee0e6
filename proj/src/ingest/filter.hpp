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
#include <optional>
#include <string>
#include <vector>

#include "attributes/attributes.hpp"
#include "ingest/records.hpp"

namespace aia::ingest {

// One surveyed player as seen by the filter. A missing record means the
// tracking site returned not-found; missing labels mean label validation
// failed.
struct Candidate {
  uint64_t handle = 0;
  std::optional<PlayerRecord> record;
  std::optional<attributes::AttributeLabels> labels;
};

enum class FilterReason { kRetained, kInvalidLabels, kNotVisible, kInactive, kDuplicate };

std::string_view filter_reason_name(FilterReason r);

struct FilterReport {
  size_t input = 0;
  size_t invalid_labels = 0;
  size_t not_visible = 0;
  size_t inactive = 0;
  size_t duplicates = 0;
  size_t retained = 0;
};

struct FilterResult {
  // Sorted by handle.
  std::vector<std::pair<PlayerRecord, attributes::AttributeLabels>> retained;
  std::vector<std::pair<uint64_t, FilterReason>> decisions;
  FilterReport report;
};

// Checks run in order: labels, visibility (not found or empty match list),
// activity (fewer than `min_matches`). Handles seen more than once are all
// dropped as duplicates. The result does not depend on input order.
FilterResult filter_players(std::vector<Candidate> candidates, size_t min_matches = 5);

}  // namespace aia::ingest
