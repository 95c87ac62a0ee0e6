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
#include "ingest/filter.hpp"

#include <algorithm>
#include <map>

namespace aia::ingest {

std::string_view filter_reason_name(FilterReason r) {
  switch (r) {
    case FilterReason::kRetained: return "retained";
    case FilterReason::kInvalidLabels: return "invalid_labels";
    case FilterReason::kNotVisible: return "not_visible";
    case FilterReason::kInactive: return "inactive";
    case FilterReason::kDuplicate: return "duplicate";
  }
  return "retained";
}

FilterResult filter_players(std::vector<Candidate> candidates, size_t min_matches) {
  FilterResult out;
  out.report.input = candidates.size();
  std::map<uint64_t, size_t> multiplicity;
  for (const auto& c : candidates) ++multiplicity[c.handle];
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.handle < b.handle; });

  for (auto& c : candidates) {
    FilterReason reason = FilterReason::kRetained;
    if (multiplicity[c.handle] > 1) {
      reason = FilterReason::kDuplicate;
      ++out.report.duplicates;
    } else if (!c.labels || c.labels->handle != c.handle) {
      reason = FilterReason::kInvalidLabels;
      ++out.report.invalid_labels;
    } else if (!c.record || c.record->match_ids.empty()) {
      reason = FilterReason::kNotVisible;
      ++out.report.not_visible;
    } else if (c.record->match_ids.size() < min_matches) {
      reason = FilterReason::kInactive;
      ++out.report.inactive;
    } else {
      ++out.report.retained;
      out.retained.emplace_back(std::move(*c.record), *c.labels);
    }
    out.decisions.emplace_back(c.handle, reason);
  }
  return out;
}

}  // namespace aia::ingest
