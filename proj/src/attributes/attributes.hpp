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

// Private-attribute schema: the nine survey attributes, their class lists,
// binning of raw questionnaire answers, and the label file formats.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aia::attributes {

enum class Attribute : uint8_t {
  kGender = 0,
  kAge,
  kOccupation,
  kPurchaseHabits,
  kOpenness,
  kConscientiousness,
  kExtraversion,
  kAgreeableness,
  kNeuroticism,
};

inline constexpr size_t kAttributeCount = 9;

struct AttributeInfo {
  std::string_view name;
  std::vector<std::string> classes;
  // Ordinal attributes are coded 0/1/2 for rank correlation; binary ones are
  // scored with Cramer's V only.
  bool ordinal;
};

const AttributeInfo& info(Attribute a);
const std::array<Attribute, kAttributeCount>& all_attributes();
std::optional<Attribute> attribute_from_name(std::string_view name);
size_t class_count(Attribute a);
std::optional<uint8_t> class_from_name(Attribute a, std::string_view name);

struct AttributeLabels {
  uint64_t handle = 0;
  std::array<uint8_t, kAttributeCount> classes{};

  uint8_t operator[](Attribute a) const { return classes[static_cast<size_t>(a)]; }
  uint8_t& operator[](Attribute a) { return classes[static_cast<size_t>(a)]; }
  bool operator==(const AttributeLabels&) const = default;
};

enum class Employment { kEmployed, kUnemployed, kStudent };

// One questionnaire answer before binning.
struct RawSurveyRow {
  uint64_t handle = 0;
  std::string gender;  // "female" | "male"
  int raw_age = 0;
  Employment employment = Employment::kUnemployed;
  // 0 never, 1 less than once a month, 2 monthly, 3 weekly or more.
  int purchase_frequency = 0;
  // openness, conscientiousness, extraversion, agreeableness, neuroticism
  std::array<int, 5> big5{};
  std::string country;
};

struct BinningConfig {
  // score <= low_max -> low; score <= medium_max -> medium; else high.
  int low_max = 33;
  int medium_max = 66;
  int min_age = 13;
  int max_age = 38;
};

// Throws Error(kOutOfRange) for ages outside [min_age, max_age] and
// Error(kInvalidArgument) for other invariant violations.
AttributeLabels bin_labels(const RawSurveyRow& row, const BinningConfig& config = {});

uint8_t age_bin(int raw_age, const BinningConfig& config = {});
uint8_t trait_bin(int score, const BinningConfig& config = {});
uint8_t purchase_bin(int frequency_code);

// Per attribute, the fraction of labels in each class. Throws kEmptyInput.
using ClassDistribution = std::array<std::vector<double>, kAttributeCount>;
ClassDistribution class_distribution(const std::vector<AttributeLabels>& labels);

struct SurveyLoadResult {
  std::vector<RawSurveyRow> rows;
  // (1-based line number, reason) for rows rejected while parsing.
  std::vector<std::pair<size_t, std::string>> rejected;
};

// Survey CSV columns: handle,gender,age,employment,purchase_frequency,
// openness,conscientiousness,extraversion,agreeableness,neuroticism,country
SurveyLoadResult read_survey_csv(const std::string& text);
std::string write_survey_csv(const std::vector<RawSurveyRow>& rows);

struct LabelLoadResult {
  std::vector<AttributeLabels> labels;
  std::vector<std::pair<size_t, std::string>> rejected;
};

// Binned label CSV: handle followed by one class-name column per attribute.
std::string write_labels_csv(const std::vector<AttributeLabels>& labels);
LabelLoadResult read_labels_csv(const std::string& text);

std::map<uint64_t, AttributeLabels> index_by_handle(const std::vector<AttributeLabels>& labels);

}  // namespace aia::attributes
