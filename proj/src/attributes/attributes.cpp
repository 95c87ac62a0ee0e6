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
#include "attributes/attributes.hpp"

#include <sstream>

#include "common/error.hpp"
#include "common/util.hpp"

namespace aia::attributes {
namespace {

const std::vector<std::string> kTraitClasses = {"low", "medium", "high"};

const std::array<AttributeInfo, kAttributeCount>& table() {
  static const std::array<AttributeInfo, kAttributeCount> t = {{
      {"gender", {"female", "male"}, false},
      {"age", {"13-18", "19-24", "25-38"}, true},
      {"occupation", {"no", "yes"}, false},
      {"purchase_habits", {"never", "rarely", "regularly"}, true},
      {"openness", kTraitClasses, true},
      {"conscientiousness", kTraitClasses, true},
      {"extraversion", kTraitClasses, true},
      {"agreeableness", kTraitClasses, true},
      {"neuroticism", kTraitClasses, true},
  }};
  return t;
}

const char* kSurveyHeader =
    "handle,gender,age,employment,purchase_frequency,openness,conscientiousness,"
    "extraversion,agreeableness,neuroticism,country";

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Employment parse_employment(const std::string& raw) {
  const std::string v = to_lower(trim(raw));
  if (v == "yes" || v == "employed" || v == "1" || v == "true") return Employment::kEmployed;
  if (v == "no" || v == "unemployed" || v == "0" || v == "false") return Employment::kUnemployed;
  if (v == "student") return Employment::kStudent;
  fail(ErrorCode::kInvalidArgument, "unknown employment value '" + raw + "'");
}

const char* employment_name(Employment e) {
  switch (e) {
    case Employment::kEmployed: return "employed";
    case Employment::kUnemployed: return "unemployed";
    case Employment::kStudent: return "student";
  }
  return "unemployed";
}

}  // namespace

const AttributeInfo& info(Attribute a) { return table()[static_cast<size_t>(a)]; }

const std::array<Attribute, kAttributeCount>& all_attributes() {
  static const std::array<Attribute, kAttributeCount> all = {
      Attribute::kGender,        Attribute::kAge,          Attribute::kOccupation,
      Attribute::kPurchaseHabits, Attribute::kOpenness,    Attribute::kConscientiousness,
      Attribute::kExtraversion,  Attribute::kAgreeableness, Attribute::kNeuroticism};
  return all;
}

std::optional<Attribute> attribute_from_name(std::string_view name) {
  for (Attribute a : all_attributes()) {
    if (info(a).name == name) return a;
  }
  return std::nullopt;
}

size_t class_count(Attribute a) { return info(a).classes.size(); }

std::optional<uint8_t> class_from_name(Attribute a, std::string_view name) {
  const auto& classes = info(a).classes;
  for (size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == name) return static_cast<uint8_t>(i);
  }
  return std::nullopt;
}

uint8_t age_bin(int raw_age, const BinningConfig& config) {
  if (raw_age < config.min_age || raw_age > config.max_age) {
    fail(ErrorCode::kOutOfRange, "age " + std::to_string(raw_age) + " outside [" +
                                     std::to_string(config.min_age) + ", " +
                                     std::to_string(config.max_age) + "]");
  }
  if (raw_age <= 18) return 0;
  if (raw_age <= 24) return 1;
  return 2;
}

uint8_t trait_bin(int score, const BinningConfig& config) {
  if (score < 0 || score > 100) {
    fail(ErrorCode::kInvalidArgument, "personality score " + std::to_string(score) +
                                          " outside [0, 100]");
  }
  if (score <= config.low_max) return 0;
  if (score <= config.medium_max) return 1;
  return 2;
}

uint8_t purchase_bin(int frequency_code) {
  if (frequency_code < 0 || frequency_code > 3) {
    fail(ErrorCode::kInvalidArgument,
         "purchase frequency code " + std::to_string(frequency_code) + " outside [0, 3]");
  }
  if (frequency_code == 0) return 0;
  if (frequency_code == 1) return 1;
  return 2;
}

AttributeLabels bin_labels(const RawSurveyRow& row, const BinningConfig& config) {
  if (row.handle == 0) fail(ErrorCode::kInvalidArgument, "handle must be nonzero");
  if (config.low_max >= config.medium_max) {
    fail(ErrorCode::kConfig, "trait thresholds must satisfy low_max < medium_max");
  }
  AttributeLabels out;
  out.handle = row.handle;
  const auto gender = class_from_name(Attribute::kGender, to_lower(trim(row.gender)));
  if (!gender) fail(ErrorCode::kInvalidArgument, "unknown gender '" + row.gender + "'");
  out[Attribute::kGender] = *gender;
  out[Attribute::kAge] = age_bin(row.raw_age, config);
  // Students count as not employed.
  out[Attribute::kOccupation] = row.employment == Employment::kEmployed ? 1 : 0;
  out[Attribute::kPurchaseHabits] = purchase_bin(row.purchase_frequency);
  for (size_t t = 0; t < 5; ++t) {
    out.classes[static_cast<size_t>(Attribute::kOpenness) + t] = trait_bin(row.big5[t], config);
  }
  return out;
}

ClassDistribution class_distribution(const std::vector<AttributeLabels>& labels) {
  if (labels.empty()) fail(ErrorCode::kEmptyInput, "class_distribution of empty label list");
  ClassDistribution dist;
  for (Attribute a : all_attributes()) {
    auto& d = dist[static_cast<size_t>(a)];
    d.assign(class_count(a), 0.0);
    for (const auto& l : labels) d[l[a]] += 1.0;
    for (double& f : d) f /= static_cast<double>(labels.size());
  }
  return dist;
}

SurveyLoadResult read_survey_csv(const std::string& text) {
  SurveyLoadResult result;
  const auto lines = csv_lines(text);
  if (lines.empty() || trim(lines[0]) != kSurveyHeader) {
    fail(ErrorCode::kSchema, std::string("survey CSV header must be: ") + kSurveyHeader);
  }
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto cells = split(lines[i], ',');
    try {
      if (cells.size() != 11) {
        fail(ErrorCode::kSchema, "expected 11 columns, got " + std::to_string(cells.size()));
      }
      RawSurveyRow row;
      const int64_t handle = parse_int(cells[0]);
      if (handle <= 0) fail(ErrorCode::kInvalidArgument, "handle must be positive");
      row.handle = static_cast<uint64_t>(handle);
      row.gender = trim(cells[1]);
      row.raw_age = static_cast<int>(parse_int(cells[2]));
      row.employment = parse_employment(cells[3]);
      row.purchase_frequency = static_cast<int>(parse_int(cells[4]));
      for (size_t t = 0; t < 5; ++t) row.big5[t] = static_cast<int>(parse_int(cells[5 + t]));
      row.country = trim(cells[10]);
      result.rows.push_back(std::move(row));
    } catch (const Error& e) {
      result.rejected.emplace_back(i + 1, e.what());
    }
  }
  return result;
}

std::string write_survey_csv(const std::vector<RawSurveyRow>& rows) {
  std::string out = std::string(kSurveyHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.handle) + "," + r.gender + "," + std::to_string(r.raw_age) + "," +
           employment_name(r.employment) + "," + std::to_string(r.purchase_frequency);
    for (int s : r.big5) out += "," + std::to_string(s);
    out += "," + r.country + "\n";
  }
  return out;
}

std::string write_labels_csv(const std::vector<AttributeLabels>& labels) {
  std::string out = "handle";
  for (Attribute a : all_attributes()) out += "," + std::string(info(a).name);
  out += "\n";
  for (const auto& l : labels) {
    out += std::to_string(l.handle);
    for (Attribute a : all_attributes()) out += "," + info(a).classes[l[a]];
    out += "\n";
  }
  return out;
}

LabelLoadResult read_labels_csv(const std::string& text) {
  LabelLoadResult result;
  const auto lines = csv_lines(text);
  if (lines.empty()) fail(ErrorCode::kSchema, "label CSV is empty");
  const auto header = split(trim(lines[0]), ',');
  if (header.size() != kAttributeCount + 1 || header[0] != "handle") {
    fail(ErrorCode::kSchema, "label CSV header must be handle + 9 attribute columns");
  }
  std::array<Attribute, kAttributeCount> order{};
  for (size_t c = 0; c < kAttributeCount; ++c) {
    const auto a = attribute_from_name(header[c + 1]);
    if (!a) fail(ErrorCode::kSchema, "unknown attribute column '" + header[c + 1] + "'");
    order[c] = *a;
  }
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto cells = split(trim(lines[i]), ',');
    try {
      if (cells.size() != kAttributeCount + 1) {
        fail(ErrorCode::kSchema, "wrong column count");
      }
      AttributeLabels l;
      const int64_t handle = parse_int(cells[0]);
      if (handle <= 0) fail(ErrorCode::kInvalidArgument, "handle must be positive");
      l.handle = static_cast<uint64_t>(handle);
      for (size_t c = 0; c < kAttributeCount; ++c) {
        const auto cls = class_from_name(order[c], trim(cells[c + 1]));
        if (!cls) {
          fail(ErrorCode::kInvalidArgument, "unknown class '" + cells[c + 1] + "' for " +
                                                std::string(info(order[c]).name));
        }
        l[order[c]] = *cls;
      }
      result.labels.push_back(l);
    } catch (const Error& e) {
      result.rejected.emplace_back(i + 1, e.what());
    }
  }
  return result;
}

std::map<uint64_t, AttributeLabels> index_by_handle(const std::vector<AttributeLabels>& labels) {
  std::map<uint64_t, AttributeLabels> out;
  for (const auto& l : labels) out[l.handle] = l;
  return out;
}

}  // namespace aia::attributes
