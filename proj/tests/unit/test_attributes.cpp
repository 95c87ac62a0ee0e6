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

#include "attributes/attributes.hpp"
#include "common/error.hpp"

namespace aia::attributes {
namespace {

RawSurveyRow row(uint64_t handle, int age) {
  RawSurveyRow r;
  r.handle = handle;
  r.gender = "female";
  r.raw_age = age;
  r.employment = Employment::kStudent;
  r.purchase_frequency = 2;
  r.big5 = {10, 33, 34, 66, 67};
  r.country = "DE";
  return r;
}

TEST(Schema, NineAttributesWithClassLists) {
  EXPECT_EQ(all_attributes().size(), 9u);
  EXPECT_EQ(class_count(Attribute::kGender), 2u);
  EXPECT_EQ(class_count(Attribute::kOccupation), 2u);
  EXPECT_EQ(class_count(Attribute::kAge), 3u);
  EXPECT_EQ(class_count(Attribute::kNeuroticism), 3u);
  EXPECT_EQ(attribute_from_name("purchase_habits"), Attribute::kPurchaseHabits);
  EXPECT_FALSE(attribute_from_name("height").has_value());
  for (auto a : all_attributes()) {
    EXPECT_EQ(info(a).ordinal, class_count(a) == 3) << info(a).name;
  }
}

TEST(Binning, BoundariesAreInclusive) {
  EXPECT_EQ(trait_bin(33), 0);
  EXPECT_EQ(trait_bin(34), 1);
  EXPECT_EQ(trait_bin(66), 1);
  EXPECT_EQ(trait_bin(67), 2);
  EXPECT_EQ(age_bin(13), 0);
  EXPECT_EQ(age_bin(18), 0);
  EXPECT_EQ(age_bin(19), 1);
  EXPECT_EQ(age_bin(24), 1);
  EXPECT_EQ(age_bin(25), 2);
  EXPECT_EQ(age_bin(38), 2);
  try {
    age_bin(39);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
  EXPECT_THROW(age_bin(12), Error);
  BinningConfig c;
  c.low_max = 40;
  EXPECT_EQ(trait_bin(40, c), 0);
}

TEST(Binning, FullRow) {
  const auto l = bin_labels(row(5, 20));
  EXPECT_EQ(l.handle, 5u);
  EXPECT_EQ(l[Attribute::kAge], 1);
  EXPECT_EQ(info(Attribute::kGender).classes[l[Attribute::kGender]], "female");
  EXPECT_EQ(l[Attribute::kOpenness], 0);
  EXPECT_EQ(l[Attribute::kConscientiousness], 0);
  EXPECT_EQ(l[Attribute::kExtraversion], 1);
  EXPECT_EQ(l[Attribute::kAgreeableness], 1);
  EXPECT_EQ(l[Attribute::kNeuroticism], 2);
  auto bad = row(6, 20);
  bad.big5[2] = 101;
  EXPECT_THROW(bin_labels(bad), Error);
  bad = row(6, 20);
  bad.gender = "robot";
  EXPECT_THROW(bin_labels(bad), Error);
}

TEST(SurveyCsv, RoundTripAndRejections) {
  const std::vector<RawSurveyRow> rows = {row(1, 20), row(2, 30)};
  const auto text = write_survey_csv(rows);
  const auto back = read_survey_csv(text);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_TRUE(back.rejected.empty());
  EXPECT_EQ(back.rows[1].raw_age, 30);
  EXPECT_EQ(back.rows[0].big5, rows[0].big5);

  const auto broken = read_survey_csv(text + "3,male,abc,employed,1,1,2,3,4,5,US\n4,male\n");
  EXPECT_EQ(broken.rows.size(), 2u);
  ASSERT_EQ(broken.rejected.size(), 2u);
  EXPECT_EQ(broken.rejected[0].first, 4u);
}

TEST(LabelsCsv, RoundTrip) {
  std::vector<AttributeLabels> ls = {bin_labels(row(9, 15)), bin_labels(row(3, 37))};
  const auto back = read_labels_csv(write_labels_csv(ls));
  EXPECT_TRUE(back.rejected.empty());
  EXPECT_EQ(back.labels, ls);
  const auto idx = index_by_handle(back.labels);
  EXPECT_EQ(idx.at(3)[Attribute::kAge], 2);
  const auto junk = read_labels_csv(write_labels_csv(ls) + "7,alien,13-18,employed,never,low,low,low,low,low\n");
  EXPECT_EQ(junk.rejected.size(), 1u);
}

TEST(Distribution, Fractions) {
  std::vector<AttributeLabels> ls = {bin_labels(row(1, 15)), bin_labels(row(2, 15)), bin_labels(row(3, 30)),
                                     bin_labels(row(4, 20))};
  const auto d = class_distribution(ls);
  EXPECT_EQ(d[static_cast<size_t>(Attribute::kAge)], (std::vector<double>{0.5, 0.25, 0.25}));
  EXPECT_THROW(class_distribution({}), Error);
}

}  // namespace
}  // namespace aia::attributes
