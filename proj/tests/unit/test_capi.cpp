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
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "aia/aia.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

class Ctx {
 public:
  Ctx() { EXPECT_EQ(aia_context_create(&ctx_), AIA_OK); }
  ~Ctx() { aia_context_destroy(ctx_); }
  aia_context* get() { return ctx_; }
  Json result() const { return Json::parse(aia_last_result(ctx_)); }
  std::string error() const { return aia_last_error(ctx_); }

 private:
  aia_context* ctx_ = nullptr;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("aia_capi_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(aia_version(), "1.0.0");
  EXPECT_STREQ(aia_status_name(AIA_OK), "Ok");
  EXPECT_STREQ(aia_status_name(AIA_ERR_CONFIG), "ConfigError");
  EXPECT_STREQ(aia_status_name(AIA_ERR_INTERNAL), "InternalError");
}

TEST(CApi, ContextJobs) {
  Ctx c;
  EXPECT_GE(aia_context_jobs(c.get()), 1u);
  EXPECT_EQ(aia_context_set_jobs(c.get(), 3), AIA_OK);
  EXPECT_EQ(aia_context_jobs(c.get()), 3u);
  EXPECT_EQ(aia_context_create(nullptr), AIA_ERR_INVALID_ARGUMENT);
  aia_context_destroy(nullptr);
}

TEST(CApi, Statistics) {
  Ctx c;
  const double x[] = {1, 2, 3, 4, 5}, y[] = {2, 1, 4, 3, 5};
  double rho = 0, p = 0;
  ASSERT_EQ(aia_spearman(c.get(), x, y, 5, &rho, &p), AIA_OK);
  EXPECT_NEAR(rho, 0.8, 1e-15);
  EXPECT_GT(p, 0.0);
  EXPECT_EQ(aia_spearman(c.get(), x, nullptr, 5, &rho, &p), AIA_ERR_INVALID_ARGUMENT);
  EXPECT_FALSE(c.error().empty());

  const int64_t a[] = {0, 0, 1, 1}, b[] = {0, 0, 1, 0};
  double v = 0;
  ASSERT_EQ(aia_cramers_v(c.get(), a, b, 4, 0, &v, &p), AIA_OK);
  EXPECT_NEAR(v, 1.0 / std::sqrt(3.0), 1e-12);

  uint64_t n = 0;
  ASSERT_EQ(aia_required_sample_size(c.get(), 0.95, 0.05, 0.5, 7000000, &n), AIA_OK);
  EXPECT_GE(n, 384u);
  EXPECT_LE(n, 385u);
  EXPECT_EQ(aia_required_sample_size(c.get(), 1.5, 0.05, 0.5, 100, &n), AIA_ERR_DOMAIN);

  double t = 0, df = 0;
  ASSERT_EQ(aia_two_sample_ttest(c.get(), 60.1, 5.2, 10, 55.3, 4.1, 10, 0, &t, &df, &p), AIA_OK);
  EXPECT_NEAR(t, 2.292220744323497, 1e-12);
  EXPECT_NEAR(p, 0.034161479694897134, 1e-10);
  EXPECT_EQ(df, 18.0);

  const double probs[] = {0.9, 0.1, 0.8, 0.2, 0.2, 0.8, 0.8, 0.2};
  double avg[2];
  size_t predicted = 9;
  ASSERT_EQ(aia_average_probabilities(c.get(), probs, 4, 2, avg, &predicted), AIA_OK);
  EXPECT_NEAR(avg[1], 0.325, 1e-15);
  EXPECT_EQ(predicted, 0u);
  EXPECT_EQ(aia_average_probabilities(c.get(), probs, 0, 2, avg, &predicted), AIA_ERR_EMPTY_INPUT);
}

TEST(CApi, StageErrorsAreTyped) {
  Ctx c;
  EXPECT_EQ(aia_run_validate(c.get(), "{not json"), AIA_ERR_CONFIG);
  EXPECT_EQ(aia_run_validate(c.get(), R"({"pairs": "x.csv", "out": "y", "alhpa": 0.1})"), AIA_ERR_CONFIG);
  EXPECT_NE(c.error().find("alhpa"), std::string::npos);
  EXPECT_EQ(aia_run_validate(c.get(), R"({"pairs": "/nonexistent/pairs.csv", "out": "/tmp"})"), AIA_ERR_IO);
  EXPECT_EQ(aia_run_labels(c.get(), nullptr), AIA_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ReproduceTable8) {
  Ctx c;
  const auto out = scratch("table8");
  const Json opts = {{"tables", AIA_TABLES_PATH}, {"out", out.string()}};
  ASSERT_EQ(aia_reproduce_table8(c.get(), opts.dump().c_str()), AIA_OK) << c.error();
  const auto r = c.result();
  const std::map<std::string, std::pair<int, int>> want = {{"dummy_vs_best", {5, 9}},
                                                          {"dummy_vs_naive", {4, 9}},
                                                          {"dummy_vs_expert", {9, 9}},
                                                          {"sophisticated_vs_indiscriminate", {7, 7}}};
  for (const auto& f : r.at("families")) {
    const auto& w = want.at(f.at("family").get<std::string>());
    EXPECT_EQ(f.at("rejected").get<int>(), w.first);
    EXPECT_EQ(f.at("total").get<int>(), w.second);
  }
  EXPECT_TRUE(fs::exists(out / "ledger.csv"));
  fs::remove_all(out);
}

TEST(CApi, StagesMatricesAndModels) {
  Ctx c;
  const auto root = scratch("stages");
  const auto cache = root / "cache", labels = root / "labels.csv", feats = root / "features";
  ASSERT_EQ(aia_run_synth(c.get(), Json({{"fixture", true}, {"out", cache.string()}}).dump().c_str()), AIA_OK)
      << c.error();
  ASSERT_EQ(aia_run_labels(c.get(), Json({{"in", (cache / "survey.csv").string()}, {"out", labels.string()}})
                                        .dump()
                                        .c_str()),
            AIA_OK)
      << c.error();
  EXPECT_EQ(c.result().at("valid"), 50);
  const Json fopts = {{"cache", cache.string()}, {"labels", labels.string()}, {"out", feats.string()},
                      {"variants", {"P"}}};
  ASSERT_EQ(aia_run_featurize(c.get(), fopts.dump().c_str()), AIA_OK) << c.error();

  aia_matrix* m = nullptr;
  ASSERT_EQ(aia_matrix_load(c.get(), (feats / "P.csv").c_str(), &m), AIA_OK) << c.error();
  EXPECT_EQ(aia_matrix_rows(m), 50u);
  ASSERT_GT(aia_matrix_cols(m), 10u);
  EXPECT_NE(aia_matrix_column_name(m, 0), nullptr);
  EXPECT_EQ(aia_matrix_column_name(m, aia_matrix_cols(m)), nullptr);
  EXPECT_EQ(std::string(aia_matrix_schema_hash(m)).size(), 16u);

  aia_model* model = nullptr;
  const char* opts = R"({"algorithm": "decision_tree", "attribute": "age", "params": {"max_depth": 3}})";
  ASSERT_EQ(aia_model_train(c.get(), m, labels.c_str(), opts, &model), AIA_OK) << c.error();
  ASSERT_EQ(aia_model_classes(model), 3u);
  std::vector<double> probs(50 * 3);
  ASSERT_EQ(aia_model_predict_proba(c.get(), model, m, probs.data(), probs.size()), AIA_OK);
  for (size_t r = 0; r < 50; ++r) EXPECT_NEAR(probs[3 * r] + probs[3 * r + 1] + probs[3 * r + 2], 1.0, 1e-9);
  EXPECT_EQ(aia_model_predict_proba(c.get(), model, m, probs.data(), 10), AIA_ERR_LENGTH_MISMATCH);
  aia_model_destroy(model);

  EXPECT_EQ(aia_model_train(c.get(), m, labels.c_str(), R"({"algorithm": "svm", "attribute": "age"})", &model),
            AIA_ERR_INVALID_ARGUMENT);
  aia_matrix_destroy(m);
  EXPECT_EQ(aia_matrix_load(c.get(), (root / "missing.csv").c_str(), &m), AIA_ERR_IO);
  fs::remove_all(root);
}

}  // namespace
