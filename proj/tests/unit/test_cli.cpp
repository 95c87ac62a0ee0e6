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
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Run {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("aia_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Run aia(const std::string& args) {
  static const fs::path tmp = scratch("io");
  const auto out = tmp / "stdout", err = tmp / "stderr";
  const std::string cmd = std::string(AIA_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// Every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return files;
}

TEST(Cli, Version) {
  const auto r = aia("--version");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("1.0.0"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsageErrorWithoutArtifacts) {
  const auto dir = scratch("unknown");
  const auto out = dir / "ledger";
  const auto r = aia("reproduce-table8 --out " + out.string() + " --no-such-flag");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(aia("no-such-command").exit_code, 2);
  EXPECT_EQ(aia("").exit_code, 2);
  fs::remove_all(dir);
}

TEST(Cli, MissingConfigFileIsUsageError) {
  const auto r = aia("validate --config /nonexistent/cfg.json --pairs x --out /tmp/x");
  EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, DataErrorIsStructured) {
  const auto dir = scratch("data_error");
  const auto r = aia("validate --pairs " + (dir / "missing.csv").string() + " --out " + (dir / "o").string());
  EXPECT_EQ(r.exit_code, 1);
  const auto err = Json::parse(r.err);
  EXPECT_EQ(err.at("error"), "IoError");
  EXPECT_FALSE(err.at("message").get<std::string>().empty());
  fs::remove_all(dir);
}

TEST(Cli, ReproduceTable8) {
  const auto dir = scratch("table8");
  const auto r = aia("reproduce-table8 --tables " + std::string(AIA_TABLES_PATH) + " --out " + dir.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = Json::parse(r.out);
  std::map<std::string, int> rejected;
  for (const auto& f : j.at("families")) rejected[f.at("family")] = f.at("rejected");
  EXPECT_EQ(rejected["dummy_vs_best"], 5);
  EXPECT_EQ(rejected["dummy_vs_naive"], 4);
  EXPECT_EQ(rejected["dummy_vs_expert"], 9);
  EXPECT_EQ(rejected["sophisticated_vs_indiscriminate"], 7);
  EXPECT_TRUE(fs::exists(dir / "ledger.csv"));
  fs::remove_all(dir);
}

TEST(Cli, ConfigFileAndFlagsOverride) {
  const auto dir = scratch("config");
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << Json({{"tables", AIA_TABLES_PATH}, {"alpha", 0.5}, {"out", (dir / "from_file").string()}}).dump();
  }
  const auto r = aia("reproduce-table8 --config " + (dir / "cfg.json").string() + " --alpha 0.05 --out " +
                     (dir / "from_flag").string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "from_flag" / "ledger.csv"));
  EXPECT_FALSE(fs::exists(dir / "from_file"));
  for (const auto& f : Json::parse(r.out).at("families")) {
    if (f.at("family") == "dummy_vs_best") EXPECT_EQ(f.at("rejected"), 5);
  }
  fs::remove_all(dir);
}

TEST(Cli, PipelineIsDeterministicAcrossJobs) {
  const auto dir = scratch("jobs");
  const auto cache = (dir / "cache").string(), labels = (dir / "labels.csv").string();
  ASSERT_EQ(aia("synth --fixture --out " + cache).exit_code, 0);
  const auto survey_before = slurp(dir / "cache" / "survey.csv");
  ASSERT_EQ(aia("labels --in " + cache + "/survey.csv --out " + labels).exit_code, 0);
  for (const char* jobs : {"1", "3"}) {
    const std::string j = std::string("-j ") + jobs;
    const auto feats = (dir / ("features_" + std::string(jobs))).string();
    const auto r = aia(j + " featurize --cache " + cache + " --labels " + labels + " --out " + feats +
                       " --variant P --variant M");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    ASSERT_EQ(aia(j + " correlate --features " + feats + " --labels " + labels + " --out " + feats + "/corr")
                  .exit_code,
              0);
    const auto a = aia(j + " attack --protocol simple --grid quick --attributes age --attributes occupation"
                           " --outer-folds 3 --features " + feats + " --labels " + labels + " --out " + feats +
                       "/simple");
    ASSERT_EQ(a.exit_code, 0) << a.err;
  }
  EXPECT_EQ(tree(dir / "features_1"), tree(dir / "features_3"));
  EXPECT_EQ(slurp(dir / "cache" / "survey.csv"), survey_before);
  // Re-running into the same directory rewrites identical bytes.
  const auto before = tree(dir / "features_1");
  ASSERT_EQ(aia("featurize --cache " + cache + " --labels " + labels + " --out " + (dir / "features_1").string() +
                " --variant P --variant M")
                .exit_code,
            0);
  EXPECT_EQ(tree(dir / "features_1"), before);
  fs::remove_all(dir);
}

}  // namespace
