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
// Command line front end. Every subcommand turns its flags (and an optional
// JSON config file whose keys mirror the flags) into one options document and
// hands it to the C API.

#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aia/aia.h"
#include "json.hpp"

namespace {

using Json = nlohmann::json;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

enum class Kind { kString, kInt, kDouble, kBool, kStringList, kIntList };

struct Flag {
  std::string key;  // dotted path into the options document
  Kind kind;
  CLI::Option* opt = nullptr;
  std::string value;
  std::vector<std::string> values;
  bool set = false;
};

struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  std::deque<Flag> flags;
  std::function<aia_status(aia_context*, const char*)> run;

  void add(const std::string& name, const std::string& key, Kind kind, const std::string& help) {
    Flag& f = flags.emplace_back();
    f.key = key;
    f.kind = kind;
    switch (kind) {
      case Kind::kBool:
        f.opt = app->add_flag(name, f.set, help);
        break;
      case Kind::kStringList:
        f.opt = app->add_option(name, f.values, help)->delimiter(',');
        break;
      case Kind::kIntList:
        f.opt = app->add_option(name, f.values, help)->delimiter(',')->check(CLI::NonNegativeNumber);
        break;
      case Kind::kInt:
        f.opt = app->add_option(name, f.value, help)->check(CLI::Number);
        break;
      case Kind::kDouble:
        f.opt = app->add_option(name, f.value, help)->check(CLI::Number);
        break;
      case Kind::kString:
        f.opt = app->add_option(name, f.value, help);
        break;
    }
  }
};

Json flag_value(const Flag& f) {
  switch (f.kind) {
    case Kind::kBool:
      return f.set;
    case Kind::kInt:
      return std::stoll(f.value);
    case Kind::kDouble:
      return std::stod(f.value);
    case Kind::kString:
      return f.value;
    case Kind::kStringList:
      return f.values;
    case Kind::kIntList: {
      Json out = Json::array();
      for (const auto& v : f.values) out.push_back(std::stoull(v));
      return out;
    }
  }
  return nullptr;
}

void set_path(Json& doc, const std::string& dotted, Json value) {
  Json* node = &doc;
  size_t start = 0;
  for (size_t dot; (dot = dotted.find('.', start)) != std::string::npos; start = dot + 1) {
    node = &(*node)[dotted.substr(start, dot - start)];
  }
  (*node)[dotted.substr(start)] = std::move(value);
}

// Config file first, then every flag given on the command line.
Json build_options(const Command& c) {
  Json doc = Json::object();
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot read " + c.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    doc = Json::parse(ss.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw CLI::ValidationError("--config", c.config_path + " is not a JSON object");
    }
  }
  for (const auto& f : c.flags) {
    if (f.opt->count() > 0) set_path(doc, f.key, flag_value(f));
  }
  return doc;
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute inference attacks on match telemetry"};
  app.require_subcommand(1);
  app.set_version_flag("--version", aia_version());
  unsigned jobs = 0;
  app.add_option("-j,--jobs", jobs, "Worker threads (default: all cores)");
  app.fallthrough();

  std::deque<Command> commands;
  auto make = [&](const std::string& name, const std::string& help, auto run) -> Command& {
    Command& c = commands.emplace_back();
    c.app = app.add_subcommand(name, help);
    c.run = run;
    return c;
  };
  auto with_config = [](Command& c) {
    c.app->add_option("--config", c.config_path, "JSON file with option defaults; flags win")
        ->check(CLI::ExistingFile);
  };

  {
    Command& c = make("ingest", "Fetch players and their matches into the cache", aia_run_ingest);
    with_config(c);
    c.add("--handles", "handles_file", Kind::kString, "File with one account id per line");
    c.add("--cache", "cache", Kind::kString, "Cache directory (output)");
    c.add("--window-days", "window_days", Kind::kInt, "Match history window in days");
    c.add("--offline", "offline", Kind::kBool, "Fail instead of touching the network");
    c.add("--base-url", "base_url", Kind::kString, "API base URL");
    c.add("--rate", "requests_per_second", Kind::kDouble, "Request rate limit per second");
    c.add("--max-retries", "max_retries", Kind::kInt, "Retries after HTTP 429");
  }
  {
    Command& c = make("labels", "Bin raw survey answers into attribute classes", aia_run_labels);
    with_config(c);
    c.add("--in", "in", Kind::kString, "Survey CSV");
    c.add("--out", "out", Kind::kString, "Output labels CSV");
    c.add("--low-max", "low_max", Kind::kInt, "Highest trait score binned as low");
    c.add("--medium-max", "medium_max", Kind::kInt, "Highest trait score binned as medium");
  }
  {
    Command& c = make("featurize", "Build feature matrices from the cache", aia_run_featurize);
    with_config(c);
    c.add("--variant", "variants", Kind::kStringList, "P, M and/or Mbar (default: all)");
    c.add("--cache", "cache", Kind::kString, "Cache directory");
    c.add("--labels", "labels", Kind::kString, "Labels CSV");
    c.add("--out", "out", Kind::kString, "Output directory");
    c.add("--data-dir", "data_dir", Kind::kString, "Lexicon and hero resources");
    c.add("--window-days", "window_days", Kind::kInt, "Match history window in days");
    c.add("--min-matches", "min_matches", Kind::kInt, "Minimum matches per player");
    c.add("--max-per-player", "max_per_player", Kind::kInt, "Distilled rows per player");
    c.add("--n-variants", "n_variants", Kind::kInt, "Number of distilled samples");
    c.add("--seed", "seed", Kind::kInt, "Sampling seed");
  }
  {
    Command& c = make("correlate", "Feature and attribute correlation report", aia_run_correlate);
    with_config(c);
    c.add("--features", "features", Kind::kString, "Featurize output directory");
    c.add("--labels", "labels", Kind::kString, "Labels CSV");
    c.add("--out", "out", Kind::kString, "Output directory");
    c.add("--alpha", "alpha", Kind::kDouble, "Significance level");
    c.add("--top-k", "top_k", Kind::kInt, "Top features kept per attribute");
    c.add("--bias-corrected", "bias_corrected", Kind::kBool, "Bias-corrected Cramer's V");
  }
  {
    Command& c = make("attack", "Run an attack protocol", aia_run_attack);
    with_config(c);
    c.add("--protocol", "protocol", Kind::kString,
          "simple, one-match, sophisticated, indiscriminate or targeted");
    c.add("--dataset", "dataset", Kind::kString, "one-match only: M, Mbar or both");
    c.add("--target", "target", Kind::kString, "targeted only: subgroup name or attr=class list");
    c.add("--features", "features", Kind::kString, "Featurize output directory");
    c.add("--labels", "labels", Kind::kString, "Labels CSV");
    c.add("--out", "out", Kind::kString, "Output directory");
    c.add("--seed", "options.seed", Kind::kInt, "Master seed");
    c.add("--algorithms", "options.algorithms", Kind::kStringList, "Learners to compare");
    c.add("--attributes", "options.attributes", Kind::kStringList, "Attributes to attack");
    c.add("--grid", "options.grid", Kind::kString, "Hyperparameter grid preset: full or quick");
    c.add("--outer-folds", "options.outer_folds", Kind::kInt, "Outer CV folds");
    c.add("--inner-folds", "options.inner_folds", Kind::kInt, "Inner CV folds");
    c.add("--repeats", "options.repeats", Kind::kInt, "Split repeats on plain M");
    c.add("--draws", "options.draws", Kind::kInt, "Match samples per player and n");
    c.add("--n-sweep", "options.n_sweep", Kind::kIntList, "Matches per player to evaluate");
  }
  {
    Command& c = make("validate", "t-tests over summary statistic pairs", aia_run_validate);
    with_config(c);
    c.add("--pairs", "pairs", Kind::kString, "Pairs CSV or tables JSON");
    c.add("--alpha", "alpha", Kind::kDouble, "Significance level");
    c.add("--out", "out", Kind::kString, "Output directory");
  }
  {
    // Here --config is the population description itself.
    Command& c = make("synth", "Generate a synthetic population into a cache", aia_run_synth);
    c.app->add_option("--config", c.config_path, "Population config JSON")->check(CLI::ExistingFile);
    c.add("--out", "out", Kind::kString, "Output cache directory");
    c.add("--fixture", "fixture", Kind::kBool, "Start from the regression fixture config");
    c.add("--seed", "config.seed", Kind::kInt, "Population seed");
    c.add("--players", "config.n_players", Kind::kInt, "Number of players");
  }
  {
    Command& c = make("reproduce-table8", "Hypothesis ledger from the shipped published tables",
                      aia_reproduce_table8);
    with_config(c);
    c.add("--tables", "tables", Kind::kString, "Tables JSON (default: shipped copy)");
    c.add("--alpha", "alpha", Kind::kDouble, "Significance level");
    c.add("--out", "out", Kind::kString, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    if (c.app->parsed()) chosen = &c;
  }
  Json options;
  try {
    if (chosen->app->get_name() == "synth") {
      // The config file describes the population; flags sit beside it.
      Command file_only;
      file_only.config_path = chosen->config_path;
      options = {{"config", build_options(file_only)}};
      for (const auto& f : chosen->flags) {
        if (f.opt->count() > 0) set_path(options, f.key, flag_value(f));
      }
    } else {
      options = build_options(*chosen);
    }
  } catch (const CLI::ValidationError& e) {
    print_error("UsageError", e.what());
    return kExitUsage;
  }

  aia_context* ctx = nullptr;
  if (aia_context_create(&ctx) != AIA_OK) {
    print_error("InternalError", "cannot create context");
    return kExitData;
  }
  int rc = 0;
  aia_status st = aia_context_set_jobs(ctx, jobs);
  if (st == AIA_OK) st = chosen->run(ctx, options.dump().c_str());
  if (st == AIA_OK) {
    std::cout << aia_last_result(ctx) << "\n";
  } else {
    print_error(aia_status_name(st), aia_last_error(ctx));
    rc = st == AIA_ERR_CONFIG ? kExitUsage : kExitData;
  }
  aia_context_destroy(ctx);
  return rc;
}
