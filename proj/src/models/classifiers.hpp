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

// From-scratch classifiers over dense, already-scaled inputs.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "models/dense.hpp"

namespace aia::models {

enum class Algorithm { kLogisticRegression, kDecisionTree, kRandomForest, kMlp, kDummyStratified };

std::string_view algorithm_name(Algorithm a);
Algorithm algorithm_from_name(std::string_view s);

// Named numeric hyperparameters; a max_depth of 0 means unlimited.
struct Hyperparams {
  std::map<std::string, double> values;

  double get(const std::string& name, double fallback) const;
  nlohmann::json to_json() const;
  bool operator==(const Hyperparams&) const = default;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  // Probability vector over data.n_classes classes.
  virtual std::vector<double> predict_proba(std::span<const double> row) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

struct FitInfo {
  bool converged = true;
  int iterations = 0;
};

// The model is immutable once returned and safe to share across threads.
std::shared_ptr<const Classifier> fit_classifier(Algorithm algorithm, const Dense& data,
                                                 const Hyperparams& params, uint64_t seed,
                                                 FitInfo* info = nullptr);
std::shared_ptr<const Classifier> classifier_from_json(Algorithm algorithm, const nlohmann::json& j);

// A single CART tree, exposed for tests and for the forest.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> proba;
};

class DecisionTree : public Classifier {
 public:
  struct Options {
    int max_depth = 0;
    int min_leaf = 1;
    // Features tried per split; 0 tries all.
    int max_features = 0;
  };
  static DecisionTree fit(const Dense& data, const std::vector<size_t>& rows, const Options& opt,
                          uint64_t seed);
  std::vector<double> predict_proba(std::span<const double> row) const override;
  nlohmann::json to_json() const override;
  static DecisionTree from_json(const nlohmann::json& j);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

class RandomForest : public Classifier {
 public:
  explicit RandomForest(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {}
  std::vector<double> predict_proba(std::span<const double> row) const override;
  nlohmann::json to_json() const override;
  static RandomForest from_json(const nlohmann::json& j);
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

}  // namespace aia::models
