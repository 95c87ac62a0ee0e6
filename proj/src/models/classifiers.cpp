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
#include "models/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace aia::models {
namespace {

using Json = nlohmann::json;

void softmax_inplace(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : z) v /= s;
}

// ---- logistic regression -------------------------------------------------

class LogisticRegression : public Classifier {
 public:
  LogisticRegression(size_t k, size_t d, std::vector<double> w) : k_(k), d_(d), w_(std::move(w)) {}

  std::vector<double> predict_proba(std::span<const double> row) const override {
    std::vector<double> z(k_);
    for (size_t c = 0; c < k_; ++c) {
      const double* wc = w_.data() + c * (d_ + 1);
      double s = wc[d_];
      for (size_t j = 0; j < d_; ++j) s += wc[j] * row[j];
      z[c] = s;
    }
    softmax_inplace(z);
    return z;
  }

  Json to_json() const override { return {{"classes", k_}, {"inputs", d_}, {"weights", w_}}; }

 private:
  size_t k_, d_;
  std::vector<double> w_;  // k rows of d weights plus a bias
};

struct LrObjective {
  const Dense& data;
  double l2;

  // Mean cross-entropy plus l2/(2n)*||W||^2 (bias excluded). Fills grad when
  // given.
  double eval(const std::vector<double>& w, std::vector<double>* grad) const {
    const size_t k = static_cast<size_t>(data.n_classes), d = data.d, n = data.n;
    if (grad) grad->assign(w.size(), 0.0);
    double loss = 0.0;
    std::vector<double> z(k);
    for (size_t i = 0; i < n; ++i) {
      auto x = data.row(i);
      for (size_t c = 0; c < k; ++c) {
        const double* wc = w.data() + c * (d + 1);
        double s = wc[d];
        for (size_t j = 0; j < d; ++j) s += wc[j] * x[j];
        z[c] = s;
      }
      const double m = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (size_t c = 0; c < k; ++c) sum += std::exp(z[c] - m);
      const double lse = m + std::log(sum);
      loss += lse - z[data.y[i]];
      if (grad) {
        for (size_t c = 0; c < k; ++c) {
          const double g = std::exp(z[c] - lse) - (static_cast<int>(c) == data.y[i] ? 1.0 : 0.0);
          double* gc = grad->data() + c * (d + 1);
          for (size_t j = 0; j < d; ++j) gc[j] += g * x[j];
          gc[d] += g;
        }
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    double reg = 0.0;
    for (size_t c = 0; c < k; ++c) {
      for (size_t j = 0; j < d; ++j) {
        const double wv = w[c * (d + 1) + j];
        reg += wv * wv;
        if (grad) (*grad)[c * (d + 1) + j] = (*grad)[c * (d + 1) + j] * inv_n + l2 * inv_n * wv;
      }
      if (grad) (*grad)[c * (d + 1) + d] *= inv_n;
    }
    return loss + 0.5 * l2 * inv_n * reg;
  }
};

std::shared_ptr<const Classifier> fit_lr(const Dense& data, const Hyperparams& p, FitInfo* info) {
  const double l2 = p.get("l2", 1.0);
  const double tol = p.get("tol", 1e-6);
  const int max_iter = static_cast<int>(p.get("max_iter", 5000));
  const size_t k = static_cast<size_t>(data.n_classes);
  std::vector<double> w(k * (data.d + 1), 0.0), grad, trial;
  LrObjective obj{data, l2};
  double loss = obj.eval(w, &grad);
  double step = 1.0;
  bool converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    double gmax = 0.0, gnorm2 = 0.0;
    for (double g : grad) {
      gmax = std::max(gmax, std::fabs(g));
      gnorm2 += g * g;
    }
    if (gmax <= tol) {
      converged = true;
      break;
    }
    // Backtracking line search with the Armijo condition.
    step = std::min(step * 2.0, 1e6);
    double new_loss = 0.0;
    trial.resize(w.size());
    for (int bt = 0; bt < 60; ++bt) {
      for (size_t i = 0; i < w.size(); ++i) trial[i] = w[i] - step * grad[i];
      new_loss = obj.eval(trial, nullptr);
      if (new_loss <= loss - 1e-4 * step * gnorm2) break;
      step *= 0.5;
    }
    const double change = loss - new_loss;
    if (!(change > 0.0)) {
      converged = true;
      break;
    }
    w.swap(trial);
    loss = obj.eval(w, &grad);
    if (change <= tol * std::max(1.0, std::fabs(loss))) {
      converged = true;
      ++it;
      break;
    }
  }
  if (info) {
    info->converged = converged;
    info->iterations = it;
  }
  return std::make_shared<LogisticRegression>(k, data.d, std::move(w));
}

// ---- multilayer perceptron ----------------------------------------------

class Mlp : public Classifier {
 public:
  Mlp(size_t d, size_t h, size_t k, std::vector<double> w1, std::vector<double> b1,
      std::vector<double> w2, std::vector<double> b2)
      : d_(d), h_(h), k_(k), w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)),
        b2_(std::move(b2)) {}

  std::vector<double> predict_proba(std::span<const double> row) const override {
    std::vector<double> hidden(h_), out(k_);
    forward(row, hidden, out);
    return out;
  }

  void forward(std::span<const double> x, std::vector<double>& hidden,
               std::vector<double>& out) const {
    for (size_t j = 0; j < h_; ++j) {
      double s = b1_[j];
      const double* w = w1_.data() + j * d_;
      for (size_t i = 0; i < d_; ++i) s += w[i] * x[i];
      hidden[j] = s > 0.0 ? s : 0.0;
    }
    for (size_t c = 0; c < k_; ++c) {
      double s = b2_[c];
      const double* w = w2_.data() + c * h_;
      for (size_t j = 0; j < h_; ++j) s += w[j] * hidden[j];
      out[c] = s;
    }
    softmax_inplace(out);
  }

  Json to_json() const override {
    return {{"inputs", d_}, {"hidden", h_}, {"classes", k_}, {"w1", w1_},
            {"b1", b1_},    {"w2", w2_},    {"b2", b2_}};
  }

  static std::shared_ptr<const Classifier> fit(const Dense& data, const Hyperparams& p,
                                               uint64_t seed, FitInfo* info);

 private:
  size_t d_, h_, k_;
  std::vector<double> w1_, b1_, w2_, b2_;
};

std::shared_ptr<const Classifier> Mlp::fit(const Dense& data, const Hyperparams& p, uint64_t seed,
                                           FitInfo* info) {
  const size_t d = data.d, k = static_cast<size_t>(data.n_classes);
  const size_t h = static_cast<size_t>(p.get("hidden", 32));
  const double lr = p.get("learning_rate", 1e-3);
  const int max_epochs = static_cast<int>(p.get("max_epochs", 200));
  const double alpha = p.get("alpha", 1e-4);
  const size_t batch = static_cast<size_t>(p.get("batch_size", 32));
  const int patience = static_cast<int>(p.get("patience", 10));
  const double tol = p.get("tol", 1e-4);

  Rng rng(seed);
  const double b1 = std::sqrt(6.0 / static_cast<double>(d + h));
  const double b2 = std::sqrt(6.0 / static_cast<double>(h + k));
  std::vector<double> params;
  const size_t n_w1 = h * d, n_b1 = h, n_w2 = k * h, n_b2 = k;
  params.resize(n_w1 + n_b1 + n_w2 + n_b2, 0.0);
  for (size_t i = 0; i < n_w1; ++i) params[i] = rng.uniform(-b1, b1);
  for (size_t i = 0; i < n_w2; ++i) params[n_w1 + n_b1 + i] = rng.uniform(-b2, b2);
  for (size_t i = 0; i < n_b1; ++i) params[n_w1 + i] = rng.uniform(-b1, b1);
  for (size_t i = 0; i < n_b2; ++i) params[n_w1 + n_b1 + n_w2 + i] = rng.uniform(-b2, b2);

  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0), g(params.size(), 0.0);
  std::vector<double> hidden(h), out(k), dh(h);
  std::vector<size_t> order(data.n);
  std::iota(order.begin(), order.end(), size_t{0});
  double best_loss = std::numeric_limits<double>::infinity();
  int stale = 0, epoch = 0;
  long step = 0;
  bool converged = false;
  for (; epoch < max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < data.n; start += batch) {
      const size_t end = std::min(data.n, start + batch);
      std::fill(g.begin(), g.end(), 0.0);
      double* gw1 = g.data();
      double* gb1 = gw1 + n_w1;
      double* gw2 = gb1 + n_b1;
      double* gb2 = gw2 + n_w2;
      const double* w1 = params.data();
      const double* pb1 = w1 + n_w1;
      const double* w2 = pb1 + n_b1;
      const double* pb2 = w2 + n_w2;
      for (size_t bi = start; bi < end; ++bi) {
        auto x = data.row(order[bi]);
        const int y = data.y[order[bi]];
        for (size_t j = 0; j < h; ++j) {
          double s = pb1[j];
          for (size_t i = 0; i < d; ++i) s += w1[j * d + i] * x[i];
          hidden[j] = s > 0.0 ? s : 0.0;
        }
        for (size_t c = 0; c < k; ++c) {
          double s = pb2[c];
          for (size_t j = 0; j < h; ++j) s += w2[c * h + j] * hidden[j];
          out[c] = s;
        }
        softmax_inplace(out);
        epoch_loss -= std::log(std::max(out[y], 1e-300));
        std::fill(dh.begin(), dh.end(), 0.0);
        for (size_t c = 0; c < k; ++c) {
          const double delta = out[c] - (static_cast<int>(c) == y ? 1.0 : 0.0);
          gb2[c] += delta;
          for (size_t j = 0; j < h; ++j) {
            gw2[c * h + j] += delta * hidden[j];
            dh[j] += delta * w2[c * h + j];
          }
        }
        for (size_t j = 0; j < h; ++j) {
          if (hidden[j] <= 0.0) continue;
          gb1[j] += dh[j];
          for (size_t i = 0; i < d; ++i) gw1[j * d + i] += dh[j] * x[i];
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (size_t i = 0; i < g.size(); ++i) g[i] *= inv;
      for (size_t i = 0; i < n_w1; ++i) g[i] += alpha * params[i];
      for (size_t i = 0; i < n_w2; ++i) g[n_w1 + n_b1 + i] += alpha * params[n_w1 + n_b1 + i];
      ++step;
      const double c1 = 1.0 - std::pow(0.9, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(0.999, static_cast<double>(step));
      for (size_t i = 0; i < params.size(); ++i) {
        m[i] = 0.9 * m[i] + 0.1 * g[i];
        v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
        params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + 1e-8);
      }
    }
    epoch_loss /= static_cast<double>(data.n);
    if (epoch_loss < best_loss - tol) {
      best_loss = epoch_loss;
      stale = 0;
    } else if (++stale >= patience) {
      converged = true;
      ++epoch;
      break;
    }
  }
  if (info) {
    info->converged = converged;
    info->iterations = epoch;
  }
  auto at = [&](size_t off, size_t len) {
    return std::vector<double>(params.begin() + off, params.begin() + off + len);
  };
  return std::make_shared<Mlp>(d, h, k, at(0, n_w1), at(n_w1, n_b1), at(n_w1 + n_b1, n_w2),
                               at(n_w1 + n_b1 + n_w2, n_b2));
}

// ---- stratified dummy ----------------------------------------------------

class Dummy : public Classifier {
 public:
  explicit Dummy(std::vector<double> priors) : priors_(std::move(priors)) {}
  std::vector<double> predict_proba(std::span<const double>) const override { return priors_; }
  Json to_json() const override { return {{"priors", priors_}}; }

 private:
  std::vector<double> priors_;
};

// ---- trees ----------------------------------------------------------------

double gini(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double s = 0.0;
  for (double c : counts) s += (c / total) * (c / total);
  return 1.0 - s;
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kLogisticRegression: return "logistic_regression";
    case Algorithm::kDecisionTree: return "decision_tree";
    case Algorithm::kRandomForest: return "random_forest";
    case Algorithm::kMlp: return "mlp";
    case Algorithm::kDummyStratified: return "dummy_stratified";
  }
  return "dummy_stratified";
}

Algorithm algorithm_from_name(std::string_view s) {
  if (s == "logistic_regression" || s == "lr") return Algorithm::kLogisticRegression;
  if (s == "decision_tree" || s == "dt") return Algorithm::kDecisionTree;
  if (s == "random_forest" || s == "rf") return Algorithm::kRandomForest;
  if (s == "mlp" || s == "nn") return Algorithm::kMlp;
  if (s == "dummy_stratified" || s == "dummy") return Algorithm::kDummyStratified;
  fail(ErrorCode::kInvalidArgument, "unknown algorithm '" + std::string(s) + "'");
}

double Hyperparams::get(const std::string& name, double fallback) const {
  auto it = values.find(name);
  return it == values.end() ? fallback : it->second;
}

nlohmann::json Hyperparams::to_json() const {
  Json j = Json::object();
  for (const auto& [k, v] : values) j[k] = v;
  return j;
}

DecisionTree DecisionTree::fit(const Dense& data, const std::vector<size_t>& rows,
                               const Options& opt, uint64_t seed) {
  if (rows.empty()) fail(ErrorCode::kEmptyInput, "cannot grow a tree on zero rows");
  const size_t k = static_cast<size_t>(data.n_classes);
  const size_t min_leaf = static_cast<size_t>(std::max(1, opt.min_leaf));
  const size_t mf = opt.max_features <= 0 ? data.d
                                          : std::min(data.d, static_cast<size_t>(opt.max_features));
  Rng rng(seed);
  DecisionTree tree;

  struct Work {
    int node;
    std::vector<size_t> rows;
    int depth;
  };
  std::vector<Work> stack;
  tree.nodes_.push_back({});
  stack.push_back({0, rows, 0});
  std::vector<std::pair<double, int>> sorted;
  std::vector<double> left(k), right(k), counts(k);
  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    std::fill(counts.begin(), counts.end(), 0.0);
    for (size_t r : w.rows) counts[data.y[r]] += 1.0;
    const double total = static_cast<double>(w.rows.size());
    std::vector<double> proba(k);
    for (size_t c = 0; c < k; ++c) proba[c] = counts[c] / total;
    tree.nodes_[w.node].proba = proba;

    const double parent = gini(counts, total);
    const bool depth_ok = opt.max_depth <= 0 || w.depth < opt.max_depth;
    if (parent <= 0.0 || !depth_ok || w.rows.size() < 2 * min_leaf || data.d == 0) continue;

    std::vector<size_t> feats;
    if (mf >= data.d) {
      feats.resize(data.d);
      std::iota(feats.begin(), feats.end(), size_t{0});
    } else {
      feats = rng.sample_without_replacement(data.d, mf);
    }
    double best = parent - 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    for (size_t f : feats) {
      sorted.clear();
      for (size_t r : w.rows) sorted.emplace_back(data.x[r * data.d + f], data.y[r]);
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;
      std::fill(left.begin(), left.end(), 0.0);
      right = counts;
      for (size_t i = 0; i + 1 < sorted.size(); ++i) {
        left[sorted[i].second] += 1.0;
        right[sorted[i].second] -= 1.0;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const size_t nl = i + 1, nr = sorted.size() - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double dl = static_cast<double>(nl), dr = static_cast<double>(nr);
        const double impurity = (dl * gini(left, dl) + dr * gini(right, dr)) / total;
        if (impurity < best) {
          best = impurity;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
        }
      }
    }
    if (best_feature < 0) continue;
    std::vector<size_t> lrows, rrows;
    for (size_t r : w.rows) {
      (data.x[r * data.d + best_feature] <= best_threshold ? lrows : rrows).push_back(r);
    }
    const int l = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back({});
    tree.nodes_.push_back({});
    TreeNode& node = tree.nodes_[w.node];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = l + 1;
    // Right first so the left subtree is grown first (stable node order).
    stack.push_back({l + 1, std::move(rrows), w.depth + 1});
    stack.push_back({l, std::move(lrows), w.depth + 1});
  }
  return tree;
}

std::vector<double> DecisionTree::predict_proba(std::span<const double> row) const {
  int i = 0;
  while (nodes_[i].feature >= 0) {
    i = row[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  }
  return nodes_[i].proba;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].feature < 0) continue;
    d[nodes_[i].left] = d[nodes_[i].right] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

Json DecisionTree::to_json() const {
  Json nodes = Json::array();
  for (const auto& n : nodes_) {
    nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right},
                     {"p", n.proba}});
  }
  return {{"nodes", nodes}};
}

DecisionTree DecisionTree::from_json(const Json& j) {
  DecisionTree t;
  for (const auto& n : j.at("nodes")) {
    t.nodes_.push_back({n.at("f").get<int>(), n.at("t").get<double>(), n.at("l").get<int>(),
                        n.at("r").get<int>(), n.at("p").get<std::vector<double>>()});
  }
  const int size = static_cast<int>(t.nodes_.size());
  for (const auto& n : t.nodes_) {
    if (n.feature >= 0 && (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size)) {
      fail(ErrorCode::kSchema, "tree node points outside the node table");
    }
  }
  if (t.nodes_.empty()) fail(ErrorCode::kSchema, "tree has no nodes");
  return t;
}

std::vector<double> RandomForest::predict_proba(std::span<const double> row) const {
  std::vector<double> acc;
  for (const auto& t : trees_) {
    const auto p = t.predict_proba(row);
    if (acc.empty()) acc.assign(p.size(), 0.0);
    for (size_t c = 0; c < p.size(); ++c) acc[c] += p[c];
  }
  for (double& v : acc) v /= static_cast<double>(trees_.size());
  return acc;
}

Json RandomForest::to_json() const {
  Json trees = Json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"trees", trees}};
}

RandomForest RandomForest::from_json(const Json& j) {
  std::vector<DecisionTree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(DecisionTree::from_json(t));
  if (trees.empty()) fail(ErrorCode::kSchema, "forest has no trees");
  return RandomForest(std::move(trees));
}

std::shared_ptr<const Classifier> fit_classifier(Algorithm algorithm, const Dense& data,
                                                 const Hyperparams& params, uint64_t seed,
                                                 FitInfo* info) {
  if (data.n == 0) fail(ErrorCode::kEmptyInput, "cannot fit on zero rows");
  if (data.n_classes < 1) fail(ErrorCode::kInvalidArgument, "n_classes must be positive");
  if (info) *info = FitInfo{};
  switch (algorithm) {
    case Algorithm::kLogisticRegression:
      return fit_lr(data, params, info);
    case Algorithm::kDecisionTree: {
      std::vector<size_t> rows(data.n);
      std::iota(rows.begin(), rows.end(), size_t{0});
      DecisionTree::Options opt{static_cast<int>(params.get("max_depth", 0)),
                                static_cast<int>(params.get("min_leaf", 1)), 0};
      return std::make_shared<DecisionTree>(DecisionTree::fit(data, rows, opt, seed));
    }
    case Algorithm::kRandomForest: {
      const int n_trees = static_cast<int>(params.get("trees", 100));
      if (n_trees < 1) fail(ErrorCode::kInvalidArgument, "a forest needs at least one tree");
      DecisionTree::Options opt{
          static_cast<int>(params.get("max_depth", 0)), static_cast<int>(params.get("min_leaf", 1)),
          std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(data.d)))))};
      std::vector<DecisionTree> trees;
      trees.reserve(n_trees);
      for (int t = 0; t < n_trees; ++t) {
        const uint64_t tseed = derive_seed(seed, {static_cast<uint64_t>(t)});
        Rng rng(tseed);
        std::vector<size_t> rows(data.n);
        for (auto& r : rows) r = rng.below(data.n);
        trees.push_back(DecisionTree::fit(data, rows, opt, rng.next_u64()));
      }
      return std::make_shared<RandomForest>(std::move(trees));
    }
    case Algorithm::kMlp:
      return Mlp::fit(data, params, seed, info);
    case Algorithm::kDummyStratified: {
      std::vector<double> priors(data.n_classes, 0.0);
      for (int y : data.y) priors[y] += 1.0;
      for (double& p : priors) p /= static_cast<double>(data.n);
      return std::make_shared<Dummy>(std::move(priors));
    }
  }
  fail(ErrorCode::kInternal, "unhandled algorithm");
}

std::shared_ptr<const Classifier> classifier_from_json(Algorithm algorithm, const Json& j) {
  try {
    switch (algorithm) {
      case Algorithm::kLogisticRegression:
        return std::make_shared<LogisticRegression>(j.at("classes").get<size_t>(),
                                                    j.at("inputs").get<size_t>(),
                                                    j.at("weights").get<std::vector<double>>());
      case Algorithm::kDecisionTree:
        return std::make_shared<DecisionTree>(DecisionTree::from_json(j));
      case Algorithm::kRandomForest:
        return std::make_shared<RandomForest>(RandomForest::from_json(j));
      case Algorithm::kMlp:
        return std::make_shared<Mlp>(
            j.at("inputs").get<size_t>(), j.at("hidden").get<size_t>(), j.at("classes").get<size_t>(),
            j.at("w1").get<std::vector<double>>(), j.at("b1").get<std::vector<double>>(),
            j.at("w2").get<std::vector<double>>(), j.at("b2").get<std::vector<double>>());
      case Algorithm::kDummyStratified:
        return std::make_shared<Dummy>(j.at("priors").get<std::vector<double>>());
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchema, std::string("model parameters: ") + e.what());
  }
  fail(ErrorCode::kInternal, "unhandled algorithm");
}

}  // namespace aia::models
