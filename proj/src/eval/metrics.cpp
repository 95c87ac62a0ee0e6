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
#include "eval/metrics.hpp"

#include "common/error.hpp"

namespace aia::eval {
namespace {

struct Counts {
  std::vector<double> tp, fp, fn;
  std::vector<bool> scored;
};

Counts count(std::span<const int> y_true, std::span<const int> y_pred, int n_classes) {
  if (y_true.size() != y_pred.size()) {
    fail(ErrorCode::kLengthMismatch, "y_true and y_pred differ in length");
  }
  if (y_true.empty()) fail(ErrorCode::kEmptyInput, "no predictions to score");
  Counts c{std::vector<double>(n_classes, 0.0), std::vector<double>(n_classes, 0.0),
           std::vector<double>(n_classes, 0.0), std::vector<bool>(n_classes, false)};
  for (size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i], p = y_pred[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes) {
      fail(ErrorCode::kInvalidArgument, "class code out of range");
    }
    c.scored[t] = c.scored[p] = true;
    if (t == p) {
      c.tp[t] += 1.0;
    } else {
      c.fp[p] += 1.0;
      c.fn[t] += 1.0;
    }
  }
  return c;
}

double ratio(double a, double b) { return b > 0.0 ? a / b : 0.0; }

}  // namespace

std::vector<double> per_class_f1(std::span<const int> y_true, std::span<const int> y_pred,
                                 int n_classes) {
  const Counts c = count(y_true, y_pred, n_classes);
  std::vector<double> out(n_classes, -1.0);
  for (int k = 0; k < n_classes; ++k) {
    if (!c.scored[k]) continue;
    out[k] = ratio(2.0 * c.tp[k], 2.0 * c.tp[k] + c.fp[k] + c.fn[k]);
  }
  return out;
}

Metrics compute_metrics(std::span<const int> y_true, std::span<const int> y_pred, int n_classes) {
  const Counts c = count(y_true, y_pred, n_classes);
  Metrics m;
  double correct = 0.0, f1 = 0.0, prec = 0.0, rec = 0.0;
  int scored = 0;
  for (int k = 0; k < n_classes; ++k) {
    correct += c.tp[k];
    if (!c.scored[k]) continue;
    ++scored;
    f1 += ratio(2.0 * c.tp[k], 2.0 * c.tp[k] + c.fp[k] + c.fn[k]);
    prec += ratio(c.tp[k], c.tp[k] + c.fp[k]);
    rec += ratio(c.tp[k], c.tp[k] + c.fn[k]);
  }
  m.accuracy = correct / static_cast<double>(y_true.size());
  m.macro_f1 = f1 / scored;
  m.precision = prec / scored;
  m.recall = rec / scored;
  if (n_classes >= 2) {
    m.positive_precision = ratio(c.tp[1], c.tp[1] + c.fp[1]);
    m.positive_recall = ratio(c.tp[1], c.tp[1] + c.fn[1]);
    m.predicted_positive = static_cast<size_t>(c.tp[1] + c.fp[1]);
  }
  return m;
}

int argmax(std::span<const double> v) {
  int best = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = static_cast<int>(i);
  }
  return best;
}

bool in_top2(std::span<const double> v, int true_class) {
  // Entries ranked ahead of the true class: strictly larger, or equal with a
  // lower index.
  int ahead = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    const int k = static_cast<int>(i);
    if (k == true_class) continue;
    if (v[i] > v[true_class] || (v[i] == v[true_class] && k < true_class)) ++ahead;
  }
  return ahead < 2;
}

}  // namespace aia::eval
