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

#include <span>
#include <vector>

namespace aia::eval {

struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  // Macro averages over the scored classes; for binary problems the
  // positive-class values are in positive_precision / positive_recall.
  double precision = 0.0;
  double recall = 0.0;
  double positive_precision = 0.0;
  double positive_recall = 0.0;
  size_t predicted_positive = 0;
};

// Classes scored are those appearing in y_true or y_pred. `n_classes` only
// sizes the confusion matrix. Throws kLengthMismatch / kEmptyInput.
Metrics compute_metrics(std::span<const int> y_true, std::span<const int> y_pred, int n_classes);

// Per-class F1 over the same class set, indexed by class code; classes that
// are not scored get -1.
std::vector<double> per_class_f1(std::span<const int> y_true, std::span<const int> y_pred,
                                 int n_classes);

// Index of the largest entry; ties go to the lower index (schema order).
int argmax(std::span<const double> v);

// 1 if the true class is among the two largest entries (schema-order ties).
bool in_top2(std::span<const double> v, int true_class);

}  // namespace aia::eval
