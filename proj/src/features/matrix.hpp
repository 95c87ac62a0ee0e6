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

// Column-major feature table shared by the per-player and per-match datasets.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aia::features {

enum class Variant { kP, kM, kMbar };
enum class ColumnKind { kNumeric, kCategorical, kBoolean };

std::string_view variant_name(Variant v);
Variant variant_from_name(std::string_view s);
std::string_view column_kind_name(ColumnKind k);

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // Added by the distillation step on top of the plain per-match set.
  bool augmented = false;

  bool operator==(const Column&) const = default;
};

using Cell = std::variant<double, std::string>;

// One row under construction: named cells in emission order.
struct FeatureRow {
  std::vector<Column> columns;
  std::vector<Cell> cells;

  void num(std::string name, double v, bool augmented = false);
  void flag(std::string name, bool v, bool augmented = false);
  void cat(std::string name, std::string v, bool augmented = false);
};

struct FeatureMatrix {
  Variant variant = Variant::kP;
  std::vector<Column> columns;
  // numeric[c] is filled for numeric and boolean columns, categorical[c] for
  // categorical ones; the other vector stays empty.
  std::vector<std::vector<double>> numeric;
  std::vector<std::vector<std::string>> categorical;
  std::vector<uint64_t> row_owner;
  std::vector<int64_t> row_match;  // empty for the per-player variant
  std::optional<uint64_t> variant_seed;
  std::string config_hash;

  size_t rows() const { return row_owner.size(); }
  size_t cols() const { return columns.size(); }
  std::optional<size_t> column_index(std::string_view name) const;

  // Hash of the ordered (name, kind) list.
  std::string schema_hash() const;

  // Appends a row; the first row fixes the column list, later rows must match.
  void append(const FeatureRow& row, uint64_t owner, std::optional<int64_t> match = std::nullopt);

  FeatureMatrix select_rows(const std::vector<size_t>& rows) const;
  // Keeps the named columns in the given order.
  FeatureMatrix select_columns(const std::vector<size_t>& cols) const;
  // Column-wise concatenation of row-aligned matrices.
  static FeatureMatrix hconcat(const FeatureMatrix& left, const FeatureMatrix& right);
};

std::string to_csv(const FeatureMatrix& m);
std::string schema_json(const FeatureMatrix& m);
// Throws kSchema on malformed input or a CSV/schema mismatch.
FeatureMatrix from_csv(std::string_view csv, std::string_view schema);

void save_matrix(const FeatureMatrix& m, const std::string& csv_path);
FeatureMatrix load_matrix(const std::string& csv_path);

}  // namespace aia::features
