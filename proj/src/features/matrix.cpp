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
#include "features/matrix.hpp"

#include <filesystem>
#include <limits>

#include "common/error.hpp"
#include "common/util.hpp"
#include "json.hpp"

namespace aia::features {
namespace {

using Json = nlohmann::json;

bool is_numeric(ColumnKind k) { return k != ColumnKind::kCategorical; }

ColumnKind kind_from_name(std::string_view s) {
  if (s == "numeric") return ColumnKind::kNumeric;
  if (s == "categorical") return ColumnKind::kCategorical;
  if (s == "boolean") return ColumnKind::kBoolean;
  fail(ErrorCode::kSchema, "unknown column kind '" + std::string(s) + "'");
}

std::string schema_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".schema.json");
  return p.string();
}

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kP: return "P";
    case Variant::kM: return "M";
    case Variant::kMbar: return "Mbar";
  }
  return "P";
}

Variant variant_from_name(std::string_view s) {
  if (s == "P") return Variant::kP;
  if (s == "M") return Variant::kM;
  if (s == "Mbar") return Variant::kMbar;
  fail(ErrorCode::kInvalidArgument, "variant must be P, M or Mbar, got '" + std::string(s) + "'");
}

std::string_view column_kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::kNumeric: return "numeric";
    case ColumnKind::kCategorical: return "categorical";
    case ColumnKind::kBoolean: return "boolean";
  }
  return "numeric";
}

void FeatureRow::num(std::string name, double v, bool augmented) {
  columns.push_back({std::move(name), ColumnKind::kNumeric, augmented});
  cells.emplace_back(v);
}

void FeatureRow::flag(std::string name, bool v, bool augmented) {
  columns.push_back({std::move(name), ColumnKind::kBoolean, augmented});
  cells.emplace_back(v ? 1.0 : 0.0);
}

void FeatureRow::cat(std::string name, std::string v, bool augmented) {
  // Categories are written unquoted to CSV.
  for (char& ch : v) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = '_';
  }
  columns.push_back({std::move(name), ColumnKind::kCategorical, augmented});
  cells.emplace_back(std::move(v));
}

std::optional<size_t> FeatureMatrix::column_index(std::string_view name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::string FeatureMatrix::schema_hash() const {
  std::string s;
  for (const auto& c : columns) {
    s += c.name;
    s += ':';
    s += column_kind_name(c.kind);
    s += c.augmented ? "+" : "";
    s += ';';
  }
  return hex64(fnv1a64(s));
}

void FeatureMatrix::append(const FeatureRow& row, uint64_t owner, std::optional<int64_t> match) {
  if (columns.empty() && rows() == 0) {
    columns = row.columns;
    numeric.assign(columns.size(), {});
    categorical.assign(columns.size(), {});
  } else if (row.columns != columns) {
    fail(ErrorCode::kSchemaMismatch, "row columns differ from the matrix schema");
  }
  for (size_t c = 0; c < columns.size(); ++c) {
    if (is_numeric(columns[c].kind)) {
      numeric[c].push_back(std::get<double>(row.cells[c]));
    } else {
      categorical[c].push_back(std::get<std::string>(row.cells[c]));
    }
  }
  row_owner.push_back(owner);
  if (match) row_match.push_back(*match);
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<size_t>& idx) const {
  FeatureMatrix out;
  out.variant = variant;
  out.columns = columns;
  out.variant_seed = variant_seed;
  out.config_hash = config_hash;
  out.numeric.assign(columns.size(), {});
  out.categorical.assign(columns.size(), {});
  for (size_t c = 0; c < columns.size(); ++c) {
    if (is_numeric(columns[c].kind)) {
      out.numeric[c].reserve(idx.size());
      for (size_t r : idx) out.numeric[c].push_back(numeric[c][r]);
    } else {
      out.categorical[c].reserve(idx.size());
      for (size_t r : idx) out.categorical[c].push_back(categorical[c][r]);
    }
  }
  for (size_t r : idx) {
    out.row_owner.push_back(row_owner[r]);
    if (!row_match.empty()) out.row_match.push_back(row_match[r]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<size_t>& cols) const {
  FeatureMatrix out;
  out.variant = variant;
  out.variant_seed = variant_seed;
  out.config_hash = config_hash;
  out.row_owner = row_owner;
  out.row_match = row_match;
  for (size_t c : cols) {
    out.columns.push_back(columns.at(c));
    out.numeric.push_back(numeric[c]);
    out.categorical.push_back(categorical[c]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::hconcat(const FeatureMatrix& left, const FeatureMatrix& right) {
  if (left.row_owner != right.row_owner || left.row_match != right.row_match) {
    fail(ErrorCode::kSchemaMismatch, "cannot concatenate matrices with different rows");
  }
  FeatureMatrix out = left;
  for (size_t c = 0; c < right.cols(); ++c) {
    if (out.column_index(right.columns[c].name)) {
      fail(ErrorCode::kSchemaMismatch, "duplicate column '" + right.columns[c].name + "'");
    }
    out.columns.push_back(right.columns[c]);
    out.numeric.push_back(right.numeric[c]);
    out.categorical.push_back(right.categorical[c]);
  }
  return out;
}

std::string to_csv(const FeatureMatrix& m) {
  std::string out = "owner";
  const bool has_match = m.variant != Variant::kP;
  if (has_match) out += ",match_id";
  for (const auto& c : m.columns) {
    out += ',';
    out += c.name;
  }
  out += '\n';
  for (size_t r = 0; r < m.rows(); ++r) {
    out += std::to_string(m.row_owner[r]);
    if (has_match) {
      out += ',';
      out += std::to_string(m.row_match[r]);
    }
    for (size_t c = 0; c < m.cols(); ++c) {
      out += ',';
      if (is_numeric(m.columns[c].kind)) {
        out += format_double(m.numeric[c][r]);
      } else {
        out += m.categorical[c][r];
      }
    }
    out += '\n';
  }
  return out;
}

std::string schema_json(const FeatureMatrix& m) {
  Json cols = Json::array();
  for (const auto& c : m.columns) {
    cols.push_back({{"name", c.name},
                    {"kind", std::string(column_kind_name(c.kind))},
                    {"augmented", c.augmented}});
  }
  Json doc = {{"format_version", 1},
              {"variant", std::string(variant_name(m.variant))},
              {"columns", cols},
              {"rows", m.rows()},
              {"schema_hash", m.schema_hash()},
              {"config_hash", m.config_hash}};
  doc["variant_seed"] = m.variant_seed ? Json(*m.variant_seed) : Json();
  return doc.dump(2) + "\n";
}

FeatureMatrix from_csv(std::string_view csv, std::string_view schema) {
  Json doc = Json::parse(schema.begin(), schema.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(ErrorCode::kSchema, "feature schema is not JSON");
  FeatureMatrix m;
  try {
    m.variant = variant_from_name(doc.at("variant").get<std::string>());
    for (const auto& c : doc.at("columns")) {
      m.columns.push_back({c.at("name").get<std::string>(),
                           kind_from_name(c.at("kind").get<std::string>()),
                           c.value("augmented", false)});
    }
    m.config_hash = doc.value("config_hash", "");
    if (doc.contains("variant_seed") && !doc["variant_seed"].is_null()) {
      m.variant_seed = doc["variant_seed"].get<uint64_t>();
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchema, std::string("feature schema: ") + e.what());
  }
  m.numeric.assign(m.cols(), {});
  m.categorical.assign(m.cols(), {});
  const bool has_match = m.variant != Variant::kP;
  const size_t lead = has_match ? 2 : 1;

  auto lines = split(csv, '\n');
  if (lines.empty()) fail(ErrorCode::kSchema, "feature CSV is empty");
  const auto header = split(lines[0], ',');
  if (header.size() != lead + m.cols()) {
    fail(ErrorCode::kSchema, "feature CSV header does not match its schema");
  }
  for (size_t c = 0; c < m.cols(); ++c) {
    if (header[lead + c] != m.columns[c].name) {
      fail(ErrorCode::kSchema, "feature CSV column " + std::to_string(lead + c) + " is '" +
                                   header[lead + c] + "', schema says '" + m.columns[c].name + "'");
    }
  }
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = split(lines[i], ',');
    if (cells.size() != header.size()) {
      fail(ErrorCode::kSchema, "feature CSV line " + std::to_string(i + 1) + " has " +
                                   std::to_string(cells.size()) + " cells");
    }
    m.row_owner.push_back(static_cast<uint64_t>(parse_int(cells[0])));
    if (has_match) m.row_match.push_back(parse_int(cells[1]));
    for (size_t c = 0; c < m.cols(); ++c) {
      if (is_numeric(m.columns[c].kind)) {
        m.numeric[c].push_back(parse_double(cells[lead + c]));
      } else {
        m.categorical[c].push_back(cells[lead + c]);
      }
    }
  }
  if (doc.contains("schema_hash") && doc["schema_hash"].get<std::string>() != m.schema_hash()) {
    fail(ErrorCode::kSchemaMismatch, "feature schema hash does not match its column list");
  }
  return m;
}

void save_matrix(const FeatureMatrix& m, const std::string& csv_path) {
  write_file_atomic(csv_path, to_csv(m));
  write_file_atomic(schema_path_for(csv_path), schema_json(m));
}

FeatureMatrix load_matrix(const std::string& csv_path) {
  return from_csv(read_file(csv_path), read_file(schema_path_for(csv_path)));
}

}  // namespace aia::features
