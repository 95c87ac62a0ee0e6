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
#include "validate/validate.hpp"

#include <cmath>
#include <map>
#include <optional>

#include "common/error.hpp"
#include "common/util.hpp"
#include "stats/distributions.hpp"

namespace aia::validate {
namespace {

void check(const SummaryStat& s) {
  if (s.n < 2) fail(ErrorCode::kInvalidArgument, "summary '" + s.label + "' needs n >= 2");
  if (!(s.std >= 0.0) || !std::isfinite(s.mean)) {
    fail(ErrorCode::kInvalidArgument, "summary '" + s.label + "' has an invalid mean or std");
  }
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

HypothesisResult two_sample_ttest(const SummaryStat& a, const SummaryStat& b, double alpha,
                                  Variance variance) {
  check(a);
  check(b);
  HypothesisResult r;
  const double na = a.n, nb = b.n;
  const double va = a.std * a.std, vb = b.std * b.std;
  const double diff = a.mean - b.mean;
  double se2 = 0.0;
  if (variance == Variance::kPooled) {
    r.df = na + nb - 2.0;
    const double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / r.df;
    se2 = sp2 * (1.0 / na + 1.0 / nb);
  } else {
    const double qa = va / na, qb = vb / nb;
    se2 = qa + qb;
    const double denom = qa * qa / (na - 1.0) + qb * qb / (nb - 1.0);
    r.df = denom > 0.0 ? se2 * se2 / denom : na + nb - 2.0;
  }
  if (se2 <= 0.0) {
    r.degenerate = true;
    r.t = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
    r.p_value = diff == 0.0 ? 1.0 : 0.0;
  } else {
    r.t = diff / std::sqrt(se2);
    r.p_value = stats::student_t_two_sided_p(r.t, r.df);
  }
  r.rejected = r.p_value < alpha;
  return r;
}

const FamilyTally* HypothesisLedger::family(std::string_view name) const {
  for (const auto& f : families) {
    if (f.family == name) return &f;
  }
  return nullptr;
}

std::string HypothesisLedger::to_csv() const {
  std::string out =
      "family,attribute,label_a,label_b,t,df,p_value,rejected,degenerate,welch_t,welch_df,"
      "welch_p_value,welch_rejected\n";
  for (const auto& r : rows) {
    out += csv_field(r.pair.family) + "," + csv_field(r.pair.attribute) + "," +
           csv_field(r.pair.a.label) + "," + csv_field(r.pair.b.label) + "," +
           format_double(r.pooled.t) + "," + format_double(r.pooled.df) + "," +
           format_double(r.pooled.p_value) + "," + (r.pooled.rejected ? "1" : "0") + "," +
           (r.pooled.degenerate ? "1" : "0") + "," + format_double(r.welch.t) + "," +
           format_double(r.welch.df) + "," + format_double(r.welch.p_value) + "," +
           (r.welch.rejected ? "1" : "0") + "\n";
  }
  return out;
}

std::string HypothesisLedger::summary_csv() const {
  std::string out = "family,rejected,total,max_p_value,welch_rejected\n";
  for (const auto& f : families) {
    out += f.family + "," + std::to_string(f.rejected) + "," + std::to_string(f.total) + "," +
           format_double(f.max_p) + "," + std::to_string(f.welch_rejected) + "\n";
  }
  return out;
}

Json HypothesisLedger::to_json() const {
  Json rj = Json::array();
  for (const auto& r : rows) {
    auto stat = [](const SummaryStat& s) {
      return Json{{"label", s.label}, {"mean", s.mean}, {"std", s.std}, {"n", s.n}};
    };
    auto res = [](const HypothesisResult& h) {
      return Json{{"t", h.t},
                  {"df", h.df},
                  {"p_value", h.p_value},
                  {"rejected", h.rejected},
                  {"degenerate", h.degenerate}};
    };
    rj.push_back({{"family", r.pair.family},
                  {"attribute", r.pair.attribute},
                  {"a", stat(r.pair.a)},
                  {"b", stat(r.pair.b)},
                  {"pooled", res(r.pooled)},
                  {"welch", res(r.welch)}});
  }
  Json fj = Json::array();
  for (const auto& f : families) {
    fj.push_back({{"family", f.family},
                  {"rejected", f.rejected},
                  {"total", f.total},
                  {"max_p_value", f.max_p},
                  {"welch_rejected", f.welch_rejected}});
  }
  // Infinite t values (degenerate rows) are not valid JSON numbers.
  for (auto& r : rj) {
    for (const char* k : {"pooled", "welch"}) {
      if (!std::isfinite(r[k]["t"].get<double>())) {
        r[k]["t"] = r[k]["t"].get<double>() > 0 ? "inf" : "-inf";
      }
    }
  }
  return {{"alpha", alpha}, {"test", "two_sample_student_t_pooled"}, {"families", fj}, {"rows", rj}};
}

HypothesisLedger hypothesis_table(const std::vector<StatPair>& pairs, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::kDomain, "alpha must lie in (0, 1)");
  HypothesisLedger ledger;
  ledger.alpha = alpha;
  std::map<std::string, size_t> index;
  for (const auto& p : pairs) {
    LedgerRow row{p, two_sample_ttest(p.a, p.b, alpha, Variance::kPooled),
                  two_sample_ttest(p.a, p.b, alpha, Variance::kWelch)};
    auto [it, inserted] = index.emplace(p.family, ledger.families.size());
    if (inserted) ledger.families.push_back({p.family});
    FamilyTally& t = ledger.families[it->second];
    ++t.total;
    t.rejected += row.pooled.rejected ? 1 : 0;
    t.welch_rejected += row.welch.rejected ? 1 : 0;
    t.max_p = std::max(t.max_p, row.pooled.p_value);
    ledger.rows.push_back(std::move(row));
  }
  return ledger;
}

std::vector<StatPair> read_pairs_csv(std::string_view text) {
  std::vector<StatPair> out;
  const auto lines = split(text, '\n');
  bool header = true;
  size_t line_no = 0;
  for (const auto& raw : lines) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (header) {
      header = false;
      if (f.size() != 10 || trim(f[0]) != "family") {
        fail(ErrorCode::kSchema, "pairs file header must be family,attribute,label_a,mean_a,"
                                 "std_a,n_a,label_b,mean_b,std_b,n_b");
      }
      continue;
    }
    if (f.size() != 10) {
      fail(ErrorCode::kSchema, "pairs file line " + std::to_string(line_no) + ": expected 10 fields");
    }
    try {
      StatPair p;
      p.family = trim(f[0]);
      p.attribute = trim(f[1]);
      p.a = {trim(f[2]), parse_double(trim(f[3])), parse_double(trim(f[4])),
             static_cast<int>(parse_int(trim(f[5])))};
      p.b = {trim(f[6]), parse_double(trim(f[7])), parse_double(trim(f[8])),
             static_cast<int>(parse_int(trim(f[9])))};
      out.push_back(std::move(p));
    } catch (const Error& e) {
      fail(ErrorCode::kSchema, "pairs file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) fail(ErrorCode::kEmptyInput, "pairs file holds no pairs");
  return out;
}

std::string write_pairs_csv(const std::vector<StatPair>& pairs) {
  std::string out = "family,attribute,label_a,mean_a,std_a,n_a,label_b,mean_b,std_b,n_b\n";
  for (const auto& p : pairs) {
    out += p.family + "," + p.attribute + "," + p.a.label + "," + format_double(p.a.mean) + "," +
           format_double(p.a.std) + "," + std::to_string(p.a.n) + "," + p.b.label + "," +
           format_double(p.b.mean) + "," + format_double(p.b.std) + "," + std::to_string(p.b.n) +
           "\n";
  }
  return out;
}

std::vector<StatPair> pairs_from_tables(const Json& tables) {
  try {
    std::vector<StatPair> out;
    const auto& attrs = tables.at("attributes");
    auto stat = [](const Json& table, const std::string& attr, const std::string& column) {
      const auto& cols = table.at("columns");
      for (size_t i = 0; i < cols.size(); ++i) {
        if (cols[i].get<std::string>() == column) {
          const auto& cell = table.at("rows").at(attr).at(i);
          return SummaryStat{column, cell.at(0).get<double>(), cell.at(1).get<double>(),
                             table.at("n").get<int>()};
        }
      }
      fail(ErrorCode::kMissingPair, "no column '" + column + "' in table");
    };
    const auto& best = tables.at("best_model");
    const auto& dummy_col = best.at("dummy").get<std::string>();
    for (const auto& a : attrs) {
      const std::string attr = a.get<std::string>();
      const auto& t = best.at("table");
      if (!t.at("rows").contains(attr)) continue;
      // Best model = highest mean among the non-dummy columns.
      std::optional<SummaryStat> top;
      for (const auto& c : t.at("columns")) {
        const std::string col = c.get<std::string>();
        if (col == dummy_col) continue;
        SummaryStat s = stat(t, attr, col);
        if (!top || s.mean > top->mean) top = s;
      }
      out.push_back({std::string(kDummyVsBest), attr, stat(t, attr, dummy_col), *top});
    }
    const auto& one = tables.at("one_match");
    for (const auto& a : attrs) {
      const std::string attr = a.get<std::string>();
      const auto& t = one.at("table");
      if (!t.at("rows").contains(attr)) continue;
      const auto dummy = stat(t, attr, one.at("dummy").get<std::string>());
      out.push_back({std::string(kDummyVsNaive), attr, dummy,
                     stat(t, attr, one.at("naive").get<std::string>())});
      out.push_back({std::string(kDummyVsExpert), attr, dummy,
                     stat(t, attr, one.at("expert").get<std::string>())});
    }
    const auto& ind = tables.at("indiscriminate");
    for (const auto& a : attrs) {
      const std::string attr = a.get<std::string>();
      const auto& t = ind.at("table");
      if (!t.at("rows").contains(attr)) continue;
      out.push_back({std::string(kSophVsIndisc), attr,
                     stat(t, attr, ind.at("sophisticated").get<std::string>()),
                     stat(t, attr, ind.at("indiscriminate").get<std::string>())});
    }
    // Families grouped in ledger order.
    std::vector<StatPair> ordered;
    for (auto fam : {kDummyVsBest, kDummyVsNaive, kDummyVsExpert, kSophVsIndisc}) {
      for (const auto& p : out) {
        if (p.family == fam) ordered.push_back(p);
      }
    }
    return ordered;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchema, std::string("tables file: ") + e.what());
  }
}

std::vector<StatPair> pairs_from_reports(const eval::AttackReport* simple,
                                         const eval::AttackReport* one_match,
                                         const eval::AttackReport* indiscriminate) {
  const std::string dummy(models::algorithm_name(models::Algorithm::kDummyStratified));
  auto to_stat = [](const eval::MetricCell& c, const std::string& label) {
    return SummaryStat{label, c.mean, c.std, static_cast<int>(c.n_runs)};
  };
  auto attrs_of = [](const eval::AttackReport& r, std::string_view dataset) {
    std::vector<std::string> out;
    for (const auto& c : r.cells) {
      if (c.dataset == dataset && std::find(out.begin(), out.end(), c.attribute) == out.end()) {
        out.push_back(c.attribute);
      }
    }
    return out;
  };
  auto best_of = [&](const eval::AttackReport& r, std::string_view dataset,
                     const std::string& attr) -> std::optional<eval::MetricCell> {
    std::optional<eval::MetricCell> top;
    for (const auto& c : r.cells) {
      if (c.dataset != dataset || c.attribute != attr || c.model == dummy || c.metric != "macro_f1") {
        continue;
      }
      if (!top || c.mean > top->mean) top = c;
    }
    return top;
  };
  auto need = [](const eval::MetricCell* c, const std::string& what) -> const eval::MetricCell& {
    if (!c) fail(ErrorCode::kMissingPair, "cannot resolve " + what);
    return *c;
  };
  std::vector<StatPair> out;
  if (simple) {
    for (const auto& attr : attrs_of(*simple, "P")) {
      const auto& d = need(simple->find("P", attr, dummy, "macro_f1"), "dummy cell for " + attr);
      const auto best = best_of(*simple, "P", attr);
      if (!best) fail(ErrorCode::kMissingPair, "no trained model cell for " + attr);
      out.push_back({std::string(kDummyVsBest), attr, to_stat(d, "dummy"),
                     to_stat(*best, best->model)});
    }
  }
  if (one_match) {
    for (const auto& attr : attrs_of(*one_match, "M")) {
      const auto& d = need(one_match->find("M", attr, dummy, "macro_f1"), "dummy cell for " + attr);
      const auto naive = best_of(*one_match, "M", attr);
      const auto expert = best_of(*one_match, "Mbar", attr);
      if (!naive || !expert) fail(ErrorCode::kMissingPair, "naive or expert cell missing for " + attr);
      out.push_back({std::string(kDummyVsNaive), attr, to_stat(d, "dummy"), to_stat(*naive, "naive")});
      out.push_back({std::string(kDummyVsExpert), attr, to_stat(d, "dummy"), to_stat(*expert, "expert")});
    }
  }
  if (indiscriminate) {
    for (const auto& attr : attrs_of(*indiscriminate, "Mbar")) {
      const auto& t1 = need(indiscriminate->find("Mbar", attr, "selected", "top1_accuracy"),
                            "top-1 cell for " + attr);
      const auto& t2 = need(indiscriminate->find("Mbar", attr, "selected", "top2_accuracy"),
                            "top-2 cell for " + attr);
      out.push_back({std::string(kSophVsIndisc), attr, to_stat(t1, "sophisticated"),
                     to_stat(t2, "indiscriminate")});
    }
  }
  if (out.empty()) fail(ErrorCode::kMissingPair, "no report given to build pairs from");
  std::vector<StatPair> ordered;
  for (auto fam : {kDummyVsBest, kDummyVsNaive, kDummyVsExpert, kSophVsIndisc}) {
    for (const auto& p : out) {
      if (p.family == fam) ordered.push_back(p);
    }
  }
  return ordered;
}

}  // namespace aia::validate
