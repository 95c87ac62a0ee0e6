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

// Slow, independent reimplementations used to check the library. Nothing
// here calls into the code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace aia::oracle {

struct Assoc {
  double value = 0.0;
  double p_value = 1.0;
  bool degenerate = false;
};

// Mid ranks by counting: rank = (#smaller) + (#equal + 1) / 2.
inline std::vector<long double> ranks(const std::vector<double>& v) {
  std::vector<long double> r(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    size_t less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = static_cast<long double>(less) + (static_cast<long double>(equal) + 1.0L) / 2.0L;
  }
  return r;
}

// Tail of Student's t by numerical integration of the density.
inline double t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const long double nu = df;
  const long double c = std::exp(boost::math::lgamma((nu + 1.0L) / 2.0L) -
                                 boost::math::lgamma(nu / 2.0L)) /
                        std::sqrt(nu * 3.14159265358979323846264338327950288L);
  auto density = [&](long double x) { return c * std::pow(1.0L + x * x / nu, -(nu + 1.0L) / 2.0L); };
  boost::math::quadrature::exp_sinh<long double> integrator;
  const long double tail = integrator.integrate(density, std::fabs(static_cast<long double>(t)),
                                                std::numeric_limits<long double>::infinity());
  return static_cast<double>(std::min(1.0L, 2.0L * tail));
}

inline double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  const long double k = df / 2.0L;
  const long double lc = -k * std::log(2.0L) - boost::math::lgamma(k);
  auto density = [&](long double u) {
    return std::exp(lc + (k - 1.0L) * std::log(u) - u / 2.0L);
  };
  boost::math::quadrature::exp_sinh<long double> integrator;
  return static_cast<double>(
      integrator.integrate(density, static_cast<long double>(x), std::numeric_limits<long double>::infinity()));
}

inline Assoc spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += rx[i];
    sy += ry[i];
    sxx += rx[i] * rx[i];
    syy += ry[i] * ry[i];
    sxy += rx[i] * ry[i];
  }
  const long double vx = n * sxx - sx * sx, vy = n * syy - sy * sy;
  Assoc out;
  if (vx <= 1e-18L || vy <= 1e-18L) {
    out.degenerate = true;
    return out;
  }
  const long double r = (n * sxy - sx * sy) / std::sqrt(vx * vy);
  out.value = static_cast<double>(std::clamp(r, -1.0L, 1.0L));
  if (std::fabs(out.value) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.value * std::sqrt((n - 2.0) / (1.0 - out.value * out.value));
    out.p_value = t_two_sided_p(t, static_cast<double>(n) - 2.0);
  }
  return out;
}

inline Assoc cramers_v(const std::vector<int64_t>& x, const std::vector<int64_t>& y, bool bias_corrected) {
  const std::set<int64_t> rs(x.begin(), x.end()), cs(y.begin(), y.end());
  Assoc out;
  if (rs.size() < 2 || cs.size() < 2) {
    out.degenerate = true;
    return out;
  }
  const long double n = static_cast<long double>(x.size());
  long double chi2 = 0.0L;
  for (int64_t a : rs) {
    for (int64_t b : cs) {
      long double obs = 0, ra = 0, cb = 0;
      for (size_t i = 0; i < x.size(); ++i) {
        obs += x[i] == a && y[i] == b;
        ra += x[i] == a;
        cb += y[i] == b;
      }
      const long double e = ra * cb / n;
      chi2 += (obs - e) * (obs - e) / e;
    }
  }
  const long double r = static_cast<long double>(rs.size()), c = static_cast<long double>(cs.size());
  out.p_value = chi_square_sf(static_cast<double>(chi2), static_cast<double>((r - 1) * (c - 1)));
  if (!bias_corrected) {
    out.value = static_cast<double>(std::sqrt(chi2 / (n * (std::min(r, c) - 1.0L))));
  } else {
    const long double phi2 = std::max(0.0L, chi2 / n - (r - 1) * (c - 1) / (n - 1));
    const long double rt = r - (r - 1) * (r - 1) / (n - 1), ct = c - (c - 1) * (c - 1) / (n - 1);
    const long double m = std::min(rt, ct) - 1.0L;
    out.value = m > 0 ? static_cast<double>(std::sqrt(phi2 / m)) : 0.0;
  }
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

// Wilson editing with an all-pairs distance table. Rows are vectors of
// features; returns the indices kept. Classes that editing would shrink
// below two members are left untouched.
inline std::vector<size_t> enn_keep(const std::vector<std::vector<double>>& rows,
                                    const std::vector<int>& y, size_t k) {
  const size_t n = rows.size();
  std::vector<std::vector<long double>> dist(n, std::vector<long double>(n, 0.0L));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      long double s = 0;
      for (size_t d = 0; d < rows[i].size(); ++d) {
        const long double diff = rows[i][d] - rows[j][d];
        s += diff * diff;
      }
      dist[i][j] = s;
    }
  }
  std::vector<bool> drop(n, false);
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::pair<long double, size_t>> order;
    for (size_t j = 0; j < n; ++j) {
      if (j != i) order.emplace_back(dist[i][j], j);
    }
    std::sort(order.begin(), order.end());
    std::map<int, size_t> votes;
    for (size_t m = 0; m < std::min(k, order.size()); ++m) ++votes[y[order[m].second]];
    for (const auto& [label, v] : votes) {
      if (label != y[i] && v > votes[y[i]]) drop[i] = true;
    }
  }
  std::map<int, size_t> members, dropped;
  for (size_t i = 0; i < n; ++i) {
    ++members[y[i]];
    dropped[y[i]] += drop[i];
  }
  std::vector<size_t> keep;
  for (size_t i = 0; i < n; ++i) {
    const bool shielded = members[y[i]] >= 2 && members[y[i]] - dropped[y[i]] < 2;
    if (!drop[i] || shielded) keep.push_back(i);
  }
  return keep;
}

// Pooled two-sample t from summaries, with the quadrature tail.
inline double pooled_t_p(double m1, double s1, double n1, double m2, double s2, double n2) {
  const double sp2 = ((n1 - 1) * s1 * s1 + (n2 - 1) * s2 * s2) / (n1 + n2 - 2);
  const double t = (m1 - m2) / std::sqrt(sp2 * (1 / n1 + 1 / n2));
  return t_two_sided_p(t, n1 + n2 - 2);
}

}  // namespace aia::oracle
