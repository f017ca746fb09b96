/*
 * src/pipeline/stats.cpp
 *
 * Copyright 2026 The Fabric Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fabric/pipeline/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "fabric/common/error.hpp"

namespace fabric::pipeline {

namespace {

void check(std::span<const double> a, std::span<const double> b, std::size_t min_n) {
  if (a.size() < min_n || b.size() < min_n) {
    throw Error(Errc::invalid_window, "each sample needs at least " + std::to_string(min_n) + " values");
  }
  for (auto s : {a, b}) {
    for (double x : s) {
      if (!std::isfinite(x)) throw Error(Errc::invalid_window, "non-finite sample value");
    }
  }
}

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double var_of(std::span<const double> xs, double mean) {
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

StatTestResult result(std::string name, double stat, double p, double alpha) {
  p = std::clamp(p, 0.0, 1.0);
  return StatTestResult{std::move(name), stat, p, p < alpha};
}

// Pooled sample sorted by value; `label` is true for the first sample.
struct Pooled {
  std::vector<double> value;
  std::vector<bool> label;
};

Pooled pool(std::span<const double> a, std::span<const double> b) {
  std::vector<std::pair<double, bool>> all;
  for (double x : a) all.emplace_back(x, true);
  for (double x : b) all.emplace_back(x, false);
  std::stable_sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  Pooled p;
  for (const auto& [v, l] : all) {
    p.value.push_back(v);
    p.label.push_back(l);
  }
  return p;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

StatTestResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  check(a, b, 2);
  const double ma = mean_of(a), mb = mean_of(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double va = var_of(a, ma) / na, vb = var_of(b, mb) / nb;
  const double se2 = va + vb;
  if (se2 == 0) {
    // Both samples constant: equal means are indistinguishable, distinct
    // means are separated with certainty.
    if (ma == mb) return result("welch_t", 0.0, 1.0, alpha);
    return result("welch_t", std::copysign(std::numeric_limits<double>::infinity(), ma - mb), 0.0, alpha);
  }
  const double t = (ma - mb) / std::sqrt(se2);
  const double df = se2 * se2 / (va * va / (na - 1) + vb * vb / (nb - 1));
  const boost::math::students_t law(df);
  const double p = 2.0 * boost::math::cdf(boost::math::complement(law, std::fabs(t)));
  return result("welch_t", t, p, alpha);
}

StatTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, double alpha) {
  check(a, b, 1);
  const auto p = pool(a, b);
  const std::size_t n = p.value.size();
  const std::size_t na = a.size();
  // Doubled midranks keep every rank sum an integer.
  std::vector<std::int64_t> r2(n);
  std::vector<std::size_t> tie_sizes;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && p.value[j + 1] == p.value[i]) ++j;
    for (std::size_t k = i; k <= j; ++k) r2[k] = static_cast<std::int64_t>(i + 1 + j + 1);
    tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  std::int64_t w2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.label[i]) w2 += r2[i];
  }
  const double base = static_cast<double>(na) * static_cast<double>(na + 1) / 2.0;
  const double u = static_cast<double>(w2) / 2.0 - base;
  // E[2W] = na (n + 1).
  const std::int64_t e2 = static_cast<std::int64_t>(na * (n + 1));
  const std::int64_t dev = std::llabs(w2 - e2);

  if (n <= 100) {
    const std::int64_t total = std::accumulate(r2.begin(), r2.end(), std::int64_t{0});
    // ways[k][s]: subsets of size k with doubled rank sum s.
    std::vector<std::vector<double>> ways(na + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
    ways[0][0] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = std::min(na, i + 1); k >= 1; --k) {
        auto& dst = ways[k];
        const auto& src = ways[k - 1];
        for (std::int64_t s = total; s >= r2[i]; --s) dst[s] += src[s - r2[i]];
      }
    }
    double hit = 0, all = 0;
    for (std::int64_t s = 0; s <= total; ++s) {
      const double c = ways[na][static_cast<std::size_t>(s)];
      all += c;
      if (std::llabs(s - e2) >= dev) hit += c;
    }
    return result("mann_whitney_u", u, hit / all, alpha);
  }

  const double n1 = static_cast<double>(na), n2 = static_cast<double>(n - na), nn = static_cast<double>(n);
  double tie = 0;
  for (auto t : tie_sizes) tie += std::pow(static_cast<double>(t), 3) - static_cast<double>(t);
  const double var = n1 * n2 / 12.0 * ((nn + 1) - tie / (nn * (nn - 1)));
  if (var <= 0) return result("mann_whitney_u", u, 1.0, alpha);
  const double z = std::max(0.0, static_cast<double>(dev) / 2.0 - 0.5) / std::sqrt(var);
  return result("mann_whitney_u", u, 2.0 * normal_sf(z), alpha);
}

StatTestResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  check(a, b, 1);
  const auto p = pool(a, b);
  const std::size_t n = p.value.size();
  const auto na = static_cast<std::int64_t>(a.size());
  const auto nb = static_cast<std::int64_t>(b.size());
  // The ECDF gap can only peak where a run of equal values ends.
  std::vector<bool> boundary(n + 1, false);
  for (std::size_t k = 1; k <= n; ++k) boundary[k] = k == n || p.value[k] != p.value[k - 1];
  // Work in integer units: |i/na - j/nb| * na * nb = |i*nb - j*na|.
  std::int64_t d_int = 0;
  std::int64_t i = 0, j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    (p.label[k] ? i : j) += 1;
    if (boundary[k + 1]) d_int = std::max<std::int64_t>(d_int, std::llabs(i * nb - j * na));
  }
  const double d = static_cast<double>(d_int) / static_cast<double>(na * nb);

  if (na * nb <= 1'000'000) {
    // Count label orders whose gap stays below d_int at every boundary.
    std::vector<std::vector<double>> paths(static_cast<std::size_t>(na) + 1,
                                           std::vector<double>(static_cast<std::size_t>(nb) + 1, 0.0));
    double total = 1;  // C(na + nb, na)
    for (std::int64_t k = 1; k <= na; ++k) total = total * static_cast<double>(nb + k) / static_cast<double>(k);
    paths[0][0] = 1;
    for (std::int64_t x = 0; x <= na; ++x) {
      for (std::int64_t y = 0; y <= nb; ++y) {
        if (x == 0 && y == 0) continue;
        const auto k = static_cast<std::size_t>(x + y);
        if (boundary[k] && std::llabs(x * nb - y * na) >= d_int) continue;
        double v = 0;
        if (x > 0) v += paths[x - 1][y];
        if (y > 0) v += paths[x][y - 1];
        paths[x][y] = v;
      }
    }
    const double below = paths[na][nb];
    return result("ks_2samp", d, 1.0 - below / total, alpha);
  }

  const double ne = static_cast<double>(na) * static_cast<double>(nb) / static_cast<double>(na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double q = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    q += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return result("ks_2samp", d, q, alpha);
}

bool vote(bool r1, bool r2, bool r3) { return int{r1} + int{r2} + int{r3} >= 2; }

}  // namespace fabric::pipeline
