#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "ideaevo/error.hpp"

namespace ideaevo {

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline SampleSummary summarize(std::span<const double> xs) {
  detail::require(!xs.empty(), "summarize: empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());

  SampleSummary s;
  s.count = sorted.size();
  const double n = static_cast<double>(s.count);
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (s.count > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  const std::size_t mid = s.count / 2;
  s.median = s.count % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

/// 1-based ranks with ties sharing the mean of the ranks they span.
inline std::vector<double> midranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

struct MannWhitneyResult {
  double u = 0.0;        // U of the first sample
  double u_other = 0.0;  // U of the second sample; u + u_other = |a| |b|
  double z = 0.0;
  double p_two_sided = 1.0;
};

/// Mann-Whitney U with midranks, tie-corrected variance, and a 0.5
/// continuity correction; p from the normal approximation.
inline MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b) {
  detail::require(!a.empty() && !b.empty(), "mann_whitney: both samples must be nonempty");
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  const auto ranks = midranks(all);

  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double r1 = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);

  MannWhitneyResult res;
  res.u = r1 - n1 * (n1 + 1.0) / 2.0;
  res.u_other = n1 * n2 - res.u;

  // sum of (t^3 - t) over tie groups
  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_sum += t * t * t - t;
    i = j;
  }

  const double n = n1 + n2;
  const double mean = 0.5 * n1 * n2;
  const double var = n > 1.0 ? n1 * n2 / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0))) : 0.0;
  if (var <= 0.0) return res;  // every value tied: no evidence either way

  const double diff = std::max(std::abs(res.u - mean) - 0.5, 0.0);
  res.z = diff / std::sqrt(var);
  res.p_two_sided = std::clamp(std::erfc(res.z / std::sqrt(2.0)), std::numeric_limits<double>::min(), 1.0);
  return res;
}

// Spearman rank correlation (Pearson on midranks).
inline double spearman(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "spearman: need two equal-length samples of size >= 2");
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  detail::require(sxx > 0.0 && syy > 0.0, "spearman: constant input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace ideaevo
