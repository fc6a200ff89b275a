// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hltv/error.hpp"

namespace hltv {

namespace {

void check_sizes(const char* what, std::size_t a, std::size_t b) {
  if (a != b) {
    fail(ErrorKind::Invalid, std::string(what) + ": length mismatch " +
                                 std::to_string(a) + " vs " + std::to_string(b));
  }
  if (a == 0) fail(ErrorKind::Invalid, std::string(what) + ": empty input");
}

// Trapezoid area between the cumulative capture curve and the diagonal, times
// two. `order` lists sample indices from highest to lowest score; `group_end`
// marks the exclusive end of each tie group within `order`.
double capture_gini(std::span<const double> y_true, const std::vector<std::size_t>& order,
                    const std::vector<std::size_t>& group_end, double total) {
  const std::size_t n = order.size();
  double cum = 0.0, prev = 0.0, area = 0.0;
  std::size_t k = 0;
  for (std::size_t end : group_end) {
    double group_sum = 0.0;
    for (std::size_t i = k; i < end; ++i) group_sum += y_true[order[i]];
    const double share = group_sum / static_cast<double>(end - k) / total;
    for (; k < end; ++k) {
      cum += share;
      area += 0.5 * (prev + cum);
      prev = cum;
    }
  }
  return 2.0 * (area / static_cast<double>(n) - 0.5);
}

std::vector<std::size_t> tie_groups(std::span<const double> key,
                                    const std::vector<std::size_t>& order) {
  std::vector<std::size_t> ends;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    if (i == order.size() || key[order[i]] != key[order[i - 1]]) ends.push_back(i);
  }
  return ends;
}

}  // namespace

double nmae(std::span<const double> y_true, std::span<const double> y_pred) {
  check_sizes("nmae", y_true.size(), y_pred.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    num += std::abs(y_pred[i] - y_true[i]);
    den += y_true[i];
  }
  if (!(den > 0.0)) fail(ErrorKind::Invalid, "nmae: degenerate truth (sum of y_true is 0)");
  return num / den;
}

double auc(std::span<const double> y_true, std::span<const double> scores) {
  check_sizes("auc", y_true.size(), scores.size());
  const std::size_t n = y_true.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (y_true[order[k]] > 0.0) {
        rank_sum += avg_rank;
        ++pos;
      } else {
        ++neg;
      }
    }
    i = j;
  }
  if (pos == 0 || neg == 0) fail(ErrorKind::Invalid, "auc: single-class input");
  const double np = static_cast<double>(pos), nn = static_cast<double>(neg);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double n_gini(std::span<const double> y_true, std::span<const double> y_pred) {
  check_sizes("n_gini", y_true.size(), y_pred.size());
  const std::size_t n = y_true.size();
  const double total = std::accumulate(y_true.begin(), y_true.end(), 0.0);
  if (!(total > 0.0)) fail(ErrorKind::Invalid, "n_gini: degenerate truth (sum of y_true is 0)");
  if (std::all_of(y_true.begin(), y_true.end(), [&](double v) { return v == y_true[0]; })) {
    fail(ErrorKind::Invalid, "n_gini: undefined normalizer (all y_true equal)");
  }
  std::vector<std::size_t> by_pred(n), by_true(n);
  std::iota(by_pred.begin(), by_pred.end(), 0);
  std::iota(by_true.begin(), by_true.end(), 0);
  std::stable_sort(by_pred.begin(), by_pred.end(),
                   [&](std::size_t a, std::size_t b) { return y_pred[a] > y_pred[b]; });
  std::stable_sort(by_true.begin(), by_true.end(),
                   [&](std::size_t a, std::size_t b) { return y_true[a] > y_true[b]; });
  const double model = capture_gini(y_true, by_pred, tie_groups(y_pred, by_pred), total);
  const double oracle = capture_gini(y_true, by_true, tie_groups(y_true, by_true), total);
  if (!(oracle > 0.0)) fail(ErrorKind::Invalid, "n_gini: undefined normalizer");
  return model / oracle;
}

double stability_diff(std::span<const double> day1, std::span<const double> day2) {
  check_sizes("stability_diff", day1.size(), day2.size());
  const double s1 = std::accumulate(day1.begin(), day1.end(), 0.0);
  const double s2 = std::accumulate(day2.begin(), day2.end(), 0.0);
  if (s1 == 0.0) fail(ErrorKind::Invalid, "stability_diff: first prediction sum is 0");
  return std::abs(s1 - s2) / s1;
}

double pearson(std::span<const double> a, std::span<const double> b, bool* zero_variance) {
  check_sizes("pearson", a.size(), b.size());
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (zero_variance) *zero_variance = (saa == 0.0 || sbb == 0.0);
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

HorizonMetrics evaluate_records(std::span<const EvalRecord> records) {
  if (records.empty()) fail(ErrorKind::Invalid, "evaluate_records: empty input");
  std::vector<double> yt, yp, pb;
  for (const auto& r : records) {
    if (r.horizon != records[0].horizon) fail(ErrorKind::Invalid, "evaluate_records: mixed horizons");
    yt.push_back(r.y_true);
    yp.push_back(r.y_pred);
    pb.push_back(r.p_buy);
  }
  HorizonMetrics m;
  m.horizon = records[0].horizon;
  m.nmae = nmae(yt, yp);
  m.auc = auc(yt, pb);
  m.n_gini = n_gini(yt, yp);
  return m;
}

}  // namespace hltv
