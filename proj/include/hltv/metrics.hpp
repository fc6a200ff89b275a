// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace hltv {

inline constexpr int kHorizons[3] = {3, 7, 30};

struct EvalRecord {
  double y_true = 0.0;
  double y_pred = 0.0;  // ZILN expected value
  double p_buy = 0.0;   // ZILN purchase probability
  int horizon = 3;
};

// sum |y_pred - y_true| / sum y_true.
double nmae(std::span<const double> y_true, std::span<const double> y_pred);

// Mann-Whitney AUC of scores against labels 1{y_true > 0}; ties count 1/2.
double auc(std::span<const double> y_true, std::span<const double> scores);

// Gini of the prediction-ordered value-capture curve divided by the Gini of the
// truth-ordered curve. Tied predictions share their group's mean value.
double n_gini(std::span<const double> y_true, std::span<const double> y_pred);

// |sum(day1) - sum(day2)| / sum(day1).
double stability_diff(std::span<const double> day1, std::span<const double> day2);

// Pearson correlation; zero_variance is set (and 0 returned) when either side
// is constant.
double pearson(std::span<const double> a, std::span<const double> b,
               bool* zero_variance = nullptr);

struct HorizonMetrics {
  int horizon = 3;
  double nmae = 0.0;
  double auc = 0.0;
  double n_gini = 0.0;
};

// Records must all share one horizon.
HorizonMetrics evaluate_records(std::span<const EvalRecord> records);

}  // namespace hltv
