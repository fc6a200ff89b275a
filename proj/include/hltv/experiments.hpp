// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hltv/training.hpp"

namespace hltv {

// Shared ingredients of the retraining experiments.
struct ExperimentSetup {
  FieldSchema schema;
  ModelOptions model;
  TrainOptions train;
  const NodeEmbeddings* grl = nullptr;  // required by the "full" variant
  std::size_t workers = 1;
};

struct LabelDropRow {
  double ratio = 0.0;
  std::string variant;  // "full" or "no_grl"
  HorizonMetrics metrics;
  std::size_t replicate = 0;
};

// Training indices kept at `ratio`: one seeded permutation, so higher ratios
// drop supersets and every variant sees the same subset. Kept indices are
// returned in ascending order.
std::vector<std::size_t> kept_indices(std::size_t n, double ratio, std::uint64_t seed);

// Each replicate draws its own subset order and training seed; both variants
// share them.
std::vector<LabelDropRow> label_drop_experiment(const TrainData& data, const ExperimentSetup& setup,
                                                const std::vector<double>& ratios, std::uint64_t seed,
                                                std::size_t replicates = 1);

std::string label_drop_csv(const std::vector<LabelDropRow>& rows, const ArtifactMeta& meta);

struct DropDegradation {
  double ratio = 0.0;
  double full = 0.0;    // mean N-GINI at ratio 0 minus mean N-GINI at ratio,
                        // averaged over horizons and replicates
  double no_grl = 0.0;
};

std::vector<DropDegradation> drop_degradation(const std::vector<LabelDropRow>& rows);

struct SeedCorrelation {
  std::vector<std::string> labels;             // "<variant>.<run>"
  std::vector<std::array<double, 3>> aucs;     // test AUC per horizon
  std::vector<double> matrix;                  // (2n)^2 row-major Pearson
  std::vector<bool> zero_variance;             // per matrix entry
  std::size_t runs_per_variant = 0;

  // Mean off-diagonal correlation inside one variant block (0 or 1).
  double intra_mean(std::size_t variant) const;
};

SeedCorrelation seed_correlation_experiment(const TrainData& data, const ExperimentSetup& setup,
                                            std::size_t runs, std::uint64_t seed);

std::string seed_correlation_csv(const SeedCorrelation& s, const ArtifactMeta& meta);

}  // namespace hltv
