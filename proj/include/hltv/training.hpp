// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hltv/backbone.hpp"
#include "hltv/metrics.hpp"
#include "hltv/pareto.hpp"

namespace hltv {

enum class LossKind { ZilnNll, SquaredError };
enum class OptimizerKind { Sgd, Adam };

const char* loss_kind_name(LossKind k);
const char* optimizer_name(OptimizerKind k);

struct TrainOptions {
  std::size_t steps = 600;
  std::size_t batch_size = 256;
  double learning_rate = 0.3;
  OptimizerKind optimizer = OptimizerKind::Sgd;
  LossKind loss = LossKind::ZilnNll;
  ParetoOptions pareto;
  void validate() const;
};

// Read-only view of the data a run trains and scores on.
struct TrainData {
  const std::vector<UserRecord>* users = nullptr;
  const std::vector<GameRecord>* games = nullptr;
  std::vector<const LtvSample*> train;
  std::vector<const LtvSample*> valid;
  std::vector<const LtvSample*> test;
};

TrainData split_view(const Dataset& d);

// Names of the parameters that make up the columns of G, in name order.
std::vector<std::string> shared_params(const Model& m);

// Per-task mean losses (gate penalty included) and their gradients over the
// shared parameters. Train-mode statistics are folded into `pn_update`.
TaskState compute_task_state(const Model& m, const Batch& b, LossKind loss,
                             const std::vector<std::string>& shared, PnState* pn_update = nullptr);

struct TrainResult {
  std::vector<StepLog> logs;
};

// Inner loop: `opts.steps` non-dominating steps on shuffled mini-batches.
// `stream` names the RNG stream for batch order.
TrainResult train_model(Model& m, const TrainData& data, const WeightVector& w,
                        const TrainOptions& opts, std::uint64_t seed, const std::string& stream);

std::array<HorizonMetrics, 3> evaluate_model(const Model& m, const std::vector<const LtvSample*>& samples,
                                             const TrainData& data);

std::string metrics_csv(const std::array<HorizonMetrics, 3>& m, const ArtifactMeta& meta);
std::string step_log_csv(const std::vector<StepLog>& logs, const ArtifactMeta& meta);

struct RunResult {
  std::size_t index = 0;
  WeightVector lambda;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::array<HorizonMetrics, 3> valid{};
  double score = 0.0;  // mean - std of validation N-GINI
  Model model;
  std::vector<StepLog> logs;
};

struct SearchResult {
  std::vector<RunResult> runs;
  std::size_t best = 0;
};

// Spread-penalized mean of the per-horizon validation N-GINI.
double selection_score(const std::array<HorizonMetrics, 3>& m);
std::size_t select_best(const std::vector<RunResult>& runs);

// Outer loop: K runs from the shared initial model, each with a fresh weight
// vector. Runs are independent and spread over `workers` threads.
SearchResult optimal_search(const Model& init, const TrainData& data, std::size_t runs,
                            const TrainOptions& opts, std::uint64_t seed, std::size_t workers = 1);

// Calls fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace hltv
