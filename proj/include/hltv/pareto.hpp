// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hltv {

// Preference over the 3/7/30-day tasks; unit norm, strictly positive.
struct WeightVector {
  std::array<double, 3> lambda{};
};

// u, v in [1/3, 2/3] map to inclination (pi/2) u and azimuth arccos(v).
WeightVector weight_from_uv(double u, double v);
WeightVector sample_weight_vector(std::mt19937_64& rng);
WeightVector uniform_weight_vector();

// Task gradients stacked as rows: row j is the flattened gradient of task j.
struct GradientMatrix {
  std::size_t tasks = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  GradientMatrix() = default;
  GradientMatrix(std::size_t tasks, std::size_t dim)
      : tasks(tasks), dim(dim), data(tasks * dim, 0.0) {}

  std::span<double> row(std::size_t j) { return {data.data() + j * dim, dim}; }
  std::span<const double> row(std::size_t j) const {
    return {data.data() + j * dim, dim};
  }
  // Gram matrix of the rows (tasks x tasks, row-major).
  std::vector<double> gram() const;
};

struct TaskState {
  std::vector<double> losses;
  GradientMatrix grads;
};

// KL of the normalized weighted losses from uniform. Zero when all weighted
// losses vanish. Negative losses are clamped to 0 for the weighting.
double uniformity_kl(std::span<const double> losses, std::span<const double> lambda);

enum class AnchorMode { Balance, Descent };

struct Anchor {
  std::vector<double> a;
  AnchorMode mode = AnchorMode::Descent;
  double mu_kl = 0.0;
};

Anchor anchor_direction(std::span<const double> losses, std::span<const double> lambda,
                        double mu_kl, double epsilon);

struct QpOptions {
  double epsilon = 1e-2;
  bool epo_convention = false;  // swaps which KL branch constrains every task
  double grid_step = 0.02;
};

struct QpSolution {
  std::vector<double> beta;
  double objective = 0.0;
  std::vector<std::size_t> constrained_tasks;  // J
  std::vector<std::string> active_constraints;
  double kkt_residual = 0.0;
  bool relaxed = false;
  AnchorMode mode = AnchorMode::Descent;
};

// Indices j with beta' G' g_j >= 0 enforced: the argmax of lambda_j l_j when
// KL <= epsilon, every task otherwise (branches swapped under epo_convention).
std::vector<std::size_t> constrained_task_set(std::span<const double> losses,
                                              std::span<const double> lambda,
                                              double mu_kl, const QpOptions& opts);

// min ||M beta - a||^2 over beta >= 0, sum(beta) <= 1, (M beta)_j >= 0 for j in
// J, where M = G G^T of the task gradients.
QpSolution solve_qp(const GradientMatrix& g, std::span<const double> a,
                    std::span<const double> losses, std::span<const double> lambda,
                    const QpOptions& opts);

// Same problem given the Gram matrix directly.
QpSolution solve_qp_gram(std::span<const double> gram, std::size_t m,
                         std::span<const double> a, std::vector<std::size_t> constrained,
                         double grid_step = 0.02);

double qp_objective(std::span<const double> gram, std::size_t m,
                    std::span<const double> a, std::span<const double> beta);

struct ParetoOptions {
  QpOptions qp;
  bool enabled = true;  // false: fixed equal task weights
};

struct StepLog {
  std::size_t step = 0;
  std::vector<double> losses;
  double mu_kl = 0.0;
  AnchorMode mode = AnchorMode::Descent;
  std::vector<double> beta;
  double dnd_norm = 0.0;
  std::array<double, 3> cosines{};  // (1,2), (1,3), (2,3)
  std::array<bool, 3> zero_norm{};
  bool relaxed = false;
  double kkt_residual = 0.0;
  std::vector<std::size_t> constrained_tasks;
};

struct Direction {
  std::vector<double> d;
  StepLog log;
};

// d = G^T beta* for the anchored QP (or equal weights when disabled).
Direction nondominating_direction(const TaskState& state, const WeightVector& w,
                                  const ParetoOptions& opts);

using TaskOracle = std::function<TaskState(std::span<const double>)>;

// params <- params - eta * d_nd, returning the step log.
StepLog pareto_train_step(std::vector<double>& params, const TaskOracle& oracle,
                          const WeightVector& w, const ParetoOptions& opts, double eta,
                          std::size_t step_index = 0);

const char* mode_name(AnchorMode m);

struct ConflictSummary {
  std::size_t steps = 0;
  double conflict_fraction = 0.0;          // steps with any negative cosine
  std::array<double, 3> mean_angle{};      // radians, per pair
  std::size_t zero_norm_flags = 0;
};

ConflictSummary conflict_report(std::span<const StepLog> logs);

}  // namespace hltv
