// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/pareto.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hltv/error.hpp"

namespace hltv {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Linear inequality rows: coef . beta >= rhs.
struct Constraint {
  Vec coef;
  double rhs = 0.0;
  std::string name;
};

struct Problem {
  std::size_t m = 0;
  Mat gram;  // M
  Mat q;     // M^T M
  Vec lin;   // M^T a
  Vec a;
  double scale = 1.0;
  std::vector<Constraint> cons;
};

Problem make_problem(std::span<const double> gram, std::size_t m, std::span<const double> a,
                     const std::vector<std::size_t>& constrained) {
  Problem p;
  p.m = m;
  p.gram = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      gram.data(), m, m);
  p.a = Eigen::Map<const Vec>(a.data(), m);
  p.q = p.gram.transpose() * p.gram;
  p.lin = p.gram.transpose() * p.a;
  p.scale = std::max(1.0, p.q.norm() + p.lin.norm());
  for (std::size_t i = 0; i < m; ++i) {
    Vec e = Vec::Zero(m);
    e(i) = 1.0;
    p.cons.push_back({e, 0.0, "beta" + std::to_string(i + 1) + ">=0"});
  }
  p.cons.push_back({-Vec::Ones(m), -1.0, "sum(beta)<=1"});
  for (std::size_t j : constrained) {
    p.cons.push_back({p.gram.row(j).transpose(), 0.0, "task" + std::to_string(j + 1)});
  }
  return p;
}

double objective(const Problem& p, const Vec& beta) {
  return (p.gram * beta - p.a).squaredNorm();
}

double violation(const Problem& p, const Vec& beta) {
  double v = 0.0;
  for (const auto& c : p.cons) v = std::max(v, c.rhs - c.coef.dot(beta));
  return v;
}

bool feasible(const Problem& p, const Vec& beta, double tol) {
  return violation(p, beta) <= tol;
}

// Iterates every subset of {0..n-1} of size <= max_size.
template <class F>
void for_each_subset(std::size_t n, std::size_t max_size, F f) {
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    f(cur);
    if (cur.size() == max_size) return;
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

// Exact minimizer of the slightly regularized (strictly convex) problem by
// enumerating candidate active sets and checking primal/dual feasibility.
bool solve_active_set(const Problem& p, Vec& best) {
  const std::size_t m = p.m;
  const double delta = 1e-9 * std::max(1.0, p.q.trace() / static_cast<double>(m));
  const Mat h = p.q + delta * Mat::Identity(m, m);
  const double tol = 1e-10 * p.scale;
  double best_obj = std::numeric_limits<double>::infinity();
  bool found = false;
  for_each_subset(p.cons.size(), m, [&](const std::vector<std::size_t>& s) {
    const std::size_t k = s.size();
    Mat kkt = Mat::Zero(m + k, m + k);
    Vec rhs = Vec::Zero(m + k);
    kkt.topLeftCorner(m, m) = h;
    rhs.head(m) = p.lin;
    for (std::size_t r = 0; r < k; ++r) {
      const auto& c = p.cons[s[r]];
      kkt.block(0, m + r, m, 1) = -c.coef;
      kkt.block(m + r, 0, 1, m) = c.coef.transpose();
      rhs(m + r) = c.rhs;
    }
    Eigen::FullPivLU<Mat> lu(kkt);
    if (!lu.isInvertible()) return;
    const Vec sol = lu.solve(rhs);
    const Vec beta = sol.head(m);
    for (std::size_t r = 0; r < k; ++r) {
      if (sol(m + r) < -tol) return;
    }
    if (!feasible(p, beta, tol)) return;
    const double obj = objective(p, beta);
    if (obj < best_obj) {
      best_obj = obj;
      best = beta;
      found = true;
    }
  });
  return found;
}

// Grid over {beta >= 0, sum <= 1} with the given step; returns false if no grid
// point is feasible.
bool grid_search(const Problem& p, double step, Vec& best) {
  const int steps = static_cast<int>(std::lround(1.0 / step));
  const std::size_t m = p.m;
  std::vector<int> k(m, 0);
  double best_obj = std::numeric_limits<double>::infinity();
  bool found = false;
  Vec beta(m);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == m) {
      for (std::size_t t = 0; t < m; ++t) beta(t) = k[t] * step;
      if (!feasible(p, beta, 1e-12 * p.scale)) return;
      const double obj = objective(p, beta);
      if (obj < best_obj) {
        best_obj = obj;
        best = beta;
        found = true;
      }
      return;
    }
    for (int v = 0; v <= left; ++v) {
      k[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, steps);
  return found;
}

// Euclidean projection onto the feasible polytope (strictly convex, so the
// active-set enumeration is exact).
Vec project(const Problem& p, const Vec& y) {
  const std::size_t m = p.m;
  Vec best = Vec::Zero(m);
  double best_dist = std::numeric_limits<double>::infinity();
  const double tol = 1e-12 * p.scale;
  for_each_subset(p.cons.size(), m, [&](const std::vector<std::size_t>& s) {
    const std::size_t k = s.size();
    Vec beta = y;
    if (k > 0) {
      Mat c(k, m);
      Vec b(k);
      for (std::size_t r = 0; r < k; ++r) {
        c.row(r) = p.cons[s[r]].coef.transpose();
        b(r) = p.cons[s[r]].rhs;
      }
      Eigen::FullPivLU<Mat> lu(c * c.transpose());
      if (!lu.isInvertible()) return;
      const Vec nu = lu.solve(b - c * y);
      if ((nu.array() < -tol).any()) return;
      beta = y + c.transpose() * nu;
    }
    if (!feasible(p, beta, tol)) return;
    const double dist = (beta - y).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = beta;
    }
  });
  return best;
}

double kkt_residual(const Problem& p, const Vec& beta) {
  const Vec grad = 2.0 * (p.q * beta - p.lin);
  const double act_tol = 1e-9 * p.scale;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < p.cons.size(); ++i) {
    if (p.cons[i].coef.dot(beta) - p.cons[i].rhs <= act_tol) active.push_back(i);
  }
  double best = grad.norm();
  for_each_subset(active.size(), active.size(), [&](const std::vector<std::size_t>& s) {
    if (s.empty()) return;
    Mat c(p.m, s.size());
    for (std::size_t r = 0; r < s.size(); ++r) c.col(r) = p.cons[active[s[r]]].coef;
    const Vec nu = c.completeOrthogonalDecomposition().solve(grad);
    if ((nu.array() < 0.0).any()) return;
    best = std::min(best, (grad - c * nu).norm());
  });
  return std::max(best, violation(p, beta)) / p.scale;
}

// Accelerated projected gradient from a feasible start.
Vec refine(const Problem& p, Vec beta, std::size_t max_iter) {
  const double lip = 2.0 * std::max(1e-12, p.q.norm());
  Vec y = beta, prev = beta;
  double t = 1.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Vec grad = 2.0 * (p.q * y - p.lin);
    const Vec next = project(p, y - grad / lip);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / tn) * (next - prev);
    prev = next;
    t = tn;
    if (it % 50 == 49 && kkt_residual(p, next) <= 1e-7) return next;
  }
  return prev;
}

Vec clean(const Problem& p, Vec beta) {
  for (std::size_t i = 0; i < p.m; ++i) beta(i) = std::max(0.0, beta(i));
  const double s = beta.sum();
  if (s > 1.0) beta /= s;
  return beta;
}

double softclamp_loss(double l) { return std::max(l, 0.0); }

}  // namespace

WeightVector weight_from_uv(double u, double v) {
  const double lo = 1.0 / 3.0 - 1e-12, hi = 2.0 / 3.0 + 1e-12;
  if (u < lo || u > hi || v < lo || v > hi) {
    fail(ErrorKind::Invalid, "weight_from_uv: u and v must lie in [1/3, 2/3]");
  }
  const double theta = 0.5 * std::numbers::pi * u;
  const double phi = std::acos(v);
  return {{std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)}};
}

WeightVector sample_weight_vector(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(1.0 / 3.0, 2.0 / 3.0);
  const double u = dist(rng);
  const double v = dist(rng);
  return weight_from_uv(u, v);
}

WeightVector uniform_weight_vector() {
  const double c = 1.0 / std::sqrt(3.0);
  return {{c, c, c}};
}

std::vector<double> GradientMatrix::gram() const {
  std::vector<double> g(tasks * tasks, 0.0);
  for (std::size_t i = 0; i < tasks; ++i) {
    for (std::size_t j = i; j < tasks; ++j) {
      double s = 0.0;
      const double* a = data.data() + i * dim;
      const double* b = data.data() + j * dim;
      for (std::size_t k = 0; k < dim; ++k) s += a[k] * b[k];
      g[i * tasks + j] = g[j * tasks + i] = s;
    }
  }
  return g;
}

double uniformity_kl(std::span<const double> losses, std::span<const double> lambda) {
  if (losses.size() != lambda.size() || losses.empty()) {
    fail(ErrorKind::Invalid, "uniformity_kl: losses and weights must have equal non-zero length");
  }
  const std::size_t m = losses.size();
  double total = 0.0;
  std::vector<double> c(m);
  for (std::size_t j = 0; j < m; ++j) total += (c[j] = lambda[j] * softclamp_loss(losses[j]));
  if (total == 0.0) return 0.0;
  double kl = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double ch = std::max(c[j] / total, 1e-12);
    kl += ch * std::log(static_cast<double>(m) * ch);
  }
  return std::max(kl, 0.0);
}

Anchor anchor_direction(std::span<const double> losses, std::span<const double> lambda,
                        double mu_kl, double epsilon) {
  const std::size_t m = losses.size();
  Anchor out;
  out.mu_kl = mu_kl;
  out.mode = mu_kl > epsilon ? AnchorMode::Balance : AnchorMode::Descent;
  out.a.assign(m, 0.0);
  double total = 0.0;
  std::vector<double> c(m);
  for (std::size_t j = 0; j < m; ++j) total += (c[j] = lambda[j] * softclamp_loss(losses[j]));
  if (out.mode == AnchorMode::Descent) {
    out.a = c;
    return out;
  }
  if (total == 0.0) return out;
  for (std::size_t j = 0; j < m; ++j) {
    const double ch = std::max(c[j] / total, 1e-12);
    out.a[j] = c[j] * (std::log(static_cast<double>(m) * ch) - mu_kl);
  }
  return out;
}

std::vector<std::size_t> constrained_task_set(std::span<const double> losses,
                                              std::span<const double> lambda,
                                              double mu_kl, const QpOptions& opts) {
  const std::size_t m = losses.size();
  bool only_worst = mu_kl <= opts.epsilon;
  if (opts.epo_convention) only_worst = !only_worst;
  std::vector<std::size_t> j;
  if (only_worst) {
    std::size_t arg = 0;
    for (std::size_t t = 1; t < m; ++t) {
      if (lambda[t] * losses[t] > lambda[arg] * losses[arg]) arg = t;
    }
    j.push_back(arg);
  } else {
    for (std::size_t t = 0; t < m; ++t) j.push_back(t);
  }
  return j;
}

double qp_objective(std::span<const double> gram, std::size_t m, std::span<const double> a,
                    std::span<const double> beta) {
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double r = -a[i];
    for (std::size_t k = 0; k < m; ++k) r += gram[i * m + k] * beta[k];
    s += r * r;
  }
  return s;
}

QpSolution solve_qp_gram(std::span<const double> gram, std::size_t m, std::span<const double> a,
                         std::vector<std::size_t> constrained, double grid_step) {
  if (gram.size() != m * m || a.size() != m) fail(ErrorKind::Invalid, "solve_qp: dimension mismatch");
  QpSolution sol;
  sol.constrained_tasks = constrained;
  Problem p = make_problem(gram, m, a, constrained);

  Vec grid_beta = Vec::Zero(m), exact = Vec::Zero(m);
  bool have_grid = grid_search(p, grid_step, grid_beta);
  bool have_exact = solve_active_set(p, exact);
  if (!have_grid && !have_exact) {
    // Only reachable through numerical trouble: beta = 0 satisfies every
    // constraint exactly. Fall back to the problem without task constraints.
    sol.relaxed = true;
    p = make_problem(gram, m, a, {});
    have_grid = grid_search(p, grid_step, grid_beta);
    have_exact = solve_active_set(p, exact);
  }
  Vec beta = grid_beta;
  if (have_exact && (!have_grid || objective(p, exact) <= objective(p, grid_beta))) beta = exact;
  beta = clean(p, beta);
  if (!feasible(p, beta, 1e-9 * p.scale) || kkt_residual(p, beta) > 1e-6) {
    beta = refine(p, beta, 20000);
  }
  sol.beta.assign(beta.data(), beta.data() + m);
  sol.objective = objective(p, beta);
  sol.kkt_residual = kkt_residual(p, beta);
  for (const auto& c : p.cons) {
    if (c.coef.dot(beta) - c.rhs <= 1e-9 * p.scale) sol.active_constraints.push_back(c.name);
  }
  return sol;
}

QpSolution solve_qp(const GradientMatrix& g, std::span<const double> a,
                    std::span<const double> losses, std::span<const double> lambda,
                    const QpOptions& opts) {
  const double mu = uniformity_kl(losses, lambda);
  QpSolution sol = solve_qp_gram(g.gram(), g.tasks, a,
                                 constrained_task_set(losses, lambda, mu, opts), opts.grid_step);
  sol.mode = mu > opts.epsilon ? AnchorMode::Balance : AnchorMode::Descent;
  return sol;
}

const char* mode_name(AnchorMode m) {
  return m == AnchorMode::Balance ? "balance" : "descent";
}

Direction nondominating_direction(const TaskState& state, const WeightVector& w,
                                  const ParetoOptions& opts) {
  const GradientMatrix& g = state.grads;
  const std::size_t m = g.tasks;
  if (m != 3 || state.losses.size() != 3) fail(ErrorKind::Invalid, "expected three tasks");
  for (double l : state.losses) {
    if (!std::isfinite(l)) fail(ErrorKind::Numeric, "non-finite task loss");
  }
  Direction out;
  StepLog& log = out.log;
  log.losses = state.losses;
  const std::span<const double> lam(w.lambda.data(), 3);
  log.mu_kl = uniformity_kl(state.losses, lam);
  log.mode = log.mu_kl > opts.qp.epsilon ? AnchorMode::Balance : AnchorMode::Descent;
  const std::vector<double> gram = g.gram();

  if (opts.enabled) {
    const Anchor anc = anchor_direction(state.losses, lam, log.mu_kl, opts.qp.epsilon);
    const QpSolution qp = solve_qp_gram(
        gram, m, anc.a, constrained_task_set(state.losses, lam, log.mu_kl, opts.qp), opts.qp.grid_step);
    log.beta = qp.beta;
    log.relaxed = qp.relaxed;
    log.kkt_residual = qp.kkt_residual;
    log.constrained_tasks = qp.constrained_tasks;
  } else {
    log.beta.assign(m, 1.0 / static_cast<double>(m));
  }

  out.d.assign(g.dim, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double b = log.beta[j];
    if (b == 0.0) continue;
    const auto row = g.row(j);
    for (std::size_t k = 0; k < g.dim; ++k) out.d[k] += b * row[k];
  }
  double nn = 0.0;
  for (double v : out.d) nn += v * v;
  log.dnd_norm = std::sqrt(nn);

  const std::size_t pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (std::size_t p = 0; p < 3; ++p) {
    const std::size_t i = pairs[p][0], j = pairs[p][1];
    const double ni = std::sqrt(gram[i * m + i]), nj = std::sqrt(gram[j * m + j]);
    if (ni == 0.0 || nj == 0.0) {
      log.cosines[p] = 0.0;
      log.zero_norm[p] = true;
    } else {
      log.cosines[p] = std::clamp(gram[i * m + j] / (ni * nj), -1.0, 1.0);
    }
  }
  return out;
}

StepLog pareto_train_step(std::vector<double>& params, const TaskOracle& oracle,
                          const WeightVector& w, const ParetoOptions& opts, double eta,
                          std::size_t step_index) {
  if (!(eta >= 0.0)) fail(ErrorKind::Invalid, "step size must be non-negative");
  const TaskState state = oracle(params);
  if (state.grads.dim != params.size()) fail(ErrorKind::Invalid, "gradient dimension mismatch");
  Direction dir = nondominating_direction(state, w, opts);
  if (eta > 0.0) {
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= eta * dir.d[k];
  }
  dir.log.step = step_index;
  return dir.log;
}

ConflictSummary conflict_report(std::span<const StepLog> logs) {
  if (logs.empty()) fail(ErrorKind::Invalid, "conflict_report: no steps logged");
  ConflictSummary s;
  s.steps = logs.size();
  std::size_t conflicted = 0;
  for (const auto& l : logs) {
    bool any = false;
    for (std::size_t p = 0; p < 3; ++p) {
      if (l.zero_norm[p]) ++s.zero_norm_flags;
      if (l.cosines[p] < 0.0) any = true;
      s.mean_angle[p] += std::acos(std::clamp(l.cosines[p], -1.0, 1.0));
    }
    if (any) ++conflicted;
  }
  for (double& a : s.mean_angle) a /= static_cast<double>(logs.size());
  s.conflict_fraction = static_cast<double>(conflicted) / static_cast<double>(logs.size());
  return s;
}

}  // namespace hltv
