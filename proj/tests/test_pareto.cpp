// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hltv/error.hpp"
#include "hltv/pareto.hpp"

using namespace hltv;
using V = std::vector<double>;

namespace {

GradientMatrix rows(const std::vector<V>& g) {
  GradientMatrix m(g.size(), g[0].size());
  for (std::size_t j = 0; j < g.size(); ++j) std::copy(g[j].begin(), g[j].end(), m.row(j).begin());
  return m;
}

V combine(const GradientMatrix& g, const V& beta) {
  V d(g.dim, 0.0);
  for (std::size_t j = 0; j < g.tasks; ++j) {
    for (std::size_t k = 0; k < g.dim; ++k) d[k] += beta[j] * g.row(j)[k];
  }
  return d;
}

double dot(const V& a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Best feasible point on a simplex grid of the given resolution.
double grid_oracle(const V& gram, const V& a, const std::vector<std::size_t>& cons, int steps) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; i + j <= steps; ++j) {
      for (int k = 0; i + j + k <= steps; ++k) {
        const V b{i / double(steps), j / double(steps), k / double(steps)};
        bool ok = true;
        for (std::size_t t : cons) {
          double r = 0;
          for (int c = 0; c < 3; ++c) r += gram[t * 3 + c] * b[c];
          if (r < -1e-12) ok = false;
        }
        if (ok) best = std::min(best, qp_objective(gram, 3, a, b));
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("spherical weight vector examples") {
  const auto mid = weight_from_uv(0.5, 0.5);
  CHECK(mid.lambda[0] == doctest::Approx(0.61237).epsilon(1e-5));
  CHECK(mid.lambda[1] == doctest::Approx(0.61237).epsilon(1e-5));
  CHECK(mid.lambda[2] == doctest::Approx(0.5).epsilon(1e-12));
  const auto low = weight_from_uv(1.0 / 3.0, 1.0 / 3.0);
  CHECK(low.lambda[0] == doctest::Approx(0.81650).epsilon(1e-5));
  CHECK(low.lambda[1] == doctest::Approx(0.47140).epsilon(1e-5));
  CHECK(low.lambda[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(weight_from_uv(0.2, 0.5), Error);
}

TEST_CASE("sampled weights are positive, unit norm and uniform in inclination") {
  std::mt19937_64 rng(77);
  const int n = 100000;
  std::vector<double> theta;
  theta.reserve(n);
  bool ok = true;
  for (int i = 0; i < n; ++i) {
    const auto w = sample_weight_vector(rng);
    const double norm = std::hypot(w.lambda[0], w.lambda[1], w.lambda[2]);
    ok = ok && w.lambda[0] > 0 && w.lambda[1] > 0 && w.lambda[2] > 0 && std::abs(norm - 1) < 1e-12;
    theta.push_back(std::atan2(w.lambda[1], w.lambda[0]));
  }
  CHECK(ok);
  std::sort(theta.begin(), theta.end());
  const double lo = std::numbers::pi / 6, hi = std::numbers::pi / 3;
  double ks = 0;
  for (int i = 0; i < n; ++i) {
    const double f = (theta[i] - lo) / (hi - lo);
    ks = std::max({ks, std::abs(f - i / double(n)), std::abs(f - (i + 1) / double(n))});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("uniformity kl") {
  const auto w = uniform_weight_vector();
  const std::span<const double> lam(w.lambda.data(), 3);
  CHECK(uniformity_kl(V{2, 2, 2}, lam) == doctest::Approx(0.0));
  CHECK(uniformity_kl(V{1, 0, 0}, lam) == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  CHECK(uniformity_kl(V{0, 0, 0}, lam) == 0.0);
  CHECK(uniformity_kl(V{1, 2, 5}, lam) == doctest::Approx(uniformity_kl(V{3, 6, 15}, lam)).epsilon(1e-14));
  CHECK(uniformity_kl(V{1, 2, 5}, lam) > 0.0);
}

TEST_CASE("anchor direction modes") {
  const auto w = uniform_weight_vector();
  const std::span<const double> lam(w.lambda.data(), 3);
  const auto d = anchor_direction(V{1, 1, 1}, lam, 0.0, 1e-2);
  CHECK(d.mode == AnchorMode::Descent);
  for (double v : d.a) CHECK(v == doctest::Approx(w.lambda[0]));

  const V l{2, 1, 1};
  const double mu = uniformity_kl(l, lam);
  const auto b = anchor_direction(l, lam, mu, 1e-2);
  CHECK(b.mode == AnchorMode::Balance);
  CHECK(b.a[0] > 0);
  CHECK(b.a[1] < 0);
  CHECK(b.a[2] < 0);

  const auto flat = anchor_direction(V{1, 1, 1}, lam, 0.0, -1.0);
  CHECK(flat.mode == AnchorMode::Balance);
  for (double v : flat.a) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("constraint set gating") {
  const V lam{1, 1, 1}, l{1, 3, 2};
  QpOptions o;
  CHECK(constrained_task_set(l, lam, 0.0, o) == std::vector<std::size_t>{1});
  CHECK(constrained_task_set(l, lam, 1.0, o).size() == 3);
  o.epo_convention = true;
  CHECK(constrained_task_set(l, lam, 0.0, o).size() == 3);
  CHECK(constrained_task_set(l, lam, 1.0, o) == std::vector<std::size_t>{1});
}

TEST_CASE("qp: identical gradients give a direction parallel to them") {
  const V g{0.3, -1.2, 0.7, 2.0};
  const auto gm = rows({g, g, g});
  const V l{1, 1, 1};
  const auto w = uniform_weight_vector();
  const std::span<const double> lam(w.lambda.data(), 3);
  const auto anc = anchor_direction(l, lam, 0.0, 1e-2);
  const auto sol = solve_qp(gm, anc.a, l, lam, QpOptions{});
  const V d = combine(gm, sol.beta);
  const double cosv = dot(d, g) / std::sqrt(dot(d, d) * dot(g, g));
  CHECK(cosv == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.kkt_residual <= 1e-6);
}

TEST_CASE("qp: orthonormal gradients recover the anchor") {
  const auto gm = rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
  const auto sol = solve_qp_gram(gm.gram(), 3, V{0.5, 0.5, 0.0}, {0, 1, 2});
  CHECK(sol.beta[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(sol.beta[1] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(std::abs(sol.beta[2]) <= 1e-8);
  CHECK(sol.objective <= 1e-14);
  CHECK_FALSE(sol.relaxed);
}

TEST_CASE("qp: opposing gradients yield a stationary direction") {
  const V g{1.0, 2.0, -0.5};
  const V ng{-1.0, -2.0, 0.5};
  const auto gm = rows({g, ng, g});
  for (const V& a : {V{1, 1, 1}, V{0.3, -0.2, 0.9}, V{-1, 2, 0.1}}) {
    const auto sol = solve_qp_gram(gm.gram(), 3, a, {0, 1, 2});
    const V d = combine(gm, sol.beta);
    CHECK(std::sqrt(dot(d, d)) <= 1e-6);
  }
}

TEST_CASE("qp matches a fine simplex grid on random instances") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<V> g(3, V(5));
    for (auto& r : g) for (auto& v : r) v = nd(rng) / std::sqrt(5.0);
    if (trial % 4 == 0) for (std::size_t k = 0; k < 5; ++k) g[1][k] = -0.8 * g[0][k] + 0.1 * g[1][k];
    const auto gm = rows(g);
    const V a{nd(rng), nd(rng), nd(rng)};
    std::vector<std::size_t> cons;
    if (trial % 2 == 0) cons = {0, 1, 2};
    else cons = {std::size_t(trial % 3)};
    const auto gram = gm.gram();
    const auto sol = solve_qp_gram(gram, 3, a, cons);
    CHECK(sol.kkt_residual <= 1e-6);
    const double ref = grid_oracle(gram, a, cons, 200);
    CHECK(sol.objective <= ref + 1e-9);
    // Feasibility of the returned point.
    double s = 0;
    for (double b : sol.beta) {
      CHECK(b >= -1e-12);
      s += b;
    }
    CHECK(s <= 1 + 1e-12);
    for (std::size_t t : cons) CHECK(dot(sol.beta, std::span<const double>(gram.data() + 3 * t, 3)) >= -1e-9);
  }
}

TEST_CASE("train step: zero step size is a no-op and small steps never raise constrained losses") {
  const std::vector<V> centers{{1, 0, 0, 0}, {0, 1, 0, 0.5}, {0.2, 0.2, 1, -0.5}};
  TaskOracle oracle = [&](std::span<const double> x) {
    TaskState s;
    s.grads = GradientMatrix(3, x.size());
    for (std::size_t j = 0; j < 3; ++j) {
      double l = 0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = x[k] - centers[j][k];
        l += 0.5 * r * r;
        s.grads.row(j)[k] = r;
      }
      s.losses.push_back(l);
    }
    return s;
  };
  auto losses = [&](const V& x) { return oracle(x).losses; };

  ParetoOptions opts;
  opts.qp.epo_convention = true;
  opts.qp.epsilon = 10.0;
  const auto w = uniform_weight_vector();

  V x{-1, 2, 0.5, 1};
  const V x0 = x;
  pareto_train_step(x, oracle, w, opts, 0.0);
  CHECK(x == x0);

  for (int step = 0; step < 50; ++step) {
    const V before = losses(x);
    const StepLog log = pareto_train_step(x, oracle, w, opts, 1e-4, step);
    CHECK(log.constrained_tasks.size() == 3);
    const V after = losses(x);
    for (int j = 0; j < 3; ++j) CHECK(after[j] - before[j] <= 1e-9);
  }
}

TEST_CASE("disabled pareto uses equal weights") {
  const auto gm = rows({{1, 0}, {0, 1}, {1, 1}});
  TaskState s{{1, 2, 3}, gm};
  ParetoOptions o;
  o.enabled = false;
  const auto d = nondominating_direction(s, uniform_weight_vector(), o);
  for (double b : d.log.beta) CHECK(b == doctest::Approx(1.0 / 3.0));
  CHECK(d.d[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("conflict report") {
  const auto w = uniform_weight_vector();
  ParetoOptions o;
  std::vector<StepLog> same, opposed;
  same.push_back(nondominating_direction({{1, 1, 1}, rows({{1, 2}, {1, 2}, {1, 2}})}, w, o).log);
  const auto rs = conflict_report(same);
  CHECK(rs.conflict_fraction == 0.0);
  for (double a : rs.mean_angle) CHECK(a == doctest::Approx(0.0).epsilon(1e-6));

  opposed.push_back(nondominating_direction({{1, 1, 1}, rows({{1, 2}, {-1, -2}, {0, 0}})}, w, o).log);
  CHECK(opposed[0].cosines[0] == doctest::Approx(-1.0));
  CHECK(opposed[0].zero_norm[1]);
  const auto ro = conflict_report(opposed);
  CHECK(ro.conflict_fraction == 1.0);
  CHECK(ro.zero_norm_flags == 2);

  CHECK_THROWS_AS(conflict_report(std::span<const StepLog>{}), Error);
}

TEST_CASE("quadratics with opposing optima conflict most of the time") {
  const std::vector<V> centers{{3, 0}, {-3, 0.5}, {0, -3}};
  TaskOracle oracle = [&](std::span<const double> x) {
    TaskState s;
    s.grads = GradientMatrix(3, x.size());
    for (std::size_t j = 0; j < 3; ++j) {
      double l = 0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = x[k] - centers[j][k];
        l += 0.5 * r * r;
        s.grads.row(j)[k] = r;
      }
      s.losses.push_back(l);
    }
    return s;
  };
  V x{0.1, 0.2};
  std::vector<StepLog> logs;
  for (int t = 0; t < 200; ++t) logs.push_back(pareto_train_step(x, oracle, uniform_weight_vector(), {}, 0.05, t));
  CHECK(conflict_report(logs).conflict_fraction > 0.5);
}
