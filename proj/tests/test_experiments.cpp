// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "hltv/error.hpp"
#include "hltv/experiments.hpp"

using namespace hltv;

namespace {

struct Fixture {
  DataConfig cfg;
  Dataset data;
  TrainData view;
  NodeEmbeddings emb;
  ExperimentSetup setup;

  Fixture() {
    cfg.n_users = 200;
    cfg.n_games = 16;
    cfg.trials_per_user = 8;
    data = generate_dataset(cfg, 17);
    view = split_view(data);
    emb = {Tensor::filled(cfg.n_users, 4, 0.01), Tensor::filled(cfg.n_games, 4, -0.01)};
    setup.model.embedding_dim = 4;
    setup.model.hidden = {6, 4};
    setup.model.epnet_hidden = 4;
    setup.schema = FieldSchema::standard(cfg, 4);
    setup.train.steps = 3;
    setup.train.batch_size = 32;
    setup.train.learning_rate = 0.05;
    setup.grl = &emb;
  }
};

}  // namespace

TEST_CASE("kept indices nest across ratios") {
  const auto all = kept_indices(100, 0.0, 3);
  const auto half = kept_indices(100, 0.5, 3);
  const auto most = kept_indices(100, 0.9, 3);
  CHECK(all.size() == 100);
  CHECK(half.size() == 50);
  CHECK(most.size() == 10);
  CHECK(std::is_sorted(half.begin(), half.end()));
  CHECK(std::includes(half.begin(), half.end(), most.begin(), most.end()));
  CHECK(kept_indices(100, 0.5, 3) == half);
  CHECK(kept_indices(100, 0.5, 4) != half);
  CHECK(kept_indices(7, 0.5, 1).size() == 4);
  CHECK_THROWS_AS(kept_indices(10, 1.0, 1), Error);
  CHECK_THROWS_AS(kept_indices(10, -0.1, 1), Error);
}

TEST_CASE("label drop yields one row per ratio, variant and horizon") {
  Fixture fx;
  const auto rows = label_drop_experiment(fx.view, fx.setup, {0.0, 0.5}, 1);
  CHECK(rows.size() == 2 * 2 * 3);
  std::set<std::string> variants;
  for (const auto& r : rows) {
    variants.insert(r.variant);
    CHECK(std::isfinite(r.metrics.n_gini));
  }
  CHECK(variants == std::set<std::string>{"full", "no_grl"});
  const auto deg = drop_degradation(rows);
  REQUIRE(deg.size() == 1);
  CHECK(deg[0].ratio == 0.5);

  double full0 = 0.0, full5 = 0.0;
  for (const auto& r : rows) {
    if (r.variant != "full") continue;
    (r.ratio == 0.0 ? full0 : full5) += r.metrics.n_gini / 3.0;
  }
  CHECK(deg[0].full == doctest::Approx(full0 - full5));

  const auto again = label_drop_experiment(fx.view, fx.setup, {0.0, 0.5}, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].metrics.n_gini == again[i].metrics.n_gini);
  CHECK(label_drop_csv(rows, {1, "h"}).find("replicate,ratio,variant,horizon,n_gini,auc,nmae\n") != std::string::npos);

  const auto reps = label_drop_experiment(fx.view, fx.setup, {0.0, 0.5}, 1, 2);
  CHECK(reps.size() == 2 * rows.size());
  CHECK(reps.back().replicate == 1);
  double full0_all = 0.0, full5_all = 0.0;
  for (const auto& r : reps) {
    if (r.variant != "full") continue;
    (r.ratio == 0.0 ? full0_all : full5_all) += r.metrics.n_gini / 6.0;
  }
  CHECK(drop_degradation(reps)[0].full == doctest::Approx(full0_all - full5_all));
  CHECK_THROWS_AS(label_drop_experiment(fx.view, fx.setup, {0.0}, 1, 0), Error);
}

TEST_CASE("degradation needs the zero-ratio baseline") {
  std::vector<LabelDropRow> rows = {{0.5, "full", {}}, {0.5, "no_grl", {}}};
  CHECK_THROWS_AS(drop_degradation(rows), Error);
}

TEST_CASE("the graph variant requires embeddings") {
  Fixture fx;
  fx.setup.grl = nullptr;
  try {
    label_drop_experiment(fx.view, fx.setup, {0.0}, 1);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingInput);
  }
}

TEST_CASE("seed correlation matrix is symmetric with a unit diagonal") {
  Fixture fx;
  fx.setup.model.use_grl = false;
  const auto sc = seed_correlation_experiment(fx.view, fx.setup, 2, 5);
  const std::size_t n = sc.labels.size();
  REQUIRE(n == 4);
  CHECK(sc.labels[0] == "pareto.0");
  CHECK(sc.labels[3] == "no_pareto.1");
  for (std::size_t i = 0; i < n; ++i) {
    if (!sc.zero_variance[i * n + i]) CHECK(sc.matrix[i * n + i] == doctest::Approx(1.0));
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(sc.matrix[i * n + j] == doctest::Approx(sc.matrix[j * n + i]));
      CHECK(std::abs(sc.matrix[i * n + j]) <= 1.0 + 1e-12);
    }
  }
  CHECK(sc.intra_mean(0) == doctest::Approx(sc.matrix[0 * n + 1]));
  const std::string csv = seed_correlation_csv(sc, {5, "h"});
  CHECK(csv.find("run,auc3,auc7,auc30,pareto.0,pareto.1,no_pareto.0,no_pareto.1,zero_variance_flags") !=
        std::string::npos);
  CHECK_THROWS_AS(seed_correlation_experiment(fx.view, fx.setup, 1, 5), Error);
}
