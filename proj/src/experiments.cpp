// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "hltv/error.hpp"
#include "hltv/rng.hpp"

namespace hltv {

namespace {

const char* const kDropVariants[2] = {"full", "no_grl"};
const char* const kCorrVariants[2] = {"pareto", "no_pareto"};

Model variant_model(const ExperimentSetup& s, bool use_grl, std::uint64_t seed) {
  ModelOptions o = s.model;
  o.use_grl = use_grl;
  if (use_grl && !s.grl) fail(ErrorKind::MissingInput, "graph embeddings are required for the GRL variant");
  return init_model(s.schema, o, seed, use_grl ? s.grl : nullptr);
}

}  // namespace

std::vector<std::size_t> kept_indices(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio < 1.0)) fail(ErrorKind::Config, "drop ratios must lie in [0, 1)");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  auto rng = make_stream(seed, "label_drop.order");
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto dropped = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
  std::vector<std::size_t> kept(perm.begin() + static_cast<long>(dropped), perm.end());
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<LabelDropRow> label_drop_experiment(const TrainData& data, const ExperimentSetup& setup,
                                                const std::vector<double>& ratios, std::uint64_t seed,
                                                std::size_t replicates) {
  if (ratios.empty()) fail(ErrorKind::Config, "eval.drop_ratios must not be empty");
  if (replicates == 0) fail(ErrorKind::Config, "eval.drop_replicates must be at least 1");
  struct Cell {
    std::size_t replicate;
    double ratio;
    std::size_t variant;
    std::array<HorizonMetrics, 3> metrics{};
  };
  std::vector<Cell> cells;
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    for (double r : ratios) {
      for (std::size_t v = 0; v < 2; ++v) cells.push_back({rep, r, v, {}});
    }
  }
  parallel_for(cells.size(), setup.workers, [&](std::size_t i) {
    Cell& c = cells[i];
    // Both variants of a replicate share the subset, init seed and batch stream.
    const std::uint64_t rep_seed = derive_seed(seed, "label_drop.replicate." + std::to_string(c.replicate));
    TrainData sub = data;
    sub.train.clear();
    for (std::size_t k : kept_indices(data.train.size(), c.ratio, rep_seed)) sub.train.push_back(data.train[k]);
    Model m = variant_model(setup, c.variant == 0, derive_seed(rep_seed, "label_drop.init"));
    train_model(m, sub, uniform_weight_vector(), setup.train, rep_seed, "label_drop.batches");
    c.metrics = evaluate_model(m, data.test, data);
  });
  std::vector<LabelDropRow> rows;
  for (const auto& c : cells) {
    for (const auto& h : c.metrics) rows.push_back({c.ratio, kDropVariants[c.variant], h, c.replicate});
  }
  return rows;
}

std::string label_drop_csv(const std::vector<LabelDropRow>& rows, const ArtifactMeta& meta) {
  std::string s = meta_csv_line(meta) + "replicate,ratio,variant,horizon,n_gini,auc,nmae\n";
  for (const auto& r : rows) {
    s += std::to_string(r.replicate) + "," + fmt_double(r.ratio) + "," + r.variant + "," + std::to_string(r.metrics.horizon) + "," +
         fmt_double(r.metrics.n_gini) + "," + fmt_double(r.metrics.auc) + "," + fmt_double(r.metrics.nmae) + "\n";
  }
  return s;
}

std::vector<DropDegradation> drop_degradation(const std::vector<LabelDropRow>& rows) {
  std::map<double, std::array<double, 2>> mean;
  std::map<double, std::array<std::size_t, 2>> count;
  for (const auto& r : rows) {
    const std::size_t v = r.variant == "full" ? 0 : 1;
    mean[r.ratio][v] += r.metrics.n_gini;
    ++count[r.ratio][v];
  }
  for (auto& [ratio, m] : mean) {
    for (std::size_t v = 0; v < 2; ++v) m[v] /= static_cast<double>(std::max<std::size_t>(1, count[ratio][v]));
  }
  const auto base = mean.find(0.0);
  if (base == mean.end()) fail(ErrorKind::Invalid, "label-drop results lack the ratio 0 baseline");
  std::vector<DropDegradation> out;
  for (const auto& [ratio, v] : mean) {
    if (ratio == 0.0) continue;
    out.push_back({ratio, base->second[0] - v[0], base->second[1] - v[1]});
  }
  return out;
}

double SeedCorrelation::intra_mean(std::size_t variant) const {
  const std::size_t n = runs_per_variant, dim = labels.size();
  double sum = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = variant * n; i < (variant + 1) * n; ++i) {
    for (std::size_t j = variant * n; j < (variant + 1) * n; ++j) {
      if (i == j) continue;
      sum += matrix[i * dim + j];
      ++cnt;
    }
  }
  return cnt ? sum / static_cast<double>(cnt) : 0.0;
}

SeedCorrelation seed_correlation_experiment(const TrainData& data, const ExperimentSetup& setup, std::size_t runs,
                                            std::uint64_t seed) {
  if (runs < 2) fail(ErrorKind::Config, "eval.correlation_runs must be at least 2");
  SeedCorrelation out;
  out.runs_per_variant = runs;
  const std::size_t total = 2 * runs;
  out.aucs.resize(total);
  for (std::size_t v = 0; v < 2; ++v) {
    for (std::size_t r = 0; r < runs; ++r) out.labels.push_back(std::string(kCorrVariants[v]) + "." + std::to_string(r));
  }
  parallel_for(total, setup.workers, [&](std::size_t i) {
    const std::size_t v = i / runs, r = i % runs;
    const std::uint64_t run_seed = derive_seed(seed, "seed_correlation.run." + std::to_string(r));
    ExperimentSetup s = setup;
    s.train.pareto.enabled = v == 0;
    Model m = variant_model(s, setup.model.use_grl, run_seed);
    train_model(m, data, uniform_weight_vector(), s.train, run_seed, "seed_correlation.batches");
    const auto metrics = evaluate_model(m, data.test, data);
    for (std::size_t k = 0; k < 3; ++k) out.aucs[i][k] = metrics[k].auc;
  });
  out.matrix.assign(total * total, 0.0);
  out.zero_variance.assign(total * total, false);
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < total; ++j) {
      bool zero = false;
      out.matrix[i * total + j] = pearson(out.aucs[i], out.aucs[j], &zero);
      out.zero_variance[i * total + j] = zero;
    }
  }
  return out;
}

std::string seed_correlation_csv(const SeedCorrelation& s, const ArtifactMeta& meta) {
  std::string out = meta_csv_line(meta) + "run,auc3,auc7,auc30";
  for (const auto& l : s.labels) out += "," + l;
  out += ",zero_variance_flags\n";
  const std::size_t n = s.labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    out += s.labels[i];
    for (double a : s.aucs[i]) out += "," + fmt_double(a);
    std::size_t flags = 0;
    for (std::size_t j = 0; j < n; ++j) {
      out += "," + fmt_double(s.matrix[i * n + j]);
      flags += s.zero_variance[i * n + j];
    }
    out += "," + std::to_string(flags) + "\n";
  }
  return out;
}

}  // namespace hltv
