// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "hltv/error.hpp"
#include "hltv/optim.hpp"
#include "hltv/rng.hpp"
#include "hltv/ziln.hpp"

namespace hltv {

namespace {

std::string id_list(const std::vector<std::int64_t>& ids) {
  std::string s;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 16);
  for (std::size_t i = 0; i < shown; ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  if (ids.size() > shown) s += ",...";
  return s;
}

Var squared_error_loss(Tape& t, const HeadOutput& h, const std::vector<double>& y) {
  const Var pred = ziln_expected_value(t, h.p_raw, h.mu, h.sigma_raw);
  return t.mean(t.square(t.sub(pred, t.constant(Tensor::matrix(y.size(), 1, y)))));
}

// Applies params -= step(d) for the shared parameters only.
class Updater {
 public:
  Updater(const TrainOptions& o) : kind_(o.optimizer), lr_(o.learning_rate), adam_(o.learning_rate) {}

  void apply(ParamStore& p, const std::vector<std::string>& names, const std::vector<double>& d) {
    std::size_t off = 0;
    if (kind_ == OptimizerKind::Adam) {
      GradRecord g;
      for (const auto& n : names) {
        const Tensor& cur = p.at(n);
        g.grads[n] = Tensor(cur.shape(), std::vector<double>(d.begin() + static_cast<long>(off),
                                                             d.begin() + static_cast<long>(off + cur.size())));
        off += cur.size();
      }
      adam_.step(p, g);
      return;
    }
    for (const auto& n : names) {
      const Tensor& cur = p.at(n);
      std::vector<double> v = cur.values();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr_ * d[off + i];
      off += v.size();
      p.set(n, Tensor(cur.shape(), std::move(v)));
    }
  }

 private:
  OptimizerKind kind_;
  double lr_;
  Adam adam_;
};

}  // namespace

const char* loss_kind_name(LossKind k) { return k == LossKind::ZilnNll ? "ziln_nll" : "squared_error"; }

const char* optimizer_name(OptimizerKind k) { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

void TrainOptions::validate() const {
  if (batch_size < 2) fail(ErrorKind::Config, "model.batch_size must be at least 2");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorKind::Config, "model.learning_rate must be finite and >= 0");
  }
  if (!(pareto.qp.epsilon > 0.0)) fail(ErrorKind::Config, "pareto.epsilon must be > 0");
  if (!(pareto.qp.grid_step > 0.0 && pareto.qp.grid_step <= 0.5)) {
    fail(ErrorKind::Config, "pareto.grid_step must lie in (0, 0.5]");
  }
}

TrainData split_view(const Dataset& d) {
  TrainData v;
  v.users = &d.catalog.users;
  v.games = &d.catalog.games;
  for (const auto& s : d.samples) {
    switch (s.split) {
      case Split::Train: v.train.push_back(&s); break;
      case Split::Valid: v.valid.push_back(&s); break;
      case Split::Test: v.test.push_back(&s); break;
    }
  }
  return v;
}

std::vector<std::string> shared_params(const Model& m) {
  const auto frozen = frozen_params(m);
  std::vector<std::string> out;
  for (const auto& [name, v] : m.params.entries()) {
    if (std::find(frozen.begin(), frozen.end(), name) == frozen.end()) out.push_back(name);
  }
  return out;
}

TaskState compute_task_state(const Model& m, const Batch& b, LossKind loss, const std::vector<std::string>& shared,
                             PnState* pn_update) {
  if (b.size == 0) fail(ErrorKind::Invalid, "compute_task_state: empty batch");
  std::size_t dim = 0;
  for (const auto& n : shared) dim += m.params.at(n).size();
  TaskState st;
  st.grads = GradientMatrix(3, dim);
  st.losses.resize(3);
  try {
    Tape t(m.params);
    const auto out = forward_full(t, m, b, Mode::Train, pn_update);
    for (std::size_t k = 0; k < 3; ++k) {
      Var l = loss == LossKind::ZilnNll ? task_loss(t, m, out, b, k) : squared_error_loss(t, out.heads[k], b.y[k]);
      if (loss == LossKind::SquaredError && m.opts.sparsity_weight > 0.0) {
        l = t.add(l, t.scale(out.gate_l1, m.opts.sparsity_weight));
      }
      st.losses[k] = t.value(l).item();
      const GradRecord g = t.backward(l);
      auto row = st.grads.row(k);
      std::size_t off = 0;
      for (const auto& n : shared) {
        const auto& gv = g.grads.at(n).values();
        std::copy(gv.begin(), gv.end(), row.begin() + static_cast<long>(off));
        off += gv.size();
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Numeric) throw;
    fail(ErrorKind::Numeric, std::string(e.what()) + " (batch sample ids: " + id_list(b.sample_ids) + ")");
  }
  return st;
}

TrainResult train_model(Model& m, const TrainData& data, const WeightVector& w, const TrainOptions& opts,
                        std::uint64_t seed, const std::string& stream) {
  opts.validate();
  if (data.train.empty()) fail(ErrorKind::Invalid, "train_model: no training samples");
  auto rng = make_stream(seed, stream);
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  const std::size_t bs = std::min(opts.batch_size, order.size());
  const auto shared = shared_params(m);
  Updater upd(opts);
  TrainResult r;
  r.logs.reserve(opts.steps);
  for (std::size_t step = 0; step < opts.steps; ++step) {
    if (cursor + bs > order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    std::vector<const LtvSample*> chunk;
    chunk.reserve(bs);
    for (std::size_t i = 0; i < bs; ++i) chunk.push_back(data.train[order[cursor + i]]);
    cursor += bs;
    const Batch b = make_batch(m.schema, chunk, *data.users, *data.games, m.opts.behavior_len);
    PnState pn = m.pn;
    const TaskState st = compute_task_state(m, b, opts.loss, shared, &pn);
    Direction dir = nondominating_direction(st, w, opts.pareto);
    dir.log.step = step;
    upd.apply(m.params, shared, dir.d);
    m.pn = std::move(pn);
    r.logs.push_back(std::move(dir.log));
  }
  return r;
}

std::array<HorizonMetrics, 3> evaluate_model(const Model& m, const std::vector<const LtvSample*>& samples,
                                             const TrainData& data) {
  if (samples.empty()) fail(ErrorKind::Invalid, "evaluate_model: no samples");
  const Prediction p = predict(m, samples, *data.users, *data.games);
  std::array<HorizonMetrics, 3> out{};
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<EvalRecord> rec(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const LtvSample& s = *samples[i];
      const double y = k == 0 ? s.y3 : (k == 1 ? s.y7 : s.y30);
      rec[i] = {y, p.expected[k][i], p.purchase_prob[k][i], kHorizons[k]};
    }
    out[k] = evaluate_records(rec);
  }
  return out;
}

std::string metrics_csv(const std::array<HorizonMetrics, 3>& m, const ArtifactMeta& meta) {
  std::string s = meta_csv_line(meta) + "horizon,nmae,auc,n_gini\n";
  for (const auto& h : m) {
    s += std::to_string(h.horizon) + "," + fmt_double(h.nmae) + "," + fmt_double(h.auc) + "," + fmt_double(h.n_gini) +
         "\n";
  }
  return s;
}

std::string step_log_csv(const std::vector<StepLog>& logs, const ArtifactMeta& meta) {
  std::string s = meta_csv_line(meta) +
                  "step,l3,l7,l30,mu_kl,mode,beta1,beta2,beta3,dnd_norm,cos12,cos13,cos23,relaxed,zero12,zero13,zero23\n";
  for (const auto& l : logs) {
    s += std::to_string(l.step);
    for (double v : l.losses) s += "," + fmt_double(v);
    s += "," + fmt_double(l.mu_kl) + "," + mode_name(l.mode);
    for (double v : l.beta) s += "," + fmt_double(v);
    s += "," + fmt_double(l.dnd_norm);
    for (double v : l.cosines) s += "," + fmt_double(v);
    s += std::string(",") + (l.relaxed ? "1" : "0");
    for (bool z : l.zero_norm) s += z ? ",1" : ",0";
    s += "\n";
  }
  return s;
}

double selection_score(const std::array<HorizonMetrics, 3>& m) {
  double mean = 0.0;
  for (const auto& h : m) mean += h.n_gini / 3.0;
  double var = 0.0;
  for (const auto& h : m) var += (h.n_gini - mean) * (h.n_gini - mean) / 3.0;
  return mean - std::sqrt(var);
}

std::size_t select_best(const std::vector<RunResult>& runs) {
  std::size_t best = runs.size();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].ok) continue;
    if (best == runs.size() || runs[i].score > runs[best].score) best = i;
  }
  if (best == runs.size()) fail(ErrorKind::Numeric, "every search run aborted");
  return best;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

SearchResult optimal_search(const Model& init, const TrainData& data, std::size_t runs, const TrainOptions& opts,
                            std::uint64_t seed, std::size_t workers) {
  if (runs == 0) fail(ErrorKind::Config, "pareto.runs must be at least 1");
  if (opts.steps == 0) fail(ErrorKind::Config, "model.steps must be at least 1");
  SearchResult out;
  out.runs.resize(runs);
  auto lam_rng = make_stream(seed, "search.lambda");
  for (std::size_t k = 0; k < runs; ++k) {
    out.runs[k].index = k;
    out.runs[k].lambda = sample_weight_vector(lam_rng);
    out.runs[k].seed = derive_seed(seed, "search.run." + std::to_string(k));
  }
  parallel_for(runs, workers, [&](std::size_t k) {
    RunResult& r = out.runs[k];
    r.model = init;
    try {
      r.logs = train_model(r.model, data, r.lambda, opts, r.seed, "train.batches").logs;
      r.valid = evaluate_model(r.model, data.valid, data);
      r.score = selection_score(r.valid);
      r.ok = std::isfinite(r.score);
      if (!r.ok) r.error = "non-finite selection score";
    } catch (const Error& e) {
      r.ok = false;
      r.error = e.what();
    }
  });
  out.best = select_best(out.runs);
  return out;
}

}  // namespace hltv
