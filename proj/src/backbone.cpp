// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "hltv/error.hpp"
#include "hltv/rng.hpp"
#include "hltv/ziln.hpp"

namespace hltv {

namespace {

constexpr const char* kHeadNames[3] = {"head.y3.", "head.y7.", "head.y30."};
constexpr std::size_t kPredictChunk = 1024;
constexpr double kMaskedScore = -1e9;

std::string emb_name(const FieldSpec& f) { return "emb." + f.name; }

std::size_t table_rows(const FieldSpec& f) { return f.cardinality + (f.has_default ? 1 : 0); }

Tensor normal_tensor(std::size_t rows, std::size_t cols, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, sd);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = nd(rng);
  return Tensor::matrix(rows, cols, std::move(v));
}

Tensor xavier(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> ud(-a, a);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = ud(rng);
  return Tensor::matrix(rows, cols, std::move(v));
}

// Stack B x n matrices vertically via transposes.
Var concat_rows(Tape& t, const std::vector<Var>& parts) {
  if (parts.size() == 1) return parts.front();
  std::vector<Var> tr;
  tr.reserve(parts.size());
  for (Var p : parts) tr.push_back(t.transpose(p));
  return t.transpose(t.concat_cols(tr));
}

}  // namespace

std::size_t FieldSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == name) return i;
  }
  fail(ErrorKind::Invalid, "field schema has no field '" + name + "'");
}

void FieldSchema::validate() const {
  if (fields.size() < 2) fail(ErrorKind::Config, "field schema needs at least two fields");
  if (dim == 0) fail(ErrorKind::Config, "embedding dim must be positive");
  if (domain_field >= fields.size()) fail(ErrorKind::Config, "domain field index out of range");
  for (const auto& f : fields) {
    if (f.cardinality == 0) fail(ErrorKind::Config, "field '" + f.name + "' has zero cardinality");
  }
}

FieldSchema FieldSchema::standard(const DataConfig& cfg, std::size_t dim) {
  FieldSchema s;
  s.dim = dim;
  s.fields = {{"user_id", cfg.n_users, true},
              {"age", cfg.age_card, false},
              {"gender", cfg.gender_card, false},
              {"city_tier", cfg.city_card, false},
              {"pay_count", cfg.pay_card, false},
              {"game_id", cfg.n_games, true},
              {"category", cfg.category_card, false},
              {"battle", cfg.battle_card, false},
              {"market", cfg.market_card, false},
              {"theme", cfg.theme_card, false},
              {"domain", cfg.n_domains, false}};
  s.domain_field = s.fields.size() - 1;
  s.validate();
  return s;
}

void ModelOptions::validate() const {
  if (embedding_dim == 0) fail(ErrorKind::Config, "model.embedding_dim must be positive");
  if (hidden.empty()) fail(ErrorKind::Config, "model.hidden needs at least one layer");
  for (std::size_t h : hidden) {
    if (h == 0) fail(ErrorKind::Config, "model.hidden sizes must be positive");
  }
  if (epnet_hidden == 0) fail(ErrorKind::Config, "model.epnet_hidden must be positive");
  if (!(gate_threshold >= 0.0 && gate_threshold < 1.0)) {
    fail(ErrorKind::Config, "model.gate_threshold must lie in [0, 1)");
  }
  if (!(sparsity_weight >= 0.0)) fail(ErrorKind::Config, "model.sparsity_weight must be >= 0");
  if (!(pn_momentum >= 0.0 && pn_momentum < 1.0)) fail(ErrorKind::Config, "model.pn_momentum must lie in [0, 1)");
  if (!(pn_eps > 0.0)) fail(ErrorKind::Config, "model.pn_eps must be > 0");
  if (behavior_len == 0) fail(ErrorKind::Config, "model.behavior_len must be positive");
  if (!(init_scale > 0.0)) fail(ErrorKind::Config, "model.init_scale must be > 0");
}

Model init_model(const FieldSchema& schema, const ModelOptions& opts, std::uint64_t seed,
                 const NodeEmbeddings* grl) {
  schema.validate();
  opts.validate();
  if (schema.dim != opts.embedding_dim) fail(ErrorKind::Config, "schema and model embedding dims differ");
  Model m;
  m.schema = schema;
  m.opts = opts;
  auto rng = make_stream(seed, "model.init");
  const std::size_t d = schema.dim, c = schema.count(), w = c * d;

  for (const auto& f : schema.fields) {
    m.params.set(emb_name(f), normal_tensor(table_rows(f), d, opts.init_scale, rng));
  }
  if (grl) {
    const auto seed_table = [&](const char* field, const Tensor& src) {
      const auto& f = schema.fields[schema.index_of(field)];
      if (src.cols() != d) fail(ErrorKind::Config, "graph embedding width differs from model embedding dim");
      if (src.rows() != f.cardinality) {
        fail(ErrorKind::Config, std::string("graph embeddings cover ") + std::to_string(src.rows()) + " " +
                                    field + " rows, model expects " + std::to_string(f.cardinality));
      }
      std::vector<double> v = m.params.at(emb_name(f)).values();
      std::copy(src.values().begin(), src.values().end(), v.begin());
      m.params.set(emb_name(f), Tensor::matrix(table_rows(f), d, std::move(v)));
    };
    seed_table("user_id", grl->users);
    seed_table("game_id", grl->games);
  }

  m.params.set("fwfm.r", Tensor::filled(1, schema.pairs(), 1.0));
  m.params.set("epnet.w1", xavier(d, opts.epnet_hidden, rng));
  m.params.set("epnet.b1", Tensor::zeros(1, opts.epnet_hidden));
  m.params.set("epnet.w2", xavier(opts.epnet_hidden, d, rng));
  m.params.set("epnet.b2", Tensor::zeros(1, d));

  const std::size_t k = schema.fields[schema.domain_field].cardinality;
  m.params.set("pn.gamma", Tensor::filled(1, w, 1.0));
  m.params.set("pn.beta", Tensor::zeros(1, w));
  m.params.set("pn.gamma_dom", Tensor::filled(k, w, 1.0));
  m.params.set("pn.beta_dom", Tensor::zeros(k, w));
  m.pn.domains = k;
  m.pn.width = w;
  m.pn.mean.assign(k * w, 0.0);
  m.pn.var.assign(k * w, 1.0);
  m.pn.updates.assign(k, 0);

  m.params.set("tin.recency", normal_tensor(opts.behavior_len, d, opts.init_scale, rng));
  m.params.set("tin.user_w", xavier(d, d, rng));
  m.params.set("tin.user_b", Tensor::zeros(1, d));

  std::size_t in = w + schema.pairs() + d;
  for (std::size_t l = 0; l < opts.hidden.size(); ++l) {
    const std::string p = "tower.l" + std::to_string(l) + ".";
    const std::size_t h = opts.hidden[l];
    m.params.set(p + "w", xavier(in, h, rng));
    m.params.set(p + "b", Tensor::zeros(1, h));
    m.params.set(p + "gate_w", xavier(d, h, rng));
    m.params.set(p + "gate_b", Tensor::filled(1, h, 1.0));
    in = h;
  }
  for (const char* head : kHeadNames) {
    m.params.set(std::string(head) + "w", normal_tensor(in, 3, 0.01, rng));
    m.params.set(std::string(head) + "b", Tensor::matrix(1, 3, {2.0, 0.0, 0.5}));
  }
  return m;
}

std::vector<std::string> frozen_params(const Model& m) {
  if (!m.opts.use_grl || !m.opts.freeze_grl) return {};
  return {"emb.game_id", "emb.user_id"};
}

Batch make_batch(const FieldSchema& schema, const std::vector<const LtvSample*>& samples,
                 const std::vector<UserRecord>& users, const std::vector<GameRecord>& games,
                 std::size_t behavior_len) {
  if (schema.count() != 11 || schema.fields[0].name != "user_id") {
    fail(ErrorKind::Invalid, "make_batch expects the standard field schema");
  }
  Batch b;
  b.size = samples.size();
  b.codes.assign(schema.count(), std::vector<std::size_t>(b.size));
  b.domain.resize(b.size);
  std::size_t longest = 0;
  for (const auto* s : samples) longest = std::max(longest, std::min(s->behavior.size(), behavior_len));
  b.seq_len = std::max<std::size_t>(1, longest);
  b.behavior_game.assign(b.size * b.seq_len, 0);
  b.behavior_rank.assign(b.size * b.seq_len, 0);
  b.behavior_valid.assign(b.size * b.seq_len, 0.0);

  const std::size_t n_users = schema.fields[0].cardinality;
  const std::size_t n_games = schema.fields[5].cardinality;
  const auto code = [&](std::size_t field, long long v) {
    const auto& f = schema.fields[field];
    if (v < 0 || static_cast<std::size_t>(v) >= f.cardinality) {
      fail(ErrorKind::Invalid, "field '" + f.name + "' code " + std::to_string(v) + " outside cardinality " +
                                   std::to_string(f.cardinality));
    }
    return static_cast<std::size_t>(v);
  };

  for (std::size_t i = 0; i < b.size; ++i) {
    const LtvSample& s = *samples[i];
    b.sample_ids.push_back(s.sample_id);
    const bool user_known = s.user_id >= 0 && static_cast<std::size_t>(s.user_id) < n_users &&
                            static_cast<std::size_t>(s.user_id) < users.size();
    const bool game_known = s.game_id >= 0 && static_cast<std::size_t>(s.game_id) < n_games &&
                            static_cast<std::size_t>(s.game_id) < games.size();
    b.unseen_ids += !user_known + !game_known;
    b.codes[0][i] = user_known ? static_cast<std::size_t>(s.user_id) : n_users;
    b.codes[5][i] = game_known ? static_cast<std::size_t>(s.game_id) : n_games;
    if (user_known) {
      const UserRecord& u = users[static_cast<std::size_t>(s.user_id)];
      b.codes[1][i] = code(1, u.age_bucket);
      b.codes[2][i] = code(2, u.gender);
      b.codes[3][i] = code(3, u.city_tier);
      b.codes[4][i] = code(4, std::min<long long>(u.pay_count_bucket, static_cast<long long>(schema.fields[4].cardinality) - 1));
    }
    if (game_known) {
      const GameRecord& g = games[static_cast<std::size_t>(s.game_id)];
      b.codes[6][i] = code(6, g.category);
      b.codes[7][i] = code(7, g.battle_type);
      b.codes[8][i] = code(8, g.market_type);
      b.codes[9][i] = code(9, g.theme);
    }
    b.codes[10][i] = code(10, s.domain_id);
    b.domain[i] = b.codes[10][i];

    const std::size_t len = std::min(s.behavior.size(), behavior_len);
    for (std::size_t k = 0; k < len; ++k) {
      const auto& item = s.behavior[k];
      const bool known = item.game_id >= 0 && static_cast<std::size_t>(item.game_id) < n_games;
      const std::size_t slot = i * b.seq_len + k;
      b.behavior_game[slot] = known ? static_cast<std::size_t>(item.game_id) : n_games;
      const long long rank = std::clamp<long long>(item.recency_rank, 1, static_cast<long long>(behavior_len));
      b.behavior_rank[slot] = static_cast<std::size_t>(rank - 1);
      b.behavior_valid[slot] = 1.0;
    }
    b.y[0].push_back(s.y3);
    b.y[1].push_back(s.y7);
    b.y[2].push_back(s.y30);
  }
  return b;
}

std::vector<Var> embed_fields(Tape& t, const FieldSchema& schema, const Batch& b) {
  if (b.codes.size() != schema.count()) fail(ErrorKind::Invalid, "batch field count differs from schema");
  std::vector<Var> out;
  out.reserve(schema.count());
  for (std::size_t f = 0; f < schema.count(); ++f) {
    const std::size_t rows = table_rows(schema.fields[f]);
    for (std::size_t c : b.codes[f]) {
      if (c >= rows) {
        fail(ErrorKind::Invalid, "field '" + schema.fields[f].name + "' code " + std::to_string(c) +
                                     " outside cardinality " + std::to_string(schema.fields[f].cardinality));
      }
    }
    out.push_back(t.gather_rows(t.param(emb_name(schema.fields[f])), b.codes[f]));
  }
  return out;
}

Var fwfm(Tape& t, const std::vector<Var>& fields, Var r) {
  std::vector<Var> dots;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    for (std::size_t j = i + 1; j < fields.size(); ++j) dots.push_back(t.row_dot(fields[i], fields[j]));
  }
  if (t.value(r).size() != dots.size()) {
    fail(ErrorKind::Invalid, "fwfm: " + std::to_string(t.value(r).size()) + " pair weights for " +
                                 std::to_string(dots.size()) + " pairs");
  }
  return t.mul(t.concat_cols(dots), r);
}

Var epnet_gate(Tape& t, Var x_dom, const std::string& prefix) {
  const Var h = t.relu(t.affine(x_dom, t.param(prefix + "w1"), t.param(prefix + "b1")));
  return t.scale(t.sigmoid(t.affine(h, t.param(prefix + "w2"), t.param(prefix + "b2"))), 2.0);
}

Var epnet_modulate(Tape& t, const std::vector<Var>& fields, Var gate) {
  std::vector<Var> parts;
  parts.reserve(fields.size());
  for (Var f : fields) parts.push_back(t.mul(f, gate));
  return t.concat_cols(parts);
}

Var partitioned_norm(Tape& t, Var z, const std::vector<std::size_t>& domain, const PnState& state,
                     Mode mode, double momentum, double eps, const std::string& prefix, PnState* update) {
  const std::size_t n = t.value(z).rows(), w = t.value(z).cols();
  if (domain.size() != n) fail(ErrorKind::Invalid, "partitioned_norm: domain ids do not match batch rows");
  if (state.width != w || state.mean.size() != state.domains * w || state.var.size() != state.domains * w) {
    fail(ErrorKind::Invalid, "partitioned_norm: running statistics do not match input width");
  }
  std::vector<std::vector<std::size_t>> rows(state.domains);
  for (std::size_t i = 0; i < n; ++i) {
    if (domain[i] >= state.domains) fail(ErrorKind::Invalid, "partitioned_norm: domain id out of range");
    rows[domain[i]].push_back(i);
  }
  const Var gamma = t.param(prefix + "gamma");
  const Var beta = t.param(prefix + "beta");
  const Var gamma_dom = t.param(prefix + "gamma_dom");
  const Var beta_dom = t.param(prefix + "beta_dom");

  std::vector<Var> parts;
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t k = 0; k < state.domains; ++k) {
    const auto& idx = rows[k];
    if (idx.empty()) continue;
    const double cnt = static_cast<double>(idx.size());
    const Var zk = t.gather_rows(z, idx);
    Var centered, inv_std;
    if (mode == Mode::Train && idx.size() >= 2) {
      const Var mu = t.scale(t.sum_cols(zk), 1.0 / cnt);
      centered = t.sub(zk, mu);
      const Var var = t.scale(t.sum_cols(t.square(centered)), 1.0 / cnt);
      inv_std = t.sqrt(t.add_scalar(var, eps));
      if (update) {
        const auto& mv = t.value(mu).values();
        const auto& vv = t.value(var).values();
        for (std::size_t c = 0; c < w; ++c) {
          double& rm = update->mean[k * w + c];
          double& rv = update->var[k * w + c];
          rm = momentum * rm + (1.0 - momentum) * mv[c];
          rv = momentum * rv + (1.0 - momentum) * vv[c];
        }
        ++update->updates[k];
      }
    } else {
      if (mode == Mode::Train && update) ++update->fallbacks;
      const std::vector<double> mu(state.mean.begin() + static_cast<long>(k * w),
                                   state.mean.begin() + static_cast<long>((k + 1) * w));
      std::vector<double> sd(w);
      for (std::size_t c = 0; c < w; ++c) sd[c] = std::sqrt(state.var[k * w + c] + eps);
      centered = t.sub(zk, t.constant(Tensor::matrix(1, w, mu)));
      inv_std = t.constant(Tensor::matrix(1, w, sd));
    }
    const Var normed = t.div(centered, inv_std);
    const Var g = t.mul(gamma, t.gather_rows(gamma_dom, {k}));
    const Var s = t.add(beta, t.gather_rows(beta_dom, {k}));
    parts.push_back(t.add(t.mul(normed, g), s));
    order.insert(order.end(), idx.begin(), idx.end());
  }
  // Rows come out grouped by domain; restore batch order.
  std::vector<std::size_t> inverse(n);
  for (std::size_t pos = 0; pos < n; ++pos) inverse[order[pos]] = pos;
  return t.gather_rows(concat_rows(t, parts), inverse);
}

Var tin_encode(Tape& t, Var game_table, Var target, Var user_emb, const Batch& b, const std::string& prefix) {
  const std::size_t n = b.size, len = b.seq_len, d = t.value(target).cols();
  const Var user_path = t.affine(user_emb, t.param(prefix + "user_w"), t.param(prefix + "user_b"));
  bool any = false;
  for (double v : b.behavior_valid) any = any || v > 0.0;
  if (!any) return user_path;

  std::vector<std::size_t> owner(n * len);
  for (std::size_t i = 0; i < n * len; ++i) owner[i] = i / len;
  const Var h = t.add(t.gather_rows(game_table, b.behavior_game),
                      t.gather_rows(t.param(prefix + "recency"), b.behavior_rank));
  const Var tgt = t.gather_rows(target, owner);
  Var scores = t.reshape(t.scale(t.row_dot(h, tgt), 1.0 / std::sqrt(static_cast<double>(d))), n, len);
  std::vector<double> pad(n * len);
  for (std::size_t i = 0; i < n * len; ++i) pad[i] = b.behavior_valid[i] > 0.0 ? 0.0 : kMaskedScore;
  scores = t.add(scores, t.constant(Tensor::matrix(n, len, pad)));
  // Rows with no behavior get a uniform softmax that the valid mask then zeroes.
  const Var alpha = t.mul(t.softmax_rows(scores), t.constant(Tensor::matrix(n, len, b.behavior_valid)));
  const Var weighted = t.mul(t.reshape(alpha, n * len, 1), t.mul(h, tgt));
  // Segment sum over each sample's slots: (n x len*d) times stacked identities.
  std::vector<double> stack(len * d * d, 0.0);
  for (std::size_t s = 0; s < len; ++s) {
    for (std::size_t c = 0; c < d; ++c) stack[(s * d + c) * d + c] = 1.0;
  }
  const Var pooled = t.matmul(t.reshape(weighted, n, len * d), t.constant(Tensor::matrix(len * d, d, stack)));
  return t.add(pooled, user_path);
}

TowerOutput tower_forward(Tape& t, Var input, Var x_dom, std::size_t layers, Mode mode, double threshold,
                          const std::string& prefix) {
  TowerOutput out;
  Var x = input;
  Var l1 = t.constant(0.0);
  std::size_t below = 0, total = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string p = prefix + "l" + std::to_string(l) + ".";
    const Var h = t.relu(t.affine(x, t.param(p + "w"), t.param(p + "b")));
    Var g = t.sigmoid(t.affine(x_dom, t.param(p + "gate_w"), t.param(p + "gate_b")));
    const auto& gv = t.value(g).values();
    std::vector<double> keep(gv.size());
    for (std::size_t i = 0; i < gv.size(); ++i) {
      keep[i] = gv[i] < threshold ? 0.0 : 1.0;
      below += gv[i] < threshold;
    }
    total += gv.size();
    const std::size_t rows = t.value(g).rows();
    l1 = t.add(l1, t.scale(t.sum(g), 1.0 / static_cast<double>(rows)));
    if (mode == Mode::Infer) g = t.mul(g, t.constant(Tensor::matrix(rows, t.value(g).cols(), keep)));
    x = t.mul(h, g);
  }
  out.hidden = x;
  out.gate_l1 = l1;
  out.sparsity = total ? static_cast<double>(below) / static_cast<double>(total) : 0.0;
  return out;
}

ModelOutput forward_full(Tape& t, const Model& m, const Batch& b, Mode mode, PnState* pn_update) {
  const auto& s = m.schema;
  ModelOutput out;
  out.unseen_ids = b.unseen_ids;
  const auto fields = embed_fields(t, s, b);
  const Var x_dom = fields[s.domain_field];
  const Var pairs = fwfm(t, fields, t.param("fwfm.r"));
  const Var z = epnet_modulate(t, fields, epnet_gate(t, x_dom, "epnet."));
  const Var z_pn = partitioned_norm(t, z, b.domain, m.pn, mode, m.opts.pn_momentum, m.opts.pn_eps, "pn.", pn_update);
  const std::size_t gi = s.index_of("game_id"), ui = s.index_of("user_id");
  const Var rep = tin_encode(t, t.param(emb_name(s.fields[gi])), fields[gi], fields[ui], b, "tin.");
  const auto tower = tower_forward(t, t.concat_cols({z_pn, pairs, rep}), x_dom, m.opts.hidden.size(), mode,
                                   m.opts.gate_threshold, "tower.");
  out.gate_l1 = tower.gate_l1;
  out.sparsity = tower.sparsity;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::string p = kHeadNames[k];
    const Var raw = t.affine(tower.hidden, t.param(p + "w"), t.param(p + "b"));
    out.heads[k] = {t.slice_cols(raw, 0, 1), t.slice_cols(raw, 1, 1), t.slice_cols(raw, 2, 1)};
  }
  return out;
}

Var task_loss(Tape& t, const Model& m, const ModelOutput& out, const Batch& b, std::size_t task) {
  if (task >= 3) fail(ErrorKind::Invalid, "task index must be 0, 1 or 2");
  const auto& h = out.heads[task];
  const Var nll = ziln_nll_loss(t, h.p_raw, h.mu, h.sigma_raw, b.y[task]);
  if (m.opts.sparsity_weight == 0.0) return nll;
  return t.add(nll, t.scale(out.gate_l1, m.opts.sparsity_weight));
}

Prediction predict(const Model& m, const std::vector<const LtvSample*>& samples,
                   const std::vector<UserRecord>& users, const std::vector<GameRecord>& games) {
  Prediction p;
  double sparsity = 0.0;
  std::size_t chunks = 0;
  for (std::size_t start = 0; start < samples.size(); start += kPredictChunk) {
    const std::size_t end = std::min(samples.size(), start + kPredictChunk);
    const std::vector<const LtvSample*> chunk(samples.begin() + static_cast<long>(start),
                                              samples.begin() + static_cast<long>(end));
    const Batch b = make_batch(m.schema, chunk, users, games, m.opts.behavior_len);
    Tape t(m.params);
    const auto out = forward_full(t, m, b, Mode::Infer);
    sparsity += out.sparsity;
    ++chunks;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& pr = t.value(out.heads[k].p_raw).values();
      const auto& mu = t.value(out.heads[k].mu).values();
      const auto& sr = t.value(out.heads[k].sigma_raw).values();
      for (std::size_t i = 0; i < b.size; ++i) {
        const auto z = ziln_predict({pr[i], mu[i], sr[i]});
        if (!std::isfinite(z.expected_value)) fail(ErrorKind::Numeric, "non-finite prediction");
        p.expected[k].push_back(z.expected_value);
        p.purchase_prob[k].push_back(z.purchase_prob);
      }
    }
  }
  p.sparsity = chunks ? sparsity / static_cast<double>(chunks) : 0.0;
  return p;
}

void write_model(const std::filesystem::path& path, const Model& m, const ArtifactMeta& meta,
                 const std::string& config_echo) {
  std::string s = "{\n\"schema_version\":" + std::to_string(kSchemaVersion) +
                  ",\n\"seed\":" + std::to_string(meta.seed) + ",\n\"config_hash\":" + json_string(meta.config_hash) +
                  ",\n\"schema\":{\"dim\":" + std::to_string(m.schema.dim) +
                  ",\"domain_field\":" + std::to_string(m.schema.domain_field) + ",\"fields\":[";
  for (std::size_t i = 0; i < m.schema.count(); ++i) {
    const auto& f = m.schema.fields[i];
    s += std::string(i ? "," : "") + "{\"name\":" + json_string(f.name) +
         ",\"cardinality\":" + std::to_string(f.cardinality) +
         ",\"has_default\":" + (f.has_default ? "true" : "false") + "}";
  }
  const auto& o = m.opts;
  std::vector<double> hidden(o.hidden.begin(), o.hidden.end());
  s += "]},\n\"options\":{\"embedding_dim\":" + std::to_string(o.embedding_dim) + ",\"hidden\":" + json_array(hidden) +
       ",\"epnet_hidden\":" + std::to_string(o.epnet_hidden) + ",\"gate_threshold\":" + fmt_double(o.gate_threshold) +
       ",\"sparsity_weight\":" + fmt_double(o.sparsity_weight) + ",\"pn_momentum\":" + fmt_double(o.pn_momentum) +
       ",\"pn_eps\":" + fmt_double(o.pn_eps) + ",\"behavior_len\":" + std::to_string(o.behavior_len) +
       ",\"use_grl\":" + (o.use_grl ? "true" : "false") + ",\"freeze_grl\":" + (o.freeze_grl ? "true" : "false") +
       ",\"init_scale\":" + fmt_double(o.init_scale) + "},\n\"params\":{";
  bool first = true;
  for (const auto& [name, v] : m.params.entries()) {
    std::vector<double> shape(v.shape().begin(), v.shape().end());
    s += std::string(first ? "\n" : ",\n") + json_string(name) + ":{\"shape\":" + json_array(shape) +
         ",\"values\":" + json_array(v.values()) + "}";
    first = false;
  }
  std::vector<double> updates(m.pn.updates.begin(), m.pn.updates.end());
  s += "},\n\"pn_running\":{\"domains\":" + std::to_string(m.pn.domains) + ",\"width\":" + std::to_string(m.pn.width) +
       ",\"mean\":" + json_array(m.pn.mean) + ",\"var\":" + json_array(m.pn.var) + ",\"updates\":" +
       json_array(updates) + ",\"fallbacks\":" + std::to_string(m.pn.fallbacks) + "},\n\"config\":" +
       json_string(config_echo) + "\n}\n";
  write_text(path, s);
}

Model read_model(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const std::string where = path.string() + ": ";
  Model m;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      fail(ErrorKind::Invalid, where + "unsupported schema_version");
    }
    const auto& js = j.at("schema");
    m.schema.dim = js.at("dim").get<std::size_t>();
    m.schema.domain_field = js.at("domain_field").get<std::size_t>();
    for (const auto& f : js.at("fields")) {
      m.schema.fields.push_back(
          {f.at("name").get<std::string>(), f.at("cardinality").get<std::size_t>(), f.at("has_default").get<bool>()});
    }
    m.schema.validate();
    const auto& jo = j.at("options");
    auto& o = m.opts;
    o.embedding_dim = jo.at("embedding_dim").get<std::size_t>();
    o.hidden.clear();
    for (double h : jo.at("hidden").get<std::vector<double>>()) o.hidden.push_back(static_cast<std::size_t>(h));
    o.epnet_hidden = jo.at("epnet_hidden").get<std::size_t>();
    o.gate_threshold = jo.at("gate_threshold").get<double>();
    o.sparsity_weight = jo.at("sparsity_weight").get<double>();
    o.pn_momentum = jo.at("pn_momentum").get<double>();
    o.pn_eps = jo.at("pn_eps").get<double>();
    o.behavior_len = jo.at("behavior_len").get<std::size_t>();
    o.use_grl = jo.at("use_grl").get<bool>();
    o.freeze_grl = jo.at("freeze_grl").get<bool>();
    o.init_scale = jo.at("init_scale").get<double>();
    o.validate();
    for (const auto& [name, v] : j.at("params").items()) {
      std::vector<std::size_t> shape;
      for (double d : v.at("shape").get<std::vector<double>>()) shape.push_back(static_cast<std::size_t>(d));
      m.params.set(name, Tensor(shape, v.at("values").get<std::vector<double>>()));
    }
    const auto& jp = j.at("pn_running");
    m.pn.domains = jp.at("domains").get<std::size_t>();
    m.pn.width = jp.at("width").get<std::size_t>();
    m.pn.mean = jp.at("mean").get<std::vector<double>>();
    m.pn.var = jp.at("var").get<std::vector<double>>();
    for (double u : jp.at("updates").get<std::vector<double>>()) m.pn.updates.push_back(static_cast<std::size_t>(u));
    m.pn.fallbacks = jp.at("fallbacks").get<std::size_t>();
    if (m.pn.mean.size() != m.pn.domains * m.pn.width || m.pn.var.size() != m.pn.mean.size()) {
      fail(ErrorKind::Invalid, where + "running statistics have the wrong length");
    }
    for (double v : m.pn.var) {
      if (!(v > 0.0)) fail(ErrorKind::Invalid, where + "running variance must be positive");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Invalid, where + "malformed checkpoint: " + e.what());
  }
  return m;
}

}  // namespace hltv
