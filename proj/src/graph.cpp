// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/graph.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <set>

#include "hltv/error.hpp"
#include "hltv/optim.hpp"
#include "hltv/rng.hpp"

namespace hltv {

namespace {

void one_hot(std::vector<double>& row, std::size_t& offset, int code, std::size_t card, const char* what) {
  if (code < 0 || static_cast<std::size_t>(code) >= card) {
    fail(ErrorKind::Invalid, std::string(what) + " code " + std::to_string(code) + " outside [0, " +
                                 std::to_string(card) + ")");
  }
  row[offset + static_cast<std::size_t>(code)] = 1.0;
  offset += card;
}

// Row-normalized adjacency (isolated rows stay zero).
Tensor propagation(const MetaPathGraph& g) {
  std::vector<double> p(g.adjacency);
  for (std::size_t i = 0; i < g.n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) deg += p[i * g.n + j];
    if (deg > 0.0) {
      for (std::size_t j = 0; j < g.n; ++j) p[i * g.n + j] /= deg;
    }
  }
  return Tensor::matrix(g.n, g.n, std::move(p));
}

Tensor off_diagonal(std::size_t n) {
  std::vector<double> m(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 0.0;
  return Tensor::matrix(n, n, std::move(m));
}

Tensor xavier(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> ud(-a, a);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = ud(rng);
  return Tensor::matrix(rows, cols, std::move(v));
}

Var one_minus_pow(Tape& t, Var cos, double xi) {
  return t.pow(t.add_scalar(t.scale(cos, -1.0), 1.0), xi);
}

}  // namespace

const char* meta_path_name(MetaPath p) {
  return p == MetaPath::UserGameUser ? "user-game-user" : "game-user-game";
}

std::pair<MetaPathGraph, MetaPathGraph> build_meta_path_graphs(
    const std::vector<InteractionEvent>& events, std::size_t n_users, std::size_t n_games,
    std::int64_t min_day) {
  std::vector<std::set<std::size_t>> games_of(n_users), users_of(n_games);
  for (const auto& e : events) {
    if (e.day_index < min_day) continue;
    if (e.user_id < 0 || static_cast<std::size_t>(e.user_id) >= n_users || e.game_id < 0 ||
        static_cast<std::size_t>(e.game_id) >= n_games) {
      fail(ErrorKind::Invalid, "event references unknown user or game");
    }
    games_of[static_cast<std::size_t>(e.user_id)].insert(static_cast<std::size_t>(e.game_id));
    users_of[static_cast<std::size_t>(e.game_id)].insert(static_cast<std::size_t>(e.user_id));
  }
  MetaPathGraph ug, gg;
  ug.meta_path = MetaPath::UserGameUser;
  ug.n = n_users;
  ug.adjacency.assign(n_users * n_users, 0.0);
  gg.meta_path = MetaPath::GameUserGame;
  gg.n = n_games;
  gg.adjacency.assign(n_games * n_games, 0.0);
  // Each shared neighbour adds one to every pair it connects.
  for (const auto& users : users_of) {
    const std::vector<std::size_t> u(users.begin(), users.end());
    for (std::size_t a = 0; a < u.size(); ++a) {
      for (std::size_t b = a + 1; b < u.size(); ++b) {
        ug.adjacency[u[a] * n_users + u[b]] += 1.0;
        ug.adjacency[u[b] * n_users + u[a]] += 1.0;
      }
    }
  }
  for (const auto& games : games_of) {
    const std::vector<std::size_t> g(games.begin(), games.end());
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = a + 1; b < g.size(); ++b) {
        gg.adjacency[g[a] * n_games + g[b]] += 1.0;
        gg.adjacency[g[b] * n_games + g[a]] += 1.0;
      }
    }
  }
  ug.attributes = Tensor::zeros(n_users, 1);
  gg.attributes = Tensor::zeros(n_games, 1);
  return {std::move(ug), std::move(gg)};
}

Tensor user_attributes(const std::vector<UserRecord>& users, const DataConfig& cfg) {
  const std::size_t d = cfg.age_card + cfg.gender_card + cfg.city_card + cfg.pay_card;
  std::vector<double> v;
  v.reserve(users.size() * d);
  for (const auto& u : users) {
    std::vector<double> row(d, 0.0);
    std::size_t off = 0;
    one_hot(row, off, u.age_bucket, cfg.age_card, "age_bucket");
    one_hot(row, off, u.gender, cfg.gender_card, "gender");
    one_hot(row, off, u.city_tier, cfg.city_card, "city_tier");
    one_hot(row, off, u.pay_count_bucket, cfg.pay_card, "pay_count_bucket");
    v.insert(v.end(), row.begin(), row.end());
  }
  return Tensor::matrix(users.size(), d, std::move(v));
}

Tensor game_attributes(const std::vector<GameRecord>& games, const DataConfig& cfg) {
  const std::size_t d = cfg.category_card + cfg.battle_card + cfg.market_card + cfg.theme_card;
  std::vector<double> v;
  v.reserve(games.size() * d);
  for (const auto& g : games) {
    std::vector<double> row(d, 0.0);
    std::size_t off = 0;
    one_hot(row, off, g.category, cfg.category_card, "category");
    one_hot(row, off, g.battle_type, cfg.battle_card, "battle_type");
    one_hot(row, off, g.market_type, cfg.market_card, "market_type");
    one_hot(row, off, g.theme, cfg.theme_card, "theme");
    v.insert(v.end(), row.begin(), row.end());
  }
  return Tensor::matrix(games.size(), d, std::move(v));
}

std::pair<MetaPathGraph, MaskPlan> apply_mask(const MetaPathGraph& g, const MaskRates& rates,
                                              std::mt19937_64& rng) {
  for (double r : {rates.attributes, rates.edges}) {
    if (!(r >= 0.0 && r < 1.0)) fail(ErrorKind::Invalid, "mask rates must lie in [0, 1)");
  }
  MetaPathGraph m = g;
  MaskPlan plan;
  const auto n_nodes = static_cast<std::size_t>(std::floor(rates.attributes * static_cast<double>(g.n)));
  if (n_nodes > 0) {
    std::vector<std::size_t> idx(g.n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(n_nodes);
    std::sort(idx.begin(), idx.end());
    const std::size_t d = g.attributes.cols();
    std::vector<double> attrs = g.attributes.values();
    for (std::size_t v : idx) {
      plan.node_attributes.emplace_back(attrs.begin() + static_cast<long>(v * d),
                                        attrs.begin() + static_cast<long>((v + 1) * d));
      std::fill(attrs.begin() + static_cast<long>(v * d), attrs.begin() + static_cast<long>((v + 1) * d), 0.0);
    }
    m.attributes = Tensor::matrix(g.n, d, std::move(attrs));
    plan.masked_nodes = std::move(idx);
  }
  std::vector<MaskedEdge> edges;
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = i + 1; j < g.n; ++j) {
      if (g.weight(i, j) != 0.0) edges.push_back({i, j, g.weight(i, j)});
    }
  }
  const auto n_edges = static_cast<std::size_t>(std::floor(rates.edges * static_cast<double>(edges.size())));
  if (n_edges > 0) {
    std::shuffle(edges.begin(), edges.end(), rng);
    edges.resize(n_edges);
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
      return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    for (const auto& e : edges) {
      m.adjacency[e.i * g.n + e.j] = 0.0;
      m.adjacency[e.j * g.n + e.i] = 0.0;
    }
    plan.masked_edges = std::move(edges);
  }
  return {std::move(m), std::move(plan)};
}

MetaPathGraph restore_mask(const MetaPathGraph& masked, const MaskPlan& plan) {
  MetaPathGraph g = masked;
  const std::size_t d = masked.attributes.cols();
  std::vector<double> attrs = masked.attributes.values();
  for (std::size_t k = 0; k < plan.masked_nodes.size(); ++k) {
    std::copy(plan.node_attributes[k].begin(), plan.node_attributes[k].end(),
              attrs.begin() + static_cast<long>(plan.masked_nodes[k] * d));
  }
  g.attributes = Tensor::matrix(masked.n, d, std::move(attrs));
  for (const auto& e : plan.masked_edges) {
    g.adjacency[e.i * g.n + e.j] = e.weight;
    g.adjacency[e.j * g.n + e.i] = e.weight;
  }
  return g;
}

void GrlOptions::validate() const {
  if (embedding_dim == 0 || hidden_dim == 0) fail(ErrorKind::Config, "grl dimensions must be positive");
  if (epochs == 0) fail(ErrorKind::Config, "grl.epochs must be at least 1");
  if (!(learning_rate >= 0.0)) fail(ErrorKind::Config, "grl.learning_rate must be non-negative");
  if (!(xi_edge >= 1.0) || !(xi_attr >= 1.0)) fail(ErrorKind::Config, "grl.xi_edge and grl.xi_attr must be >= 1");
  if (!(zeta >= 0.0)) fail(ErrorKind::Config, "grl.zeta must be non-negative");
  for (double r : {mask.attributes, mask.edges}) {
    if (!(r >= 0.0 && r < 1.0)) fail(ErrorKind::Config, "grl mask rates must lie in [0, 1)");
  }
}

ParamStore init_grl_params(std::size_t user_attr_dim, std::size_t game_attr_dim,
                           const GrlOptions& opts, std::uint64_t seed) {
  auto rng = make_stream(seed, "grl.init");
  ParamStore p;
  for (const auto& [prefix, d] : {std::pair<std::string, std::size_t>{"grl.user.", user_attr_dim},
                                  std::pair<std::string, std::size_t>{"grl.game.", game_attr_dim}}) {
    p.set(prefix + "w1", xavier(d, opts.hidden_dim, rng));
    p.set(prefix + "b1", Tensor::zeros(1, opts.hidden_dim));
    p.set(prefix + "w2", xavier(opts.hidden_dim, opts.embedding_dim, rng));
    p.set(prefix + "b2", Tensor::zeros(1, opts.embedding_dim));
    p.set(prefix + "wd", xavier(opts.embedding_dim, d, rng));
    p.set(prefix + "bd", Tensor::zeros(1, d));
  }
  return p;
}

GrlForward grl_forward(Tape& t, const MetaPathGraph& masked, const std::string& prefix) {
  const Var x = t.constant(masked.attributes);
  const Var prop = t.constant(propagation(masked));
  const Var h1 = t.tanh(t.affine(t.add(x, t.matmul(prop, x)), t.param(prefix + "w1"), t.param(prefix + "b1")));
  const Var h2 = t.tanh(t.affine(t.add(h1, t.matmul(prop, h1)), t.param(prefix + "w2"), t.param(prefix + "b2")));
  GrlForward f;
  f.embeddings = h2;
  f.adj_hat = t.mul(t.matmul(h2, t.transpose(h2)), t.constant(off_diagonal(masked.n)));
  f.attr_hat = t.affine(h2, t.param(prefix + "wd"), t.param(prefix + "bd"));
  return f;
}

GrlLoss grl_loss(Tape& t, const std::vector<ReconstructionTerm>& terms, double xi_edge,
                 double xi_attr, double zeta) {
  if (terms.empty()) fail(ErrorKind::Invalid, "grl_loss needs at least one meta path");
  GrlLoss out;
  std::vector<Var> edge_terms, attr_sums;
  std::size_t masked_total = 0;
  for (const auto& term : terms) {
    const Tensor& ah = t.value(term.adj_hat);
    if (!term.adj_true || term.adj_true->size() != ah.size()) fail(ErrorKind::Invalid, "grl_loss: adjacency shape mismatch");
    std::size_t zr = 0;
    const Var cos = t.row_cosine(t.constant(Tensor::matrix(ah.rows(), ah.cols(), *term.adj_true)), term.adj_hat, &zr);
    out.zero_rows += zr;
    edge_terms.push_back(t.mean(one_minus_pow(t, cos, xi_edge)));
    if (!term.masked_nodes.empty()) {
      const Tensor& truth = *term.attr_true;
      const std::size_t d = truth.cols();
      std::vector<double> rows;
      for (std::size_t v : term.masked_nodes) {
        for (std::size_t c = 0; c < d; ++c) rows.push_back(truth(v, c));
      }
      std::size_t za = 0;
      const Var ca = t.row_cosine(t.constant(Tensor::matrix(term.masked_nodes.size(), d, std::move(rows))),
                                  t.gather_rows(term.attr_hat, term.masked_nodes), &za);
      out.zero_rows += za;
      attr_sums.push_back(t.sum(one_minus_pow(t, ca, xi_attr)));
      masked_total += term.masked_nodes.size();
    }
  }
  Var edge = edge_terms[0];
  for (std::size_t k = 1; k < edge_terms.size(); ++k) edge = t.add(edge, edge_terms[k]);
  out.edge = t.scale(edge, 1.0 / static_cast<double>(edge_terms.size()));
  if (attr_sums.empty()) {
    out.attr = t.constant(0.0);
  } else {
    Var a = attr_sums[0];
    for (std::size_t k = 1; k < attr_sums.size(); ++k) a = t.add(a, attr_sums[k]);
    out.attr = t.scale(a, 1.0 / static_cast<double>(masked_total));
  }
  out.total = t.add(out.attr, t.scale(out.edge, zeta));
  return out;
}

GrlTrainResult train_grl(const MetaPathGraph& user_graph, const MetaPathGraph& game_graph,
                         const GrlOptions& opts, std::uint64_t seed) {
  opts.validate();
  GrlTrainResult r;
  r.params = init_grl_params(user_graph.attributes.cols(), game_graph.attributes.cols(), opts, seed);
  auto mask_rng = make_stream(seed, "grl.mask");
  Adam adam(opts.learning_rate);
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    auto [mu, pu] = apply_mask(user_graph, opts.mask, mask_rng);
    auto [mg, pg] = apply_mask(game_graph, opts.mask, mask_rng);
    Tape t(r.params);
    const auto fu = grl_forward(t, mu, "grl.user.");
    const auto fg = grl_forward(t, mg, "grl.game.");
    std::vector<ReconstructionTerm> terms{
        {fu.adj_hat, fu.attr_hat, &user_graph.adjacency, &user_graph.attributes, pu.masked_nodes},
        {fg.adj_hat, fg.attr_hat, &game_graph.adjacency, &game_graph.attributes, pg.masked_nodes}};
    const GrlLoss loss = grl_loss(t, terms, opts.xi_edge, opts.xi_attr, opts.zeta);
    const double value = t.value(loss.total).item();
    if (!std::isfinite(value)) {
      fail(ErrorKind::Numeric, "graph pretraining loss is not finite at epoch " + std::to_string(epoch));
    }
    r.loss_trace.push_back(value);
    r.zero_row_events += loss.zero_rows;
    adam.step(r.params, t.backward(loss.total));
  }
  return r;
}

Tensor grl_embeddings(const ParamStore& params, const MetaPathGraph& g, const std::string& prefix) {
  Tape t(params);
  return t.value(grl_forward(t, g, prefix).embeddings);
}

void write_embeddings(const std::filesystem::path& p, const NodeEmbeddings& e, const ArtifactMeta& meta) {
  std::string s = meta_json_line(meta);
  for (const auto& [kind, table] : {std::pair<const char*, const Tensor*>{"user", &e.users},
                                    std::pair<const char*, const Tensor*>{"game", &e.games}}) {
    const std::size_t d = table->cols();
    for (std::size_t i = 0; i < table->rows(); ++i) {
      const std::span<const double> row(table->values().data() + i * d, d);
      s += "{\"node_kind\":\"" + std::string(kind) + "\",\"node_id\":" + std::to_string(i) +
           ",\"vector\":" + json_array(row) + "}\n";
    }
  }
  write_text(p, s);
}

NodeEmbeddings read_embeddings(const std::filesystem::path& p) {
  std::vector<double> users, games;
  std::size_t dim = 0, nu = 0, ng = 0;
  for_each_jsonl(p, [&](const std::string& text, std::size_t line) {
    const std::string where = p.string() + ":" + std::to_string(line) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      fail(ErrorKind::Invalid, where + "malformed record");
    }
    if (!j.is_object() || j.size() != 3 || !j.contains("node_kind") || !j.contains("node_id") || !j.contains("vector")) {
      fail(ErrorKind::Invalid, where + "expected fields node_kind, node_id, vector");
    }
    const auto kind = j["node_kind"].get<std::string>();
    const auto vec = j["vector"].get<std::vector<double>>();
    if (dim == 0) dim = vec.size();
    if (vec.empty() || vec.size() != dim) fail(ErrorKind::Invalid, where + "inconsistent vector length");
    for (double v : vec) {
      if (!std::isfinite(v)) fail(ErrorKind::Numeric, where + "non-finite embedding value");
    }
    const auto id = j["node_id"].get<std::size_t>();
    if (kind == "user") {
      if (id != nu++) fail(ErrorKind::Invalid, where + "user ids must be dense and ordered");
      users.insert(users.end(), vec.begin(), vec.end());
    } else if (kind == "game") {
      if (id != ng++) fail(ErrorKind::Invalid, where + "game ids must be dense and ordered");
      games.insert(games.end(), vec.begin(), vec.end());
    } else {
      fail(ErrorKind::Invalid, where + "unknown node_kind '" + kind + "'");
    }
  });
  if (dim == 0) fail(ErrorKind::Invalid, p.string() + ": no embeddings");
  return {Tensor::matrix(nu, dim, std::move(users)), Tensor::matrix(ng, dim, std::move(games))};
}

}  // namespace hltv
