// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "hltv/backbone.hpp"
#include "hltv/error.hpp"
#include "hltv/rng.hpp"

using namespace hltv;

namespace {

struct Fixture {
  DataConfig cfg;
  Dataset data;
  std::vector<const LtvSample*> ptrs;

  explicit Fixture(std::size_t n_users = 200) {
    cfg.n_users = n_users;
    cfg.n_games = 20;
    cfg.trials_per_user = 6;
    data = generate_dataset(cfg, 5);
    for (const auto& s : data.samples) ptrs.push_back(&s);
  }
  Batch batch(const Model& m, std::size_t from, std::size_t count) const {
    const std::vector<const LtvSample*> sub(ptrs.begin() + static_cast<long>(from),
                                            ptrs.begin() + static_cast<long>(from + count));
    return make_batch(m.schema, sub, data.catalog.users, data.catalog.games, m.opts.behavior_len);
  }
};

ModelOptions tiny_options() {
  ModelOptions o;
  o.embedding_dim = 4;
  o.hidden = {6, 4};
  o.epnet_hidden = 4;
  return o;
}

ParamStore jitter(const ParamStore& base, std::uint64_t seed, double sd) {
  auto rng = make_stream(seed, "test.jitter");
  std::normal_distribution<double> nd(0.0, sd);
  ParamStore out;
  for (const auto& [name, v] : base.entries()) {
    std::vector<double> x = v.values();
    for (double& e : x) e += nd(rng);
    out.set(name, Tensor(v.shape(), x));
  }
  return out;
}

Var weighted_sum(Tape& t, Var x, std::uint64_t seed) {
  auto rng = make_stream(seed, "test.probe");
  std::normal_distribution<double> nd;
  const auto& v = t.value(x);
  std::vector<double> w(v.size());
  for (double& e : w) e = nd(rng);
  return t.sum(t.mul(x, t.constant(Tensor::matrix(v.rows(), v.cols(), w))));
}

}  // namespace

TEST_CASE("field embeddings, unseen ids and graph seeding") {
  Fixture fx;
  FieldSchema schema = FieldSchema::standard(fx.cfg, 4);
  CHECK(schema.count() == 11);
  CHECK(schema.pairs() == 55);
  const Model m = init_model(schema, tiny_options(), 1);

  LtvSample odd = fx.data.samples[0];
  odd.user_id = 100000;
  const Batch b = make_batch(schema, {&fx.data.samples[0], &odd}, fx.data.catalog.users, fx.data.catalog.games, 20);
  CHECK(b.unseen_ids == 1);
  CHECK(b.codes[0][1] == fx.cfg.n_users);
  Tape t(m.params);
  const auto fields = embed_fields(t, schema, b);
  REQUIRE(fields.size() == 11);
  CHECK(t.value(fields[0]).rows() == 2);
  CHECK(t.value(fields[0]).cols() == 4);
  const auto& table = m.params.at("emb.user_id");
  for (std::size_t c = 0; c < 4; ++c) CHECK(t.value(fields[0])(1, c) == table(fx.cfg.n_users, c));

  Batch bad = b;
  bad.codes[2][0] = 99;
  Tape t2(m.params);
  CHECK_THROWS_AS(embed_fields(t2, schema, bad), Error);

  NodeEmbeddings grl{Tensor::filled(fx.cfg.n_users, 4, 0.25), Tensor::filled(fx.cfg.n_games, 4, -0.5)};
  const Model seeded = init_model(schema, tiny_options(), 1, &grl);
  CHECK(seeded.params.at("emb.user_id")(17, 2) == 0.25);
  CHECK(seeded.params.at("emb.game_id")(3, 0) == -0.5);
  NodeEmbeddings wrong{Tensor::filled(3, 4, 0.0), grl.games};
  CHECK_THROWS_AS(init_model(schema, tiny_options(), 1, &wrong), Error);
}

TEST_CASE("field-weighted pair scores") {
  Tape t;
  const Var a = t.constant(Tensor::matrix(1, 3, {2, 0, 0}));
  const Var b = t.constant(Tensor::matrix(1, 3, {1, 0, 0}));
  const Var c = t.constant(Tensor::matrix(1, 3, {0, 5, 0}));
  const auto zero = t.value(fwfm(t, {a, b, c}, t.constant(Tensor::zeros(1, 3)))).values();
  for (double v : zero) CHECK(v == 0.0);
  const auto s = t.value(fwfm(t, {a, b, c}, t.constant(Tensor::matrix(1, 3, {1, 0, 0})))).values();
  CHECK(s == std::vector<double>{2, 0, 0});

  // Simultaneous permutation of fields and pair weights leaves the score multiset unchanged.
  auto rng = make_stream(3, "perm");
  std::normal_distribution<double> nd;
  std::vector<Var> f;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> v(5);
    for (double& e : v) e = nd(rng);
    f.push_back(t.constant(Tensor::matrix(1, 5, v)));
  }
  std::vector<double> r(6);
  for (double& e : r) e = nd(rng);
  const auto pair = [](int i, int j) {
    if (i > j) std::swap(i, j);
    static const int idx[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return idx[i][j];
  };
  const int perm[4] = {2, 0, 3, 1};
  std::vector<double> rp(6);
  std::vector<Var> fp;
  for (int i = 0; i < 4; ++i) fp.push_back(f[perm[i]]);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) rp[pair(i, j)] = r[pair(perm[i], perm[j])];
  }
  auto s1 = t.value(fwfm(t, f, t.constant(Tensor::matrix(1, 6, r)))).values();
  auto s2 = t.value(fwfm(t, fp, t.constant(Tensor::matrix(1, 6, rp)))).values();
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  for (int k = 0; k < 6; ++k) CHECK(s1[k] == doctest::Approx(s2[k]).epsilon(1e-14));
  CHECK_THROWS_AS(fwfm(t, f, t.constant(Tensor::zeros(1, 5))), Error);
}

TEST_CASE("domain gate modulation") {
  ParamStore p;
  p.set("g.w1", Tensor::filled(8, 4, 0.3));
  p.set("g.b1", Tensor::zeros(1, 4));
  p.set("g.w2", Tensor::zeros(4, 8));
  p.set("g.b2", Tensor::zeros(1, 8));
  std::vector<Var> fields;
  Tape t(p);
  auto rng = make_stream(1, "ep");
  std::normal_distribution<double> nd;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> v(8);
    for (double& e : v) e = nd(rng);
    fields.push_back(t.constant(Tensor::matrix(1, 8, v)));
  }
  const Var x_dom = t.constant(Tensor::filled(1, 8, 1.0));
  const Var ones = epnet_gate(t, x_dom, "g.");
  for (double v : t.value(ones).values()) CHECK(v == 1.0);
  const Var z = epnet_modulate(t, fields, ones);
  REQUIRE(t.value(z).size() == 32);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 8; ++j) CHECK(t.value(z)[i * 8 + j] == t.value(fields[i])[j]);
  }
  p.set("g.b2", Tensor::filled(1, 8, -800.0));
  Tape t2(p);
  const Var zeros = epnet_gate(t2, t2.constant(Tensor::filled(1, 8, 1.0)), "g.");
  std::vector<Var> f2;
  for (Var f : fields) f2.push_back(t2.constant(t.value(f)));
  for (double v : t2.value(epnet_modulate(t2, f2, zeros)).values()) CHECK(v == 0.0);

  p.set("g.b2", Tensor::zeros(1, 8));
  const ParamStore rand = jitter(p, 2, 3.0);
  Tape t3(rand);
  const Var g = epnet_gate(t3, t3.constant(Tensor::matrix(2, 8, std::vector<double>(16, 0.7))), "g.");
  for (double v : t3.value(g).values()) {
    CHECK(v > 0.0);
    CHECK(v < 2.0);
  }
}

namespace {

ParamStore pn_params(std::size_t domains, std::size_t width) {
  ParamStore p;
  p.set("pn.gamma", Tensor::filled(1, width, 1.0));
  p.set("pn.beta", Tensor::zeros(1, width));
  p.set("pn.gamma_dom", Tensor::filled(domains, width, 1.0));
  p.set("pn.beta_dom", Tensor::zeros(domains, width));
  return p;
}

PnState pn_state(std::size_t domains, std::size_t width) {
  return {domains, width, std::vector<double>(domains * width, 0.0), std::vector<double>(domains * width, 1.0),
          std::vector<std::size_t>(domains, 0), 0};
}

}  // namespace

TEST_CASE("partitioned normalization") {
  const ParamStore p = pn_params(2, 1);
  PnState st = pn_state(2, 1);
  {
    Tape t(p);
    PnState upd = st;
    const Var out = partitioned_norm(t, t.constant(Tensor::matrix(3, 1, {1, 7, 3})), {1, 0, 1}, st, Mode::Train, 0.9,
                                     1e-5, "pn.", &upd);
    const auto& v = t.value(out).values();
    CHECK(v[2] == doctest::Approx(0.999995).epsilon(1e-9));
    CHECK(v[0] == doctest::Approx(-0.999995).epsilon(1e-9));
    // Domain 0 has a single row: running stats (0, 1) apply.
    CHECK(v[1] == doctest::Approx(7.0 / std::sqrt(1.0 + 1e-5)).epsilon(1e-12));
    CHECK(upd.fallbacks == 1);
    CHECK(upd.mean[1] == doctest::Approx(0.2));
    CHECK(upd.var[1] == doctest::Approx(0.9 + 0.1 * 1.0));
    CHECK(upd.updates[1] == 1);
    CHECK(upd.updates[0] == 0);
  }
  {
    // Centering in infer mode.
    PnState s2 = st;
    s2.mean = {4.0, -2.0};
    Tape t(p);
    const auto& v = t.value(partitioned_norm(t, t.constant(Tensor::matrix(2, 1, {4.0, -2.0})), {0, 1}, s2,
                                             Mode::Infer, 0.9, 1e-5, "pn."));
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
  }
  {
    // One domain reduces to batch normalization.
    auto rng = make_stream(4, "bn");
    std::normal_distribution<double> nd(3.0, 2.0);
    std::vector<double> x(24);
    for (double& e : x) e = nd(rng);
    const ParamStore p1 = pn_params(1, 3);
    Tape t(p1);
    const auto& v = t.value(partitioned_norm(t, t.constant(Tensor::matrix(8, 3, x)), std::vector<std::size_t>(8, 0),
                                             pn_state(1, 3), Mode::Train, 0.9, 1e-5, "pn."));
    for (std::size_t c = 0; c < 3; ++c) {
      double mu = 0, var = 0;
      for (std::size_t r = 0; r < 8; ++r) mu += x[r * 3 + c] / 8;
      for (std::size_t r = 0; r < 8; ++r) var += (x[r * 3 + c] - mu) * (x[r * 3 + c] - mu) / 8;
      for (std::size_t r = 0; r < 8; ++r) {
        CHECK(v[r * 3 + c] == doctest::Approx((x[r * 3 + c] - mu) / std::sqrt(var + 1e-5)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("running statistics track per-domain means") {
  const ParamStore p = pn_params(2, 1);
  PnState st = pn_state(2, 1);
  auto rng = make_stream(9, "pn.stream");
  std::normal_distribution<double> d0(1.5, 0.5), d1(-3.0, 0.5);
  std::vector<double> x(4096);
  std::vector<std::size_t> dom(4096);
  for (std::size_t i = 0; i < dom.size(); ++i) dom[i] = i % 2;
  for (int batch = 0; batch < 1000; ++batch) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = dom[i] ? d1(rng) : d0(rng);
    Tape t(p);
    PnState next = st;
    partitioned_norm(t, t.constant(Tensor::matrix(4096, 1, x)), dom, st, Mode::Train, 0.9, 1e-5, "pn.", &next);
    st = next;
  }
  CHECK(std::abs(st.mean[0] - 1.5) < 1e-2);
  CHECK(std::abs(st.mean[1] + 3.0) < 1e-2);
  CHECK(st.updates[0] == 1000);
}

namespace {

Batch behavior_batch(const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& rows) {
  Batch b;
  b.size = rows.size();
  b.seq_len = 1;
  for (const auto& r : rows) b.seq_len = std::max(b.seq_len, r.size());
  b.behavior_game.assign(b.size * b.seq_len, 0);
  b.behavior_rank.assign(b.size * b.seq_len, 0);
  b.behavior_valid.assign(b.size * b.seq_len, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      b.behavior_game[i * b.seq_len + k] = rows[i][k].first;
      b.behavior_rank[i * b.seq_len + k] = rows[i][k].second;
      b.behavior_valid[i * b.seq_len + k] = 1.0;
    }
  }
  return b;
}

ParamStore tin_params(std::uint64_t seed) {
  auto rng = make_stream(seed, "tin.test");
  std::normal_distribution<double> nd;
  const auto rnd = [&](std::size_t r, std::size_t c) {
    std::vector<double> v(r * c);
    for (double& e : v) e = nd(rng);
    return Tensor::matrix(r, c, v);
  };
  ParamStore p;
  p.set("games", rnd(5, 4));
  p.set("tin.recency", rnd(3, 4));
  p.set("tin.user_w", rnd(4, 4));
  p.set("tin.user_b", rnd(1, 4));
  p.set("target", rnd(3, 4));
  p.set("user", rnd(3, 4));
  return p;
}

}  // namespace

TEST_CASE("behavior attention pooling") {
  ParamStore p = tin_params(1);
  const Tensor& g = p.at("games");
  const Tensor& target = p.at("target");
  {
    Tape t(p);
    const Batch b = behavior_batch({{}, {}, {}});
    const auto rep = t.value(tin_encode(t, t.param("games"), t.param("target"), t.param("user"), b, "tin."));
    const auto user = t.value(t.affine(t.param("user"), t.param("tin.user_w"), t.param("tin.user_b")));
    CHECK(rep == user);
  }
  {
    // Singleton: alpha = 1, so rep = h (.) t + user path; two equal items split 0.5 / 0.5.
    Tensor rec = p.at("tin.recency");
    std::vector<double> rv = rec.values();
    for (std::size_t c = 0; c < 4; ++c) rv[4 + c] = rv[c];
    p.set("tin.recency", Tensor::matrix(3, 4, rv));
    Tape t(p);
    const Batch b = behavior_batch({{{2, 0}}, {{3, 0}, {3, 1}}, {}});
    const auto rep = t.value(tin_encode(t, t.param("games"), t.param("target"), t.param("user"), b, "tin."));
    const auto user = t.value(t.affine(t.param("user"), t.param("tin.user_w"), t.param("tin.user_b")));
    for (std::size_t c = 0; c < 4; ++c) {
      const double h2 = g(2, c) + rv[c], h3 = g(3, c) + rv[c];
      CHECK(rep(0, c) == doctest::Approx(h2 * target(0, c) + user(0, c)).epsilon(1e-12));
      CHECK(rep(1, c) == doctest::Approx(h3 * target(1, c) + user(1, c)).epsilon(1e-12));
      CHECK(rep(2, c) == doctest::Approx(user(2, c)).epsilon(1e-12));
    }
  }
}

namespace {

ParamStore tower_params(std::uint64_t seed, double gate_bias) {
  auto rng = make_stream(seed, "tower.test");
  std::normal_distribution<double> nd;
  const auto rnd = [&](std::size_t r, std::size_t c) {
    std::vector<double> v(r * c);
    for (double& e : v) e = nd(rng);
    return Tensor::matrix(r, c, v);
  };
  ParamStore p;
  p.set("tw.l0.w", rnd(5, 6));
  p.set("tw.l0.b", rnd(1, 6));
  p.set("tw.l1.w", rnd(6, 3));
  p.set("tw.l1.b", rnd(1, 3));
  for (int l = 0; l < 2; ++l) {
    const std::string pre = "tw.l" + std::to_string(l) + ".";
    p.set(pre + "gate_w", gate_bias == 0.0 ? rnd(2, l ? 3 : 6) : Tensor::zeros(2, l ? 3 : 6));
    p.set(pre + "gate_b", gate_bias == 0.0 ? rnd(1, l ? 3 : 6) : Tensor::filled(1, l ? 3 : 6, gate_bias));
  }
  p.set("x", rnd(4, 5));
  p.set("dom", rnd(4, 2));
  return p;
}

}  // namespace

TEST_CASE("gated tower") {
  {
    const ParamStore p = tower_params(1, 40.0);
    Tape t(p);
    const auto out = tower_forward(t, t.param("x"), t.param("dom"), 2, Mode::Infer, 0.05, "tw.");
    const Var plain = t.relu(t.affine(t.relu(t.affine(t.param("x"), t.param("tw.l0.w"), t.param("tw.l0.b"))),
                                      t.param("tw.l1.w"), t.param("tw.l1.b")));
    CHECK(t.value(out.hidden) == t.value(plain));
    CHECK(out.sparsity == 0.0);
  }
  {
    const ParamStore p = tower_params(1, -800.0);
    Tape t(p);
    const auto out = tower_forward(t, t.param("x"), t.param("dom"), 2, Mode::Train, 0.05, "tw.");
    for (double v : t.value(out.hidden).values()) CHECK(v == 0.0);
    CHECK(out.sparsity == 1.0);
  }
  const ParamStore p = tower_params(2, 0.0);
  double last = -1.0;
  for (double tau : {0.0, 0.05, 0.2, 0.5, 0.8, 0.99}) {
    Tape t(p);
    const auto out = tower_forward(t, t.param("x"), t.param("dom"), 2, Mode::Infer, tau, "tw.");
    CHECK(out.sparsity >= last);
    CHECK(out.sparsity >= 0.0);
    CHECK(out.sparsity <= 1.0);
    last = out.sparsity;
  }
}

TEST_CASE("block gradients match finite differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    {
      ParamStore p;
      auto rng = make_stream(seed, "fd.fwfm");
      std::normal_distribution<double> nd;
      for (int i = 0; i < 4; ++i) {
        std::vector<double> v(12);
        for (double& e : v) e = nd(rng);
        p.set("f" + std::to_string(i), Tensor::matrix(3, 4, v));
      }
      std::vector<double> r(6);
      for (double& e : r) e = nd(rng);
      p.set("r", Tensor::matrix(1, 6, r));
      const auto rep = finite_diff_check(
          [&](Tape& t) {
            std::vector<Var> f;
            for (int i = 0; i < 4; ++i) f.push_back(t.param("f" + std::to_string(i)));
            return weighted_sum(t, fwfm(t, f, t.param("r")), seed);
          },
          p, 1e-6, 1e-4);
      CHECK_MESSAGE(rep.pass, "fwfm " << rep.worst << " " << rep.worst_param);
    }
    {
      ParamStore base;
      base.set("g.w1", Tensor::zeros(4, 5));
      base.set("g.b1", Tensor::zeros(1, 5));
      base.set("g.w2", Tensor::zeros(5, 4));
      base.set("g.b2", Tensor::zeros(1, 4));
      base.set("x", Tensor::zeros(3, 4));
      base.set("f0", Tensor::zeros(3, 4));
      base.set("f1", Tensor::zeros(3, 4));
      const ParamStore p = jitter(base, seed, 1.0);
      const auto rep = finite_diff_check(
          [&](Tape& t) {
            const Var g = epnet_gate(t, t.param("x"), "g.");
            return weighted_sum(t, epnet_modulate(t, {t.param("f0"), t.param("f1")}, g), seed);
          },
          p, 1e-6, 1e-4);
      CHECK_MESSAGE(rep.pass, "epnet " << rep.worst << " " << rep.worst_param);
    }
    {
      ParamStore p = jitter(pn_params(3, 4), seed, 0.5);
      auto rng = make_stream(seed, "fd.pn");
      std::normal_distribution<double> nd;
      std::vector<double> z(40);
      for (double& e : z) e = nd(rng);
      p.set("z", Tensor::matrix(10, 4, z));
      const std::vector<std::size_t> dom{0, 1, 0, 2, 1, 0, 1, 0, 2, 1};
      PnState st = pn_state(3, 4);
      st.mean = std::vector<double>(12, 0.3);
      const auto rep = finite_diff_check(
          [&](Tape& t) {
            return weighted_sum(t, partitioned_norm(t, t.param("z"), dom, st, Mode::Train, 0.9, 1e-5, "pn."), seed);
          },
          p, 1e-6, 1e-4);
      CHECK_MESSAGE(rep.pass, "pn " << rep.worst << " " << rep.worst_param);
    }
    {
      const ParamStore p = tin_params(seed + 10);
      const Batch b = behavior_batch({{{1, 0}, {4, 2}, {0, 1}}, {}, {{2, 0}}});
      const auto rep = finite_diff_check(
          [&](Tape& t) {
            return weighted_sum(t, tin_encode(t, t.param("games"), t.param("target"), t.param("user"), b, "tin."),
                                seed);
          },
          p, 1e-6, 1e-4);
      CHECK_MESSAGE(rep.pass, "tin " << rep.worst << " " << rep.worst_param);
    }
    {
      const ParamStore p = tower_params(seed + 20, 0.0);
      const auto rep = finite_diff_check(
          [&](Tape& t) {
            const auto out = tower_forward(t, t.param("x"), t.param("dom"), 2, Mode::Train, 0.05, "tw.");
            return t.add(weighted_sum(t, out.hidden, seed), t.scale(out.gate_l1, 0.1));
          },
          p, 1e-6, 1e-4);
      CHECK_MESSAGE(rep.pass, "tower " << rep.worst << " " << rep.worst_param);
    }
  }
}

TEST_CASE("full model: determinism, gradients and checkpoint round-trip") {
  Fixture fx;
  const FieldSchema schema = FieldSchema::standard(fx.cfg, 4);
  Model m = init_model(schema, tiny_options(), 3);
  m.params = jitter(m.params, 3, 0.05);
  const Batch b = fx.batch(m, 0, 24);

  Tape t1(m.params), t2(m.params);
  const auto o1 = forward_full(t1, m, b, Mode::Infer);
  const auto o2 = forward_full(t2, m, b, Mode::Infer);
  for (int k = 0; k < 3; ++k) {
    CHECK(t1.value(o1.heads[k].mu) == t2.value(o2.heads[k].mu));
    CHECK(t1.value(o1.heads[k].p_raw).rows() == 24);
  }

  for (std::size_t task = 0; task < 3; ++task) {
    const auto rep = finite_diff_check(
        [&](Tape& t) { return task_loss(t, m, forward_full(t, m, b, Mode::Train), b, task); }, m.params, 1e-6, 1e-4,
        12);
    CHECK_MESSAGE(rep.pass, "task " << task << " worst " << rep.worst << " at " << rep.worst_param);
  }

  PnState upd = m.pn;
  Tape tt(m.params);
  forward_full(tt, m, b, Mode::Train, &upd);
  CHECK(upd.mean != m.pn.mean);
  m.pn = upd;

  const auto dir = std::filesystem::temp_directory_path() / "hltv_backbone";
  std::filesystem::create_directories(dir);
  write_model(dir / "model.json", m, {3, "cafe"}, "seed = 3\n");
  const Model back = read_model(dir / "model.json");
  CHECK(back.params == m.params);
  CHECK(back.pn.mean == m.pn.mean);
  CHECK(back.pn.var == m.pn.var);
  CHECK(back.schema.count() == 11);
  const std::vector<const LtvSample*> some(fx.ptrs.begin(), fx.ptrs.begin() + 50);
  const auto p1 = predict(m, some, fx.data.catalog.users, fx.data.catalog.games);
  const auto p2 = predict(back, some, fx.data.catalog.users, fx.data.catalog.games);
  CHECK(p1.expected == p2.expected);
}

TEST_CASE("predictions stay finite on random inputs") {
  Fixture fx;
  const FieldSchema schema = FieldSchema::standard(fx.cfg, 8);
  ModelOptions o;
  const Model m = init_model(schema, o, 4);
  auto rng = make_stream(6, "random.samples");
  std::uniform_int_distribution<int> uid(-5, 260), gid(-2, 25), dom(0, 2), len(0, 25);
  std::vector<LtvSample> samples(10000);
  for (auto& s : samples) {
    s.user_id = uid(rng);
    s.game_id = gid(rng);
    s.domain_id = dom(rng);
    const int n = len(rng);
    for (int k = 0; k < n; ++k) s.behavior.push_back({gid(rng), k + 1});
  }
  std::vector<const LtvSample*> ptrs;
  for (const auto& s : samples) ptrs.push_back(&s);
  const auto p = predict(m, ptrs, fx.data.catalog.users, fx.data.catalog.games);
  for (int k = 0; k < 3; ++k) {
    REQUIRE(p.expected[k].size() == 10000);
    for (double v : p.expected[k]) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  }
}
