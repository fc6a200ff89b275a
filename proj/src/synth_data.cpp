// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <set>

#include "hltv/error.hpp"
#include "hltv/rng.hpp"

namespace hltv {

namespace {

using nlohmann::json;

constexpr std::size_t kLabelDays = 30;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

int bucket(double unit, std::size_t card) {
  const auto b = static_cast<long>(std::floor(unit * static_cast<double>(card)));
  return static_cast<int>(std::clamp<long>(b, 0, static_cast<long>(card) - 1));
}

void check_rate(const char* name, double r) {
  if (!(r > 0.0 && r <= 1.0)) {
    fail(ErrorKind::Config, std::string("funnel rate ") + name + " must lie in (0, 1], got " +
                                fmt_double(r));
  }
}

// Per-tier game choice weights.
std::vector<std::discrete_distribution<std::size_t>> tier_choosers(const DataConfig& cfg,
                                                                    const Catalog& c) {
  std::vector<std::discrete_distribution<std::size_t>> out;
  for (std::size_t t = 0; t < cfg.n_clusters; ++t) {
    std::vector<double> w;
    for (const auto& g : c.games) w.push_back(g.tier == static_cast<int>(t) ? cfg.affinity_boost : 1.0);
    out.emplace_back(w.begin(), w.end());
  }
  return out;
}

[[noreturn]] void bad_line(const std::filesystem::path& p, std::size_t line, const std::string& why) {
  fail(ErrorKind::Invalid, p.string() + ":" + std::to_string(line) + ": " + why);
}

json parse_line(const std::filesystem::path& p, const std::string& text, std::size_t line,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad_line(p, line, std::string("malformed record (") + e.what() + ")");
  }
  if (!j.is_object()) bad_line(p, line, "record is not an object");
  std::set<std::string> known;
  for (const char* k : required) {
    known.insert(k);
    if (!j.contains(k)) bad_line(p, line, std::string("missing field '") + k + "'");
  }
  for (const char* k : optional) known.insert(k);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) bad_line(p, line, "unknown field '" + it.key() + "'");
  }
  return j;
}

template <class T>
T field(const json& j, const char* key, const std::filesystem::path& p, std::size_t line) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad_line(p, line, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

void DataConfig::validate() const {
  auto positive = [](const char* name, std::size_t v) {
    if (v == 0) fail(ErrorKind::Config, std::string("data.") + name + " must be positive");
  };
  positive("n_users", n_users);
  positive("n_games", n_games);
  positive("n_domains", n_domains);
  positive("n_clusters", n_clusters);
  positive("age_card", age_card);
  positive("gender_card", gender_card);
  positive("city_card", city_card);
  positive("pay_card", pay_card);
  positive("category_card", category_card);
  positive("battle_card", battle_card);
  positive("market_card", market_card);
  positive("theme_card", theme_card);
  positive("trials_per_user", trials_per_user);
  positive("history_days", history_days);
  if (trials_per_user > n_games) fail(ErrorKind::Config, "data.trials_per_user exceeds data.n_games");
  check_rate("exposure", rates.exposure);
  check_rate("click", rates.click);
  check_rate("registration", rates.registration);
  check_rate("purchase", rates.purchase);
  for (const auto* v : {&domain_funnel_mult, &domain_buy_mult, &domain_spend_scale}) {
    if (v->size() != n_domains) fail(ErrorKind::Config, "per-domain arrays must have n_domains entries");
    for (double x : *v) {
      if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorKind::Config, "per-domain multipliers must be positive");
    }
  }
  if (!(user_value_sigma > 0) || !(game_value_sigma > 0) || !(spend_sigma > 0)) {
    fail(ErrorKind::Config, "lognormal scales must be positive");
  }
  if (!(buy_rate > 0 && buy_rate <= 1)) fail(ErrorKind::Config, "data.buy_rate must lie in (0, 1]");
  if (!(first_pay_prob > 0 && first_pay_prob <= 1)) fail(ErrorKind::Config, "data.first_pay_prob must lie in (0, 1]");
  if (!(daily_pay_prob >= 0 && daily_pay_prob <= 1)) fail(ErrorKind::Config, "data.daily_pay_prob must lie in [0, 1]");
  if (!(affinity_boost > 0)) fail(ErrorKind::Config, "data.affinity_boost must be positive");
  if (!(history_rate >= 0)) fail(ErrorKind::Config, "data.history_rate must be non-negative");
  if (grl_window_days == 0 || grl_window_days > history_days) {
    fail(ErrorKind::Config, "data.grl_window_days must lie in [1, history_days]");
  }
  for (double r : split) {
    if (!(r >= 0.0)) fail(ErrorKind::Config, "data.split ratios must be non-negative");
  }
  if (std::abs(split[0] + split[1] + split[2] - 1.0) > 1e-9) fail(ErrorKind::Config, "data.split must sum to 1");
}

Catalog generate_catalog(const DataConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Catalog c;
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);

  auto urng = make_stream(seed, "catalog.users");
  c.users.resize(cfg.n_users);
  for (std::size_t i = 0; i < cfg.n_users; ++i) {
    auto& u = c.users[i];
    const double z = nd(urng);
    u.user_id = static_cast<std::int64_t>(i);
    u.latent_value = std::exp(cfg.user_value_mu + cfg.user_value_sigma * z);
    u.tier = bucket(normal_cdf(z + 0.35 * nd(urng)), cfg.n_clusters);
    u.age_bucket = bucket(ud(urng), cfg.age_card);
    u.gender = bucket(ud(urng), cfg.gender_card);
    u.city_tier = bucket(normal_cdf(0.6 * z + 0.8 * nd(urng)), cfg.city_card);
  }

  auto grng = make_stream(seed, "catalog.games");
  c.games.resize(cfg.n_games);
  const double mid = 0.5 * static_cast<double>(cfg.n_clusters - 1);
  for (std::size_t i = 0; i < cfg.n_games; ++i) {
    auto& g = c.games[i];
    g.game_id = static_cast<std::int64_t>(i);
    g.tier = static_cast<int>(i % cfg.n_clusters);
    g.monetization = std::exp(cfg.game_value_mu + 0.25 * (g.tier - mid) + cfg.game_value_sigma * nd(grng));
    g.category = ud(grng) < 0.7 ? static_cast<int>(g.tier % cfg.category_card) : bucket(ud(grng), cfg.category_card);
    g.battle_type = bucket(ud(grng), cfg.battle_card);
    g.market_type = bucket(ud(grng), cfg.market_card);
    g.theme = bucket(ud(grng), cfg.theme_card);
  }
  return c;
}

std::vector<InteractionEvent> generate_history(const DataConfig& cfg, Catalog& catalog,
                                               std::uint64_t seed) {
  auto rng = make_stream(seed, "history");
  auto choosers = tier_choosers(cfg, catalog);
  std::uniform_int_distribution<std::int64_t> day(0, static_cast<std::int64_t>(cfg.history_days) - 1);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double median = std::exp(cfg.user_value_mu);
  std::vector<InteractionEvent> events;
  for (auto& u : catalog.users) {
    const double rate = cfg.history_rate * std::sqrt(u.latent_value / median);
    std::poisson_distribution<int> count_dist(std::max(rate, 1e-12));
    const int count = std::min(count_dist(rng), 60);
    for (int k = 0; k < count; ++k) {
      const auto gi = choosers[u.tier](rng);
      const auto& g = catalog.games[gi];
      InteractionEvent e;
      e.user_id = u.user_id;
      e.game_id = g.game_id;
      e.day_index = day(rng);
      e.spend = std::exp(std::log(u.latent_value * g.monetization) + cfg.spend_sigma * nd(rng));
      events.push_back(e);
    }
    const int b = static_cast<int>(std::floor(std::log2(1.0 + count)));
    u.pay_count_bucket = std::min(b, static_cast<int>(cfg.pay_card) - 1);
  }
  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    if (a.user_id != b.user_id) return a.user_id < b.user_id;
    if (a.day_index != b.day_index) return a.day_index < b.day_index;
    return a.game_id < b.game_id;
  });
  return events;
}

void run_funnel(std::vector<FunnelTrial>& trials, const FunnelRates& rates,
                const std::vector<double>& domain_mult, std::mt19937_64& rng) {
  check_rate("exposure", rates.exposure);
  check_rate("click", rates.click);
  check_rate("registration", rates.registration);
  check_rate("purchase", rates.purchase);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (auto& t : trials) {
    const double m = domain_mult.empty() ? 1.0 : domain_mult.at(static_cast<std::size_t>(t.domain_id));
    t.exposed = ud(rng) < rates.exposure;
    t.clicked = t.exposed && ud(rng) < std::min(1.0, rates.click * m);
    t.registered = t.clicked && ud(rng) < std::min(1.0, rates.registration * m);
    t.purchased = t.registered && ud(rng) < rates.purchase;
  }
}

std::vector<FunnelTrial> simulate_funnel(const DataConfig& cfg, const Catalog& catalog,
                                         std::uint64_t seed) {
  auto rng = make_stream(seed, "funnel");
  std::uniform_int_distribution<int> dom(0, static_cast<int>(cfg.n_domains) - 1);
  std::vector<FunnelTrial> trials;
  trials.reserve(catalog.users.size() * cfg.trials_per_user);
  for (const auto& u : catalog.users) {
    std::vector<double> w;
    for (const auto& g : catalog.games) w.push_back(g.tier == u.tier ? cfg.affinity_boost : 1.0);
    for (std::size_t k = 0; k < cfg.trials_per_user; ++k) {
      std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
      const std::size_t gi = pick(rng);
      w[gi] = 0.0;
      FunnelTrial t;
      t.user_id = u.user_id;
      t.game_id = catalog.games[gi].game_id;
      t.domain_id = dom(rng);
      trials.push_back(t);
    }
  }
  run_funnel(trials, cfg.rates, cfg.domain_funnel_mult, rng);
  return trials;
}

double purchase_probability(const DataConfig& cfg, const UserRecord& u, const GameRecord& g,
                            int domain) {
  const double mean_value = std::exp(cfg.user_value_mu + 0.5 * cfg.user_value_sigma * cfg.user_value_sigma);
  const double affinity = u.tier == g.tier ? cfg.affinity_boost : 1.0;
  const double p = cfg.buy_rate * cfg.domain_buy_mult.at(static_cast<std::size_t>(domain)) *
                   std::pow(u.latent_value / mean_value, cfg.value_elasticity) * affinity;
  return std::min(0.95, p);
}

std::vector<LtvSample> generate_labels(const DataConfig& cfg, const Catalog& catalog,
                                       const std::vector<InteractionEvent>& history,
                                       const std::vector<FunnelTrial>& trials,
                                       std::uint64_t seed) {
  auto rng = make_stream(seed, "labels");
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::geometric_distribution<int> first_day(cfg.first_pay_prob);

  // Event ranges per user (history is sorted by user, then day).
  std::vector<std::pair<std::size_t, std::size_t>> range(catalog.users.size(), {0, 0});
  for (std::size_t i = 0; i < history.size();) {
    std::size_t j = i;
    while (j < history.size() && history[j].user_id == history[i].user_id) ++j;
    range.at(static_cast<std::size_t>(history[i].user_id)) = {i, j};
    i = j;
  }

  std::vector<LtvSample> out;
  for (const auto& t : trials) {
    if (!t.registered) continue;
    const auto& u = catalog.users.at(static_cast<std::size_t>(t.user_id));
    const auto& g = catalog.games.at(static_cast<std::size_t>(t.game_id));
    LtvSample s;
    s.sample_id = static_cast<std::int64_t>(out.size());
    s.user_id = t.user_id;
    s.game_id = t.game_id;
    s.domain_id = t.domain_id;
    const auto [lo, hi] = range[static_cast<std::size_t>(t.user_id)];
    int rank = 1;
    for (std::size_t k = hi; k > lo && s.behavior.size() < cfg.behavior_len; --k) {
      s.behavior.push_back({history[k - 1].game_id, rank++});
    }
    if (ud(rng) < purchase_probability(cfg, u, g, t.domain_id)) {
      const double loc = std::log(u.latent_value * g.monetization *
                                  cfg.domain_spend_scale[static_cast<std::size_t>(t.domain_id)]);
      const auto start = static_cast<std::size_t>(std::min(first_day(rng), static_cast<int>(kLabelDays) - 1));
      double cum = 0.0;
      for (std::size_t d = 0; d < kLabelDays; ++d) {
        if (d == start || (d > start && ud(rng) < cfg.daily_pay_prob)) {
          cum += std::exp(loc + cfg.spend_sigma * nd(rng));
        }
        if (d == 2) s.y3 = cum;
        if (d == 6) s.y7 = cum;
      }
      s.y30 = cum;
    }
    out.push_back(std::move(s));
  }
  return out;
}

void split_dataset(std::vector<LtvSample>& samples, const std::array<double, 3>& ratios,
                   std::uint64_t seed) {
  for (double r : ratios) {
    if (!(r >= 0.0)) fail(ErrorKind::Invalid, "split ratios must be non-negative");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    fail(ErrorKind::Invalid, "split ratios must sum to 1");
  }
  auto rng = make_stream(seed, "split");
  std::array<std::size_t, 3> totals{};
  for (int stratum = 0; stratum < 2; ++stratum) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if ((samples[i].y30 > 0.0) == (stratum == 1)) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const double n = static_cast<double>(idx.size());
    std::array<std::size_t, 3> cnt{};
    std::array<double, 3> frac{};
    std::size_t used = 0;
    for (int k = 0; k < 3; ++k) {
      const double exact = ratios[k] * n;
      cnt[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
      frac[k] = exact - static_cast<double>(cnt[k]);
      used += cnt[k];
    }
    // Largest remainder, earlier splits first on ties.
    while (used < idx.size()) {
      int best = 0;
      for (int k = 1; k < 3; ++k) {
        if (frac[k] > frac[best]) best = k;
      }
      ++cnt[best];
      frac[best] = -1.0;
      ++used;
    }
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
      for (std::size_t c = 0; c < cnt[k]; ++c) samples[idx[pos++]].split = static_cast<Split>(k);
      totals[k] += cnt[k];
    }
  }
  for (int k = 0; k < 3; ++k) {
    if (totals[k] == 0) {
      fail(ErrorKind::Invalid, std::string("split '") + split_name(static_cast<Split>(k)) + "' would be empty");
    }
  }
}

Dataset generate_dataset(const DataConfig& cfg, std::uint64_t seed) {
  Dataset d;
  d.catalog = generate_catalog(cfg, seed);
  d.events = generate_history(cfg, d.catalog, seed);
  d.trials = simulate_funnel(cfg, d.catalog, seed);
  d.samples = generate_labels(cfg, d.catalog, d.events, d.trials, seed);
  if (d.samples.empty()) fail(ErrorKind::Config, "funnel produced no registrations; raise the funnel rates");
  split_dataset(d.samples, cfg.split, seed);
  return d;
}

std::string funnel_report_csv(const std::vector<FunnelTrial>& trials, std::size_t n_domains) {
  std::vector<std::array<std::size_t, 5>> c(n_domains, std::array<std::size_t, 5>{});
  for (const auto& t : trials) {
    auto& r = c.at(static_cast<std::size_t>(t.domain_id));
    ++r[0];
    r[1] += t.exposed;
    r[2] += t.clicked;
    r[3] += t.registered;
    r[4] += t.purchased;
  }
  std::string s = "domain_id,trials,exposed,clicked,registered,purchased\n";
  for (std::size_t d = 0; d < n_domains; ++d) {
    s += std::to_string(d);
    for (auto v : c[d]) s += "," + std::to_string(v);
    s += "\n";
  }
  return s;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Valid: return "valid";
    case Split::Test: return "test";
  }
  return "train";
}

void write_users(const std::filesystem::path& p, const std::vector<UserRecord>& v,
                 const ArtifactMeta& meta, bool with_hidden) {
  std::string s = meta_json_line(meta);
  for (const auto& u : v) {
    s += "{\"user_id\":" + std::to_string(u.user_id) + ",\"age_bucket\":" + std::to_string(u.age_bucket) +
         ",\"gender\":" + std::to_string(u.gender) + ",\"city_tier\":" + std::to_string(u.city_tier) +
         ",\"pay_count_bucket\":" + std::to_string(u.pay_count_bucket);
    if (with_hidden) {
      s += ",\"latent_value\":" + fmt_double(u.latent_value) + ",\"tier\":" + std::to_string(u.tier);
    }
    s += "}\n";
  }
  write_text(p, s);
}

void write_games(const std::filesystem::path& p, const std::vector<GameRecord>& v,
                 const ArtifactMeta& meta, bool with_hidden) {
  std::string s = meta_json_line(meta);
  for (const auto& g : v) {
    s += "{\"game_id\":" + std::to_string(g.game_id) + ",\"category\":" + std::to_string(g.category) +
         ",\"battle_type\":" + std::to_string(g.battle_type) + ",\"market_type\":" +
         std::to_string(g.market_type) + ",\"theme\":" + std::to_string(g.theme);
    if (with_hidden) {
      s += ",\"monetization\":" + fmt_double(g.monetization) + ",\"tier\":" + std::to_string(g.tier);
    }
    s += "}\n";
  }
  write_text(p, s);
}

void write_events(const std::filesystem::path& p, const std::vector<InteractionEvent>& v,
                  const ArtifactMeta& meta) {
  std::string s = meta_json_line(meta);
  for (const auto& e : v) {
    s += "{\"user_id\":" + std::to_string(e.user_id) + ",\"game_id\":" + std::to_string(e.game_id) +
         ",\"day_index\":" + std::to_string(e.day_index) + ",\"spend\":" + fmt_double(e.spend) + "}\n";
  }
  write_text(p, s);
}

void write_samples(const std::filesystem::path& p, const std::vector<LtvSample>& v,
                   const ArtifactMeta& meta) {
  std::string s = meta_json_line(meta);
  for (const auto& x : v) {
    s += "{\"sample_id\":" + std::to_string(x.sample_id) + ",\"user_id\":" + std::to_string(x.user_id) +
         ",\"game_id\":" + std::to_string(x.game_id) + ",\"domain_id\":" + std::to_string(x.domain_id) +
         ",\"behavior\":[";
    for (std::size_t i = 0; i < x.behavior.size(); ++i) {
      if (i) s += ',';
      s += "[" + std::to_string(x.behavior[i].game_id) + "," + std::to_string(x.behavior[i].recency_rank) + "]";
    }
    s += "],\"y3\":" + fmt_double(x.y3) + ",\"y7\":" + fmt_double(x.y7) + ",\"y30\":" + fmt_double(x.y30) +
         ",\"split\":\"" + split_name(x.split) + "\"}\n";
  }
  write_text(p, s);
}

std::vector<UserRecord> read_users(const std::filesystem::path& p) {
  std::vector<UserRecord> out;
  for_each_jsonl(p, [&](const std::string& text, std::size_t line) {
    const json j = parse_line(p, text, line,
                              {"user_id", "age_bucket", "gender", "city_tier", "pay_count_bucket"},
                              {"latent_value", "tier"});
    UserRecord u;
    u.user_id = field<std::int64_t>(j, "user_id", p, line);
    u.age_bucket = field<int>(j, "age_bucket", p, line);
    u.gender = field<int>(j, "gender", p, line);
    u.city_tier = field<int>(j, "city_tier", p, line);
    u.pay_count_bucket = field<int>(j, "pay_count_bucket", p, line);
    if (j.contains("latent_value")) u.latent_value = field<double>(j, "latent_value", p, line);
    if (j.contains("tier")) u.tier = field<int>(j, "tier", p, line);
    if (u.user_id != static_cast<std::int64_t>(out.size())) bad_line(p, line, "user ids must be dense from 0");
    out.push_back(u);
  });
  return out;
}

std::vector<GameRecord> read_games(const std::filesystem::path& p) {
  std::vector<GameRecord> out;
  for_each_jsonl(p, [&](const std::string& text, std::size_t line) {
    const json j = parse_line(p, text, line, {"game_id", "category", "battle_type", "market_type", "theme"},
                              {"monetization", "tier"});
    GameRecord g;
    g.game_id = field<std::int64_t>(j, "game_id", p, line);
    g.category = field<int>(j, "category", p, line);
    g.battle_type = field<int>(j, "battle_type", p, line);
    g.market_type = field<int>(j, "market_type", p, line);
    g.theme = field<int>(j, "theme", p, line);
    if (j.contains("monetization")) g.monetization = field<double>(j, "monetization", p, line);
    if (j.contains("tier")) g.tier = field<int>(j, "tier", p, line);
    if (g.game_id != static_cast<std::int64_t>(out.size())) bad_line(p, line, "game ids must be dense from 0");
    out.push_back(g);
  });
  return out;
}

std::vector<InteractionEvent> read_events(const std::filesystem::path& p) {
  std::vector<InteractionEvent> out;
  for_each_jsonl(p, [&](const std::string& text, std::size_t line) {
    const json j = parse_line(p, text, line, {"user_id", "game_id", "day_index", "spend"});
    InteractionEvent e;
    e.user_id = field<std::int64_t>(j, "user_id", p, line);
    e.game_id = field<std::int64_t>(j, "game_id", p, line);
    e.day_index = field<std::int64_t>(j, "day_index", p, line);
    e.spend = field<double>(j, "spend", p, line);
    if (e.day_index < 0 || !(e.spend >= 0.0)) bad_line(p, line, "negative day_index or spend");
    out.push_back(e);
  });
  return out;
}

std::vector<LtvSample> read_samples(const std::filesystem::path& p) {
  std::vector<LtvSample> out;
  for_each_jsonl(p, [&](const std::string& text, std::size_t line) {
    const json j = parse_line(p, text, line,
                              {"sample_id", "user_id", "game_id", "domain_id", "behavior", "y3", "y7", "y30", "split"});
    LtvSample s;
    s.sample_id = field<std::int64_t>(j, "sample_id", p, line);
    s.user_id = field<std::int64_t>(j, "user_id", p, line);
    s.game_id = field<std::int64_t>(j, "game_id", p, line);
    s.domain_id = field<int>(j, "domain_id", p, line);
    const auto& b = j.at("behavior");
    if (!b.is_array()) bad_line(p, line, "field 'behavior' must be an array");
    for (const auto& item : b) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() || !item[1].is_number_integer()) {
        bad_line(p, line, "behavior items must be [game_id, recency_rank]");
      }
      s.behavior.push_back({item[0].get<std::int64_t>(), item[1].get<int>()});
    }
    s.y3 = field<double>(j, "y3", p, line);
    s.y7 = field<double>(j, "y7", p, line);
    s.y30 = field<double>(j, "y30", p, line);
    const auto split = field<std::string>(j, "split", p, line);
    if (split == "train") s.split = Split::Train;
    else if (split == "valid") s.split = Split::Valid;
    else if (split == "test") s.split = Split::Test;
    else bad_line(p, line, "unknown split '" + split + "'");
    if (!(0.0 <= s.y3 && s.y3 <= s.y7 && s.y7 <= s.y30)) bad_line(p, line, "labels violate 0 <= y3 <= y7 <= y30");
    out.push_back(std::move(s));
  });
  return out;
}

}  // namespace hltv
