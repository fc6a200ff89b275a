// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hltv/error.hpp"
#include "hltv/textio.hpp"

namespace hltv {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Bad {
  std::string why;
};

std::uint64_t to_u64(const std::string& raw) {
  std::uint64_t v = 0;
  const auto* end = raw.data() + raw.size();
  const auto r = std::from_chars(raw.data(), end, v);
  if (raw.empty() || r.ec != std::errc() || r.ptr != end) throw Bad{"expected a non-negative integer"};
  return v;
}

double to_double(const std::string& raw) {
  if (raw.empty()) throw Bad{"expected a number"};
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end != raw.c_str() + raw.size() || !std::isfinite(v)) throw Bad{"expected a finite number"};
  return v;
}

bool to_bool(const std::string& raw) {
  if (raw == "true") return true;
  if (raw == "false") return false;
  throw Bad{"expected true or false"};
}

std::string to_string_value(const std::string& raw) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') return raw.substr(1, raw.size() - 2);
  if (raw.find('"') != std::string::npos) throw Bad{"unbalanced quotes"};
  return raw;
}

std::vector<double> to_list(const std::string& raw) {
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') throw Bad{"expected a list like [1, 2]"};
  std::vector<double> out;
  std::stringstream ss(raw.substr(1, raw.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw Bad{"empty list element"};
    out.push_back(to_double(item));
  }
  return out;
}

std::vector<std::size_t> to_size_list(const std::string& raw) {
  std::vector<std::size_t> out;
  for (double v : to_list(raw)) {
    if (v < 0 || v != std::floor(v)) throw Bad{"expected non-negative integers"};
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
  return s + "]";
}

struct Key {
  std::string section;  // empty for top-level keys
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define HLTV_SIZE(sec, key, field)                                                             \
  Key {                                                                                        \
    sec, key, [](RunConfig& c, const std::string& r) { c.field = static_cast<std::size_t>(to_u64(r)); }, \
        [](const RunConfig& c) { return std::to_string(c.field); }                             \
  }
#define HLTV_REAL(sec, key, field)                                                   \
  Key {                                                                              \
    sec, key, [](RunConfig& c, const std::string& r) { c.field = to_double(r); },    \
        [](const RunConfig& c) { return fmt_double(c.field); }                       \
  }
#define HLTV_BOOL(sec, key, field)                                                 \
  Key {                                                                            \
    sec, key, [](RunConfig& c, const std::string& r) { c.field = to_bool(r); },    \
        [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); } \
  }
#define HLTV_TEXT(sec, key, field)                                                         \
  Key {                                                                                    \
    sec, key, [](RunConfig& c, const std::string& r) { c.field = to_string_value(r); },    \
        [](const RunConfig& c) { return quote(c.field); }                                  \
  }
#define HLTV_LIST(sec, key, field)                                                 \
  Key {                                                                            \
    sec, key, [](RunConfig& c, const std::string& r) { c.field = to_list(r); },    \
        [](const RunConfig& c) { return list(c.field); }                           \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"", "seed", [](RunConfig& c, const std::string& r) { c.seed = to_u64(r); },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      HLTV_TEXT("", "output_dir", output_dir),
      HLTV_SIZE("", "workers", workers),

      HLTV_SIZE("data", "n_users", data.n_users),
      HLTV_SIZE("data", "n_games", data.n_games),
      HLTV_SIZE("data", "n_domains", data.n_domains),
      HLTV_SIZE("data", "n_clusters", data.n_clusters),
      HLTV_SIZE("data", "age_card", data.age_card),
      HLTV_SIZE("data", "gender_card", data.gender_card),
      HLTV_SIZE("data", "city_card", data.city_card),
      HLTV_SIZE("data", "pay_card", data.pay_card),
      HLTV_SIZE("data", "category_card", data.category_card),
      HLTV_SIZE("data", "battle_card", data.battle_card),
      HLTV_SIZE("data", "market_card", data.market_card),
      HLTV_SIZE("data", "theme_card", data.theme_card),
      HLTV_REAL("data", "user_value_mu", data.user_value_mu),
      HLTV_REAL("data", "user_value_sigma", data.user_value_sigma),
      HLTV_REAL("data", "game_value_mu", data.game_value_mu),
      HLTV_REAL("data", "game_value_sigma", data.game_value_sigma),
      HLTV_SIZE("data", "trials_per_user", data.trials_per_user),
      HLTV_REAL("data", "rate_exposure", data.rates.exposure),
      HLTV_REAL("data", "rate_click", data.rates.click),
      HLTV_REAL("data", "rate_registration", data.rates.registration),
      HLTV_REAL("data", "rate_purchase", data.rates.purchase),
      HLTV_LIST("data", "domain_funnel_mult", data.domain_funnel_mult),
      HLTV_LIST("data", "domain_buy_mult", data.domain_buy_mult),
      HLTV_LIST("data", "domain_spend_scale", data.domain_spend_scale),
      HLTV_REAL("data", "buy_rate", data.buy_rate),
      HLTV_REAL("data", "value_elasticity", data.value_elasticity),
      HLTV_REAL("data", "affinity_boost", data.affinity_boost),
      HLTV_REAL("data", "first_pay_prob", data.first_pay_prob),
      HLTV_REAL("data", "daily_pay_prob", data.daily_pay_prob),
      HLTV_REAL("data", "spend_sigma", data.spend_sigma),
      HLTV_SIZE("data", "history_days", data.history_days),
      HLTV_REAL("data", "history_rate", data.history_rate),
      HLTV_SIZE("data", "grl_window_days", data.grl_window_days),
      HLTV_SIZE("data", "behavior_len", data.behavior_len),
      Key{"data", "split",
          [](RunConfig& c, const std::string& r) {
            const auto v = to_list(r);
            if (v.size() != 3) throw Bad{"expected three ratios"};
            c.data.split = {v[0], v[1], v[2]};
          },
          [](const RunConfig& c) { return list({c.data.split[0], c.data.split[1], c.data.split[2]}); }},
      HLTV_BOOL("data", "export_oracle", data.export_oracle),

      HLTV_SIZE("grl", "embedding_dim", grl.embedding_dim),
      HLTV_SIZE("grl", "hidden_dim", grl.hidden_dim),
      HLTV_SIZE("grl", "epochs", grl.epochs),
      HLTV_REAL("grl", "learning_rate", grl.learning_rate),
      HLTV_REAL("grl", "xi_edge", grl.xi_edge),
      HLTV_REAL("grl", "xi_attr", grl.xi_attr),
      HLTV_REAL("grl", "zeta", grl.zeta),
      HLTV_REAL("grl", "mask_attributes", grl.mask.attributes),
      HLTV_REAL("grl", "mask_edges", grl.mask.edges),

      HLTV_SIZE("model", "embedding_dim", model.embedding_dim),
      Key{"model", "hidden", [](RunConfig& c, const std::string& r) { c.model.hidden = to_size_list(r); },
          [](const RunConfig& c) { return list({c.model.hidden.begin(), c.model.hidden.end()}); }},
      HLTV_SIZE("model", "epnet_hidden", model.epnet_hidden),
      HLTV_REAL("model", "gate_threshold", model.gate_threshold),
      HLTV_REAL("model", "sparsity_weight", model.sparsity_weight),
      HLTV_REAL("model", "pn_momentum", model.pn_momentum),
      HLTV_REAL("model", "pn_eps", model.pn_eps),
      HLTV_SIZE("model", "behavior_len", model.behavior_len),
      HLTV_BOOL("model", "use_grl", model.use_grl),
      HLTV_BOOL("model", "freeze_grl", model.freeze_grl),
      HLTV_REAL("model", "init_scale", model.init_scale),
      HLTV_SIZE("model", "steps", train.steps),
      HLTV_SIZE("model", "batch_size", train.batch_size),
      HLTV_REAL("model", "learning_rate", train.learning_rate),
      Key{"model", "optimizer",
          [](RunConfig& c, const std::string& r) {
            const auto v = to_string_value(r);
            if (v == "sgd") c.train.optimizer = OptimizerKind::Sgd;
            else if (v == "adam") c.train.optimizer = OptimizerKind::Adam;
            else throw Bad{"expected \"sgd\" or \"adam\""};
          },
          [](const RunConfig& c) { return quote(optimizer_name(c.train.optimizer)); }},
      Key{"model", "loss",
          [](RunConfig& c, const std::string& r) {
            const auto v = to_string_value(r);
            if (v == "ziln_nll") c.train.loss = LossKind::ZilnNll;
            else if (v == "squared_error") c.train.loss = LossKind::SquaredError;
            else throw Bad{"expected \"ziln_nll\" or \"squared_error\""};
          },
          [](const RunConfig& c) { return quote(loss_kind_name(c.train.loss)); }},

      HLTV_BOOL("pareto", "enabled", train.pareto.enabled),
      HLTV_REAL("pareto", "epsilon", train.pareto.qp.epsilon),
      HLTV_BOOL("pareto", "epo_convention", train.pareto.qp.epo_convention),
      HLTV_REAL("pareto", "grid_step", train.pareto.qp.grid_step),
      HLTV_SIZE("pareto", "runs", search_runs),

      HLTV_LIST("eval", "drop_ratios", drop_ratios),
      HLTV_SIZE("eval", "correlation_runs", correlation_runs),
      HLTV_SIZE("eval", "drop_replicates", drop_replicates),
      HLTV_TEXT("eval", "checkpoint", checkpoint),
      HLTV_TEXT("eval", "checkpoint_b", checkpoint_b),
      HLTV_TEXT("eval", "samples", samples),
  };
  return table;
}

#undef HLTV_SIZE
#undef HLTV_REAL
#undef HLTV_BOOL
#undef HLTV_TEXT
#undef HLTV_LIST

const Key* find_key(const std::string& section, const std::string& name) {
  for (const auto& k : keys()) {
    if (k.section == section && k.name == name) return &k;
  }
  return nullptr;
}

std::string dotted(const std::string& section, const std::string& name) {
  return section.empty() ? name : section + "." + name;
}

// Line of `name` inside `section` (1-based), or 0 when not found.
std::size_t line_of(const std::string& text, const std::string& section, const std::string& name) {
  std::stringstream ss(text);
  std::string line, current;
  for (std::size_t n = 1; std::getline(ss, line); ++n) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos && current == section && trim(t.substr(0, eq)) == name) return n;
  }
  return 0;
}

// Section headers are checked on the raw text since empty sections leave no
// trace in the parsed tree.
void check_sections(const std::string& text, const std::string& origin) {
  static const char* const known[] = {"data", "grl", "model", "pareto", "eval"};
  std::stringstream ss(text);
  std::string line;
  for (std::size_t n = 1; std::getline(ss, line); ++n) {
    const std::string t = trim(line);
    if (t.empty() || t.front() != '[' || t.back() != ']') continue;
    const std::string name = trim(t.substr(1, t.size() - 2));
    if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return name == k; })) {
      fail(ErrorKind::Config, origin + ":" + std::to_string(n) + ": unknown section [" + name + "]");
    }
  }
}

void set_value(RunConfig& c, const Key& k, const std::string& raw, const std::string& where) {
  try {
    k.set(c, trim(raw));
  } catch (const Bad& b) {
    fail(ErrorKind::Config, where + dotted(k.section, k.name) + ": " + b.why + " (got '" + trim(raw) + "')");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (output_dir.empty()) fail(ErrorKind::Config, "output_dir must not be empty");
  if (workers == 0) fail(ErrorKind::Config, "workers must be at least 1");
  data.validate();
  grl.validate();
  model.validate();
  train.validate();
  if (model.use_grl && model.embedding_dim != grl.embedding_dim) {
    fail(ErrorKind::Config, "model.embedding_dim must equal grl.embedding_dim when model.use_grl is true");
  }
  if (search_runs == 0) fail(ErrorKind::Config, "pareto.runs must be at least 1");
  if (train.steps == 0) fail(ErrorKind::Config, "model.steps must be at least 1");
  if (drop_ratios.empty()) fail(ErrorKind::Config, "eval.drop_ratios must not be empty");
  for (double r : drop_ratios) {
    if (!(r >= 0.0 && r < 1.0)) fail(ErrorKind::Config, "eval.drop_ratios entries must lie in [0, 1)");
  }
  if (drop_replicates == 0) fail(ErrorKind::Config, "eval.drop_replicates must be at least 1");
  if (correlation_runs < 2) fail(ErrorKind::Config, "eval.correlation_runs must be at least 2");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::stringstream ss(text);
    pt::ini_parser::read_ini(ss, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config, origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  check_sections(text, origin);
  RunConfig c;
  for (const auto& [name, node] : tree) {
    if (!node.empty()) {
      for (const auto& [key, leaf] : node) {
        const std::size_t line = line_of(text, name, key);
        const std::string where = origin + ":" + std::to_string(line) + ": ";
        const Key* k = find_key(name, key);
        if (!k) fail(ErrorKind::Config, where + "unknown key '" + dotted(name, key) + "'");
        set_value(c, *k, leaf.data(), where);
      }
      continue;
    }
    const std::size_t line = line_of(text, "", name);
    const std::string where = origin + ":" + std::to_string(line) + ": ";
    const Key* k = find_key("", name);
    if (!k) fail(ErrorKind::Config, where + "unknown key '" + name + "'");
    set_value(c, *k, node.data(), where);
  }
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, origin + ": " + e.what());
  }
  return c;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorKind::Config, "config file not found: " + path.string());
  return parse_config_text(read_text(path), path.string());
}

std::string resolved_config(const RunConfig& c) {
  std::string out, section = "";
  for (const auto& k : keys()) {
    if (k.section != section) {
      section = k.section;
      out += "\n[" + section + "]\n";
    }
    out += k.name + " = " + k.get(c) + "\n";
  }
  return out;
}

// Output location and worker count never change results, so they stay out of
// the hash.
std::string config_hash(const RunConfig& c) {
  RunConfig h = c;
  h.output_dir.clear();
  h.workers = 1;
  return hash_hex(resolved_config(h));
}

void apply_overrides(RunConfig& c, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Config, "override '" + o + "' must look like section.key=value");
    const std::string path = trim(o.substr(0, eq));
    const auto dot = path.find('.');
    const std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
    const std::string name = dot == std::string::npos ? path : path.substr(dot + 1);
    const Key* k = find_key(section, name);
    if (!k) fail(ErrorKind::Config, "unknown key '" + path + "' in override");
    set_value(c, *k, o.substr(eq + 1), "override: ");
  }
  c.validate();
}

}  // namespace hltv
