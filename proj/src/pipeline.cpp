// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hltv/error.hpp"
#include "hltv/experiments.hpp"
#include "hltv/metrics.hpp"
#include "hltv/rng.hpp"
#include "hltv/textio.hpp"

namespace hltv {

namespace fs = std::filesystem;

namespace {

struct Paths {
  fs::path root;
  fs::path users() const { return root / "data" / "users.jsonl"; }
  fs::path games() const { return root / "data" / "games.jsonl"; }
  fs::path events() const { return root / "data" / "events.jsonl"; }
  fs::path samples() const { return root / "data" / "samples.jsonl"; }
  fs::path embeddings() const { return root / "graph" / "embeddings.jsonl"; }
  fs::path train_model() const { return root / "train" / "model.json"; }
  fs::path train_log() const { return root / "train" / "step_log.csv"; }
  fs::path best_model() const { return root / "search" / "best_model.json"; }
};

struct Context {
  const RunConfig& cfg;
  Paths paths;
  ArtifactMeta meta;
  std::string config_text;
};

Dataset load_dataset(const Paths& p) {
  for (const auto& f : {p.users(), p.games(), p.events(), p.samples()}) require_file(f);
  Dataset d;
  d.catalog.users = read_users(p.users());
  d.catalog.games = read_games(p.games());
  d.events = read_events(p.events());
  d.samples = read_samples(p.samples());
  for (std::size_t i = 0; i < d.catalog.users.size(); ++i) {
    if (d.catalog.users[i].user_id != static_cast<std::int64_t>(i)) {
      fail(ErrorKind::Invalid, p.users().string() + ": user ids must be dense and ordered");
    }
  }
  for (std::size_t i = 0; i < d.catalog.games.size(); ++i) {
    if (d.catalog.games[i].game_id != static_cast<std::int64_t>(i)) {
      fail(ErrorKind::Invalid, p.games().string() + ": game ids must be dense and ordered");
    }
  }
  return d;
}

FieldSchema schema_for(const Context& c, const Dataset& d) {
  DataConfig dc = c.cfg.data;
  dc.n_users = d.catalog.users.size();
  dc.n_games = d.catalog.games.size();
  return FieldSchema::standard(dc, c.cfg.model.embedding_dim);
}

// Graph embeddings when the model asks for them.
bool load_embeddings(const Context& c, NodeEmbeddings& out) {
  if (!c.cfg.model.use_grl) return false;
  require_file(c.paths.embeddings());
  out = read_embeddings(c.paths.embeddings());
  return true;
}

std::array<const double*, 3> labels_of(const LtvSample& s) { return {&s.y3, &s.y7, &s.y30}; }

void generate_data(const Context& c) {
  const Dataset d = generate_dataset(c.cfg.data, c.cfg.seed);
  const bool oracle = c.cfg.data.export_oracle;
  write_users(c.paths.users(), d.catalog.users, c.meta, oracle);
  write_games(c.paths.games(), d.catalog.games, c.meta, oracle);
  write_events(c.paths.events(), d.events, c.meta);
  write_samples(c.paths.samples(), d.samples, c.meta);
  write_text(c.paths.root / "data" / "funnel.csv",
             meta_csv_line(c.meta) + funnel_report_csv(d.trials, c.cfg.data.n_domains));
}

void pretrain_graph(const Context& c) {
  const Dataset d = load_dataset(c.paths);
  const auto min_day = static_cast<long>(c.cfg.data.history_days) - static_cast<long>(c.cfg.data.grl_window_days);
  auto [ug, gg] = build_meta_path_graphs(d.events, d.catalog.users.size(), d.catalog.games.size(), min_day);
  ug.attributes = user_attributes(d.catalog.users, c.cfg.data);
  gg.attributes = game_attributes(d.catalog.games, c.cfg.data);
  const GrlTrainResult r = train_grl(ug, gg, c.cfg.grl, c.cfg.seed);
  const NodeEmbeddings e{grl_embeddings(r.params, ug, "grl.user."), grl_embeddings(r.params, gg, "grl.game.")};
  write_embeddings(c.paths.embeddings(), e, c.meta);
  std::string loss = meta_csv_line(c.meta) + "epoch,loss\n";
  for (std::size_t i = 0; i < r.loss_trace.size(); ++i) loss += std::to_string(i) + "," + fmt_double(r.loss_trace[i]) + "\n";
  write_text(c.paths.root / "graph" / "loss.csv", loss);
}

Model initial_model(const Context& c, const Dataset& d, const NodeEmbeddings* grl) {
  return init_model(schema_for(c, d), c.cfg.model, derive_seed(c.cfg.seed, "model"), grl);
}

void train(const Context& c) {
  const Dataset d = load_dataset(c.paths);
  NodeEmbeddings emb;
  const bool grl = load_embeddings(c, emb);
  const TrainData view = split_view(d);
  Model m = initial_model(c, d, grl ? &emb : nullptr);
  const TrainResult r = train_model(m, view, uniform_weight_vector(), c.cfg.train, c.cfg.seed, "train.batches");
  write_model(c.paths.train_model(), m, c.meta, c.config_text);
  write_text(c.paths.train_log(), step_log_csv(r.logs, c.meta));
  write_text(c.paths.root / "train" / "metrics.csv", metrics_csv(evaluate_model(m, view.valid, view), c.meta));
}

std::string horizon_json(const std::array<HorizonMetrics, 3>& m) {
  std::string s = "{";
  for (std::size_t k = 0; k < 3; ++k) {
    s += std::string(k ? "," : "") + "\"" + std::to_string(m[k].horizon) + "\":{\"nmae\":" + fmt_double(m[k].nmae) +
         ",\"auc\":" + fmt_double(m[k].auc) + ",\"n_gini\":" + fmt_double(m[k].n_gini) + "}";
  }
  return s + "}";
}

void search(const Context& c) {
  const Dataset d = load_dataset(c.paths);
  NodeEmbeddings emb;
  const bool grl = load_embeddings(c, emb);
  const TrainData view = split_view(d);
  const Model init = initial_model(c, d, grl ? &emb : nullptr);
  const SearchResult res = optimal_search(init, view, c.cfg.search_runs, c.cfg.train, c.cfg.seed, c.cfg.workers);
  std::string runs = meta_json_line(c.meta);
  std::string selection = meta_csv_line(c.meta) + "run,lambda1,lambda2,lambda3,ok,score,selected\n";
  for (const auto& r : res.runs) {
    const fs::path dir = c.paths.root / "search" / ("run_" + std::to_string(r.index));
    const bool chosen = r.index == res.best;
    std::string ckpt;
    if (r.ok) {
      write_model(dir / "model.json", r.model, c.meta, c.config_text);
      ckpt = fs::relative(dir / "model.json", c.paths.root).generic_string();
    }
    write_text(dir / "step_log.csv", step_log_csv(r.logs, c.meta));
    runs += "{\"run\":" + std::to_string(r.index) + ",\"lambda\":" + json_array(r.lambda.lambda) +
            ",\"seed\":" + std::to_string(r.seed) + ",\"ok\":" + (r.ok ? "true" : "false") +
            ",\"error\":" + json_string(r.error) + ",\"valid_metrics\":" + (r.ok ? horizon_json(r.valid) : "null") +
            ",\"score\":" + (r.ok ? fmt_double(r.score) : "null") +
            ",\"selector\":\"mean_minus_std_valid_n_gini\",\"selected\":" + (chosen ? "true" : "false") +
            ",\"checkpoint\":" + json_string(ckpt) + "}\n";
    selection += std::to_string(r.index) + "," + fmt_double(r.lambda.lambda[0]) + "," + fmt_double(r.lambda.lambda[1]) +
                 "," + fmt_double(r.lambda.lambda[2]) + "," + (r.ok ? "1" : "0") + "," +
                 (r.ok ? fmt_double(r.score) : "nan") + "," + (chosen ? "1" : "0") + "\n";
  }
  write_text(c.paths.root / "search" / "runs.jsonl", runs);
  write_text(c.paths.root / "search" / "selection.csv", selection);
  write_model(c.paths.best_model(), res.runs[res.best].model, c.meta, c.config_text);
}

fs::path resolve_checkpoint(const Context& c, const std::string& configured, const std::vector<fs::path>& fallbacks) {
  if (!configured.empty()) {
    const fs::path p = fs::path(configured).is_absolute() ? fs::path(configured) : c.paths.root / configured;
    require_file(p);
    return p;
  }
  for (const auto& f : fallbacks) {
    if (fs::exists(f)) return f;
  }
  require_file(fallbacks.front());
  return fallbacks.front();
}

void evaluate(const Context& c) {
  const Dataset d = load_dataset(c.paths);
  const fs::path ckpt = resolve_checkpoint(c, c.cfg.checkpoint, {c.paths.best_model(), c.paths.train_model()});
  const Model m = read_model(ckpt);
  const TrainData view = split_view(d);
  write_text(c.paths.root / "evaluate" / "metrics.csv", metrics_csv(evaluate_model(m, view.test, view), c.meta));
  const Prediction p = predict(m, view.test, *view.users, *view.games);
  std::string s = meta_csv_line(c.meta) + "sample_id,y3,y7,y30,pred3,pred7,pred30,p_buy3,p_buy7,p_buy30\n";
  for (std::size_t i = 0; i < view.test.size(); ++i) {
    s += std::to_string(view.test[i]->sample_id);
    for (const double* y : labels_of(*view.test[i])) s += "," + fmt_double(*y);
    for (std::size_t k = 0; k < 3; ++k) s += "," + fmt_double(p.expected[k][i]);
    for (std::size_t k = 0; k < 3; ++k) s += "," + fmt_double(p.purchase_prob[k][i]);
    s += "\n";
  }
  write_text(c.paths.root / "evaluate" / "predictions.csv", s);
}

ExperimentSetup experiment_setup(const Context& c, const Dataset& d, const NodeEmbeddings* grl) {
  return {schema_for(c, d), c.cfg.model, c.cfg.train, grl, c.cfg.workers};
}

void label_drop(const Context& c) {
  const Dataset d = load_dataset(c.paths);
  require_file(c.paths.embeddings());
  const NodeEmbeddings emb = read_embeddings(c.paths.embeddings());
  const TrainData view = split_view(d);
  std::vector<double> ratios = c.cfg.drop_ratios;
  if (std::find(ratios.begin(), ratios.end(), 0.0) == ratios.end()) ratios.insert(ratios.begin(), 0.0);
  const auto rows = label_drop_experiment(view, experiment_setup(c, d, &emb), ratios, c.cfg.seed, c.cfg.drop_replicates);
  write_text(c.paths.root / "label_drop" / "label_drop.csv", label_drop_csv(rows, c.meta));
  std::string s = meta_csv_line(c.meta) + "ratio,full_degradation,no_grl_degradation,full_not_worse\n";
  for (const auto& g : drop_degradation(rows)) {
    s += fmt_double(g.ratio) + "," + fmt_double(g.full) + "," + fmt_double(g.no_grl) + "," +
         (g.full <= g.no_grl ? "1" : "0") + "\n";
  }
  write_text(c.paths.root / "label_drop" / "degradation.csv", s);
}

void seed_correlation(const Context& c) {
  const Dataset d = load_dataset(c.paths);
  NodeEmbeddings emb;
  const bool grl = load_embeddings(c, emb);
  const TrainData view = split_view(d);
  const auto res =
      seed_correlation_experiment(view, experiment_setup(c, d, grl ? &emb : nullptr), c.cfg.correlation_runs, c.cfg.seed);
  write_text(c.paths.root / "seed_correlation" / "matrix.csv", seed_correlation_csv(res, c.meta));
  write_text(c.paths.root / "seed_correlation" / "summary.csv",
             meta_csv_line(c.meta) + "variant,mean_intra_correlation\npareto," + fmt_double(res.intra_mean(0)) +
                 "\nno_pareto," + fmt_double(res.intra_mean(1)) + "\n");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

// Step logs as written by step_log_csv.
std::vector<StepLog> read_step_log(const fs::path& p) {
  require_file(p);
  std::stringstream in(read_text(p));
  std::string line;
  std::vector<StepLog> logs;
  std::vector<std::string> header;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (header.empty()) {
      header = cells;
      continue;
    }
    if (cells.size() != header.size()) fail(ErrorKind::Invalid, p.string() + ":" + std::to_string(n) + ": wrong column count");
    const auto col = [&](const std::string& name) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) fail(ErrorKind::Invalid, p.string() + ": missing column " + name);
      return cells[static_cast<std::size_t>(it - header.begin())];
    };
    StepLog l;
    try {
      l.step = std::stoul(col("step"));
      l.cosines = {std::stod(col("cos12")), std::stod(col("cos13")), std::stod(col("cos23"))};
      l.zero_norm = {col("zero12") == "1", col("zero13") == "1", col("zero23") == "1"};
      l.dnd_norm = std::stod(col("dnd_norm"));
    } catch (const std::logic_error&) {
      fail(ErrorKind::Invalid, p.string() + ":" + std::to_string(n) + ": malformed number");
    }
    logs.push_back(l);
  }
  return logs;
}

void conflict(const Context& c) {
  const fs::path src = c.paths.train_log();
  const auto logs = read_step_log(src);
  const ConflictSummary s = conflict_report(logs);
  std::string out = meta_csv_line(c.meta) + "step,cos12,cos13,cos23,angle12,angle13,angle23,conflict,zero_norm\n";
  for (const auto& l : logs) {
    out += std::to_string(l.step);
    for (double v : l.cosines) out += "," + fmt_double(v);
    bool any = false, zero = false;
    for (std::size_t p = 0; p < 3; ++p) {
      out += "," + fmt_double(std::acos(std::clamp(l.cosines[p], -1.0, 1.0)));
      any = any || l.cosines[p] < 0.0;
      zero = zero || l.zero_norm[p];
    }
    out += std::string(",") + (any ? "1" : "0") + "," + (zero ? "1" : "0") + "\n";
  }
  write_text(c.paths.root / "conflict" / "conflict_steps.csv", out);
  write_text(c.paths.root / "conflict" / "conflict_report.csv",
             meta_csv_line(c.meta) + "steps,conflict_fraction,mean_angle12,mean_angle13,mean_angle23,zero_norm_flags\n" +
                 std::to_string(s.steps) + "," + fmt_double(s.conflict_fraction) + "," + fmt_double(s.mean_angle[0]) +
                 "," + fmt_double(s.mean_angle[1]) + "," + fmt_double(s.mean_angle[2]) + "," +
                 std::to_string(s.zero_norm_flags) + "\n");
}

void stability(const Context& c) {
  const Dataset d = load_dataset(c.paths);
  const fs::path a = resolve_checkpoint(c, c.cfg.checkpoint, {c.paths.train_model()});
  const fs::path b = resolve_checkpoint(c, c.cfg.checkpoint_b, {c.paths.best_model()});
  std::vector<LtvSample> own;
  std::vector<const LtvSample*> samples;
  if (!c.cfg.samples.empty()) {
    const fs::path sp = fs::path(c.cfg.samples).is_absolute() ? fs::path(c.cfg.samples) : c.paths.root / c.cfg.samples;
    require_file(sp);
    own = read_samples(sp);
    for (const auto& s : own) samples.push_back(&s);
  } else {
    samples = split_view(d).test;
  }
  const Model ma = read_model(a), mb = read_model(b);
  const Prediction pa = predict(ma, samples, d.catalog.users, d.catalog.games);
  const Prediction pb = predict(mb, samples, d.catalog.users, d.catalog.games);
  std::string out = meta_csv_line(c.meta) + "horizon,sum_first,sum_second,diff\n";
  for (std::size_t k = 0; k < 3; ++k) {
    double sa = 0.0, sb = 0.0;
    for (double v : pa.expected[k]) sa += v;
    for (double v : pb.expected[k]) sb += v;
    out += std::to_string(kHorizons[k]) + "," + fmt_double(sa) + "," + fmt_double(sb) + "," +
           fmt_double(stability_diff(pa.expected[k], pb.expected[k])) + "\n";
  }
  write_text(c.paths.root / "stability" / "stability.csv", out);
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"generate-data", "pretrain-graph", "train",
                                                 "search",        "evaluate",       "label-drop",
                                                 "seed-correlation", "conflict-report", "stability"};
  return names;
}

void run_subcommand(const std::string& name, const RunConfig& cfg) {
  cfg.validate();
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    fail(ErrorKind::Config, "unknown subcommand '" + name + "'");
  }
  Context c{cfg, {fs::path(cfg.output_dir)}, {cfg.seed, config_hash(cfg)}, resolved_config(cfg)};
  write_text(c.paths.root / "config.resolved", c.config_text);
  if (name == "generate-data") generate_data(c);
  else if (name == "pretrain-graph") pretrain_graph(c);
  else if (name == "train") train(c);
  else if (name == "search") search(c);
  else if (name == "evaluate") evaluate(c);
  else if (name == "label-drop") label_drop(c);
  else if (name == "seed-correlation") seed_correlation(c);
  else if (name == "conflict-report") conflict(c);
  else stability(c);
}

std::string error_record(const std::string& subcommand, ErrorKind kind, const std::string& message) {
  static const char* const kinds[] = {"", "invalid", "config", "missing_input", "numeric", "io"};
  const int k = static_cast<int>(kind);
  return "{\"schema_version\":" + std::to_string(kSchemaVersion) + ",\"subcommand\":" + json_string(subcommand) +
         ",\"kind\":\"" + kinds[k] + "\",\"code\":" + std::to_string(k) + ",\"message\":" + json_string(message) +
         "}\n";
}

}  // namespace hltv
