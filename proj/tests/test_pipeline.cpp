// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <string>

#include "doctest.h"
#include "hltv/error.hpp"
#include "hltv/hltv.h"
#include "hltv/pipeline.hpp"
#include "hltv/textio.hpp"

using namespace hltv;
namespace fs = std::filesystem;

namespace {

RunConfig tiny(const fs::path& out) {
  RunConfig c = parse_config_text(
      "[data]\nn_users = 400\nn_games = 12\ntrials_per_user = 10\n"
      "[grl]\nembedding_dim = 4\nhidden_dim = 6\nepochs = 2\n"
      "[model]\nembedding_dim = 4\nhidden = [6, 4]\nepnet_hidden = 4\nsteps = 3\nbatch_size = 32\n"
      "learning_rate = 0.05\n[pareto]\nruns = 2\n[eval]\ndrop_ratios = [0, 0.5]\ncorrelation_runs = 2\n");
  c.output_dir = out.string();
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hltv_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

ErrorKind failure_kind(const std::string& stage, const RunConfig& c) {
  try {
    run_subcommand(stage, c);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected failure");
  return ErrorKind::Invalid;
}

}  // namespace

TEST_CASE("every stage runs and writes its artifacts") {
  const fs::path out = fresh_dir("all");
  const RunConfig c = tiny(out);
  for (const auto& stage : subcommands()) {
    INFO(stage);
    run_subcommand(stage, c);
  }
  for (const char* f : {"config.resolved", "data/users.jsonl", "data/samples.jsonl", "data/funnel.csv",
                        "graph/embeddings.jsonl", "graph/loss.csv", "train/model.json", "train/step_log.csv",
                        "search/runs.jsonl", "search/best_model.json", "search/run_1/step_log.csv",
                        "evaluate/metrics.csv", "evaluate/predictions.csv", "label_drop/label_drop.csv",
                        "label_drop/degradation.csv", "seed_correlation/matrix.csv", "conflict/conflict_report.csv",
                        "stability/stability.csv"}) {
    INFO(f);
    CHECK(fs::exists(out / f));
  }
  const std::string metrics = read_text(out / "evaluate" / "metrics.csv");
  CHECK(metrics.rfind("# schema_version=1 seed=42 config_hash=" + config_hash(c), 0) == 0);
  CHECK(read_text(out / "search" / "runs.jsonl").rfind("{\"_meta\":", 0) == 0);
  CHECK(parse_config_text(read_text(out / "config.resolved")).data.n_users == 400);
}

TEST_CASE("stages report the missing prerequisite") {
  const fs::path out = fresh_dir("missing");
  const RunConfig c = tiny(out);
  CHECK(failure_kind("train", c) == ErrorKind::MissingInput);
  try {
    run_subcommand("pretrain-graph", c);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("users.jsonl") != std::string::npos);
  }
  run_subcommand("generate-data", c);
  CHECK(failure_kind("train", c) == ErrorKind::MissingInput);
  CHECK(failure_kind("evaluate", c) == ErrorKind::MissingInput);
  CHECK(failure_kind("conflict-report", c) == ErrorKind::MissingInput);
  CHECK(failure_kind("no-such-stage", c) == ErrorKind::Config);
}

TEST_CASE("the c api maps failures to status codes and error records") {
  const fs::path out = fresh_dir("capi");
  hltv_config* cfg = nullptr;
  REQUIRE(hltv_config_load(nullptr, &cfg) == HLTV_OK);
  CHECK(hltv_config_set(cfg, ("output_dir=" + out.string()).c_str()) == HLTV_OK);
  CHECK(hltv_config_set(cfg, "model.bogus=1") == HLTV_ERR_CONFIG);
  CHECK(std::string(hltv_last_error()).find("model.bogus") != std::string::npos);
  CHECK(hltv_run(cfg, "train") == HLTV_ERR_MISSING_INPUT);
  const std::string rec = read_text(out / "error.json");
  CHECK(rec.find("\"kind\":\"missing_input\"") != std::string::npos);
  CHECK(rec.find("\"subcommand\":\"train\"") != std::string::npos);
  CHECK(std::string(hltv_config_resolved(cfg)).find("output_dir") != std::string::npos);
  CHECK(hltv_subcommand_count() == 9);
  CHECK(hltv_subcommand_name(99) == nullptr);
  hltv_config_free(cfg);
  hltv_config* other = nullptr;
  CHECK(hltv_config_load("/nonexistent.ini", &other) == HLTV_ERR_CONFIG);
  CHECK(other == nullptr);
  CHECK(hltv_run(nullptr, "train") == HLTV_ERR_INVALID);
}
