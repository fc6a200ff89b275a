// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hltv/backbone.hpp"
#include "hltv/graph.hpp"
#include "hltv/synth_data.hpp"
#include "hltv/training.hpp"

namespace hltv {

// Every tunable of the pipeline. Text form: INI-style sections [data],
// [grl], [model], [pareto], [eval] plus top-level keys; full-line comments
// start with '#' or ';'.
struct RunConfig {
  std::uint64_t seed = 42;
  std::string output_dir = "out";
  std::size_t workers = 1;

  DataConfig data;
  GrlOptions grl;
  ModelOptions model;
  TrainOptions train;

  std::size_t search_runs = 4;
  std::vector<double> drop_ratios{0.0, 0.5, 0.7, 0.9};
  std::size_t drop_replicates = 3;
  std::size_t correlation_runs = 5;
  std::string checkpoint;    // evaluate / stability first model; empty = pipeline default
  std::string checkpoint_b;  // stability second model
  std::string samples;       // stability sample file; empty = test split

  void validate() const;
};

// Unknown keys, malformed values and duplicates raise Config errors naming
// the key and line.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig parse_config_file(const std::filesystem::path& path);

// Canonical text listing every key; parses back to an identical config.
std::string resolved_config(const RunConfig& c);

std::string config_hash(const RunConfig& c);

// Applies "section.key=value" overrides in order.
void apply_overrides(RunConfig& c, const std::vector<std::string>& overrides);

}  // namespace hltv
