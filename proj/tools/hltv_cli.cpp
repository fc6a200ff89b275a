// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "hltv/hltv.h"

namespace {

int exit_code(hltv_status s) {
  switch (s) {
    case HLTV_OK: return 0;
    case HLTV_ERR_CONFIG: return 2;
    case HLTV_ERR_MISSING_INPUT: return 3;
    case HLTV_ERR_NUMERIC: return 4;
    default: return 1;
  }
}

int report(hltv_status s, const char* stage) {
  std::fprintf(stderr, "hltv %s: %s\n", stage, hltv_last_error());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-horizon lifetime value pipeline"};
  app.set_version_flag("--version", std::string(hltv_version()));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string output;
  std::string seed;
  std::string workers;
  std::vector<std::string> sets;
  bool print_config = false;
  app.add_option("-c,--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("-o,--output", output, "Output directory (overrides output_dir)");
  app.add_option("--seed", seed, "Master seed (overrides seed)");
  app.add_option("--workers", workers, "Parallel training runs (overrides workers)");
  app.add_option("--set", sets, "Override as section.key=value; repeatable");
  app.add_flag("--print-config", print_config, "Print the resolved configuration before running");

  for (std::size_t i = 0; i < hltv_subcommand_count(); ++i) {
    app.add_subcommand(hltv_subcommand_name(i))->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  hltv_config* cfg = nullptr;
  hltv_status s = hltv_config_load(config_path.empty() ? nullptr : config_path.c_str(), &cfg);
  if (s != HLTV_OK) return report(s, "config");

  if (!seed.empty()) sets.insert(sets.begin(), "seed=" + seed);
  if (!workers.empty()) sets.insert(sets.begin(), "workers=" + workers);
  if (!output.empty()) sets.insert(sets.begin(), "output_dir=" + output);
  for (const auto& a : sets) {
    s = hltv_config_set(cfg, a.c_str());
    if (s != HLTV_OK) {
      hltv_config_free(cfg);
      return report(s, "config");
    }
  }
  if (print_config) std::fputs(hltv_config_resolved(cfg), stdout);

  const std::string stage = app.get_subcommands().front()->get_name();
  s = hltv_run(cfg, stage.c_str());
  hltv_config_free(cfg);
  if (s != HLTV_OK) return report(s, stage.c_str());
  return 0;
}
