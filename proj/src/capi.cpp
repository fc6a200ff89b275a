// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/hltv.h"

#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "hltv/config.hpp"
#include "hltv/error.hpp"
#include "hltv/pipeline.hpp"
#include "hltv/textio.hpp"

struct hltv_config {
  hltv::RunConfig cfg;
  std::string resolved;
};

namespace {

thread_local std::string g_last_error;

hltv_status record(hltv_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
hltv_status guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HLTV_OK;
  } catch (const hltv::Error& e) {
    return record(static_cast<hltv_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return record(HLTV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(HLTV_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

hltv_status hltv_config_load(const char* path, hltv_config** out) {
  if (!out) return record(HLTV_ERR_INVALID, "hltv_config_load: null output handle");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<hltv_config>();
    if (path) h->cfg = hltv::parse_config_file(path);
    *out = h.release();
  });
}

void hltv_config_free(hltv_config* cfg) { delete cfg; }

hltv_status hltv_config_set(hltv_config* cfg, const char* assignment) {
  if (!cfg || !assignment) return record(HLTV_ERR_INVALID, "hltv_config_set: null argument");
  return guarded([&] { hltv::apply_overrides(cfg->cfg, {assignment}); });
}

const char* hltv_config_resolved(hltv_config* cfg) {
  if (!cfg) return "";
  try {
    cfg->resolved = hltv::resolved_config(cfg->cfg);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    cfg->resolved.clear();
  }
  return cfg->resolved.c_str();
}

hltv_status hltv_run(const hltv_config* cfg, const char* subcommand) {
  if (!cfg || !subcommand) return record(HLTV_ERR_INVALID, "hltv_run: null argument");
  const hltv_status s = guarded([&] { hltv::run_subcommand(subcommand, cfg->cfg); });
  if (s != HLTV_OK) {
    const auto kind = s == HLTV_ERR_INTERNAL ? hltv::ErrorKind::Invalid : static_cast<hltv::ErrorKind>(s);
    try {
      hltv::write_text(std::filesystem::path(cfg->cfg.output_dir) / "error.json",
                       hltv::error_record(subcommand, kind, g_last_error));
    } catch (const std::exception&) {
      // The original failure is the one worth reporting.
    }
  }
  return s;
}

size_t hltv_subcommand_count(void) { return hltv::subcommands().size(); }

const char* hltv_subcommand_name(size_t index) {
  const auto& n = hltv::subcommands();
  return index < n.size() ? n[index].c_str() : nullptr;
}

const char* hltv_last_error(void) { return g_last_error.c_str(); }

const char* hltv_version(void) { return "0.1.0"; }

}  // extern "C"
