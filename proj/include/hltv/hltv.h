// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HLTV_HLTV_H_
#define HLTV_HLTV_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HLTV_API __declspec(dllexport)
#else
#define HLTV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hltv_status {
  HLTV_OK = 0,
  HLTV_ERR_INVALID = 1,
  HLTV_ERR_CONFIG = 2,
  HLTV_ERR_MISSING_INPUT = 3,
  HLTV_ERR_NUMERIC = 4,
  HLTV_ERR_IO = 5,
  HLTV_ERR_INTERNAL = 6
} hltv_status;

typedef struct hltv_config hltv_config;

// Defaults, or the parsed file when path is non-null.
HLTV_API hltv_status hltv_config_load(const char* path, hltv_config** out);
HLTV_API void hltv_config_free(hltv_config* cfg);

// "section.key=value"; top-level keys have no section.
HLTV_API hltv_status hltv_config_set(hltv_config* cfg, const char* assignment);

// Canonical text of every key. The pointer stays valid until the next call on
// the same handle.
HLTV_API const char* hltv_config_resolved(hltv_config* cfg);

// Runs one stage. On failure error.json is written under the output directory
// when that is possible.
HLTV_API hltv_status hltv_run(const hltv_config* cfg, const char* subcommand);

HLTV_API size_t hltv_subcommand_count(void);
HLTV_API const char* hltv_subcommand_name(size_t index);

// Message of the last failure on the calling thread; empty after success.
HLTV_API const char* hltv_last_error(void);

HLTV_API const char* hltv_version(void);

#ifdef __cplusplus
}
#endif

#endif  // HLTV_HLTV_H_
