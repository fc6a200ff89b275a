// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hltv/config.hpp"
#include "hltv/error.hpp"

namespace hltv {

const std::vector<std::string>& subcommands();

// Runs one pipeline stage, writing only under cfg.output_dir. Throws Error;
// MissingInput names the absent prerequisite file.
void run_subcommand(const std::string& name, const RunConfig& cfg);

// error.json content for a failed stage.
std::string error_record(const std::string& subcommand, ErrorKind kind, const std::string& message);

}  // namespace hltv
