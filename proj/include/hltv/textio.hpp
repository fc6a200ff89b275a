// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hltv {

inline constexpr int kSchemaVersion = 1;

// Shortest form that round-trips: 17 significant digits.
std::string fmt_double(double v);

// Comma-joined fmt_double values inside brackets.
std::string json_array(std::span<const double> v);

std::string json_string(std::string_view s);

// Provenance carried by every artifact.
struct ArtifactMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
};

std::string meta_json_line(const ArtifactMeta& m);
std::string meta_csv_line(const ArtifactMeta& m);

std::string hash_hex(std::string_view text);

// Writes text atomically enough for our purposes (temp file + rename).
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Calls fn(line_text, line_number) for every non-empty JSONL line that is not
// a metadata record. Missing file raises ErrorKind::MissingInput.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const std::string&, std::size_t)>& fn);

void require_file(const std::filesystem::path& path);

}  // namespace hltv
