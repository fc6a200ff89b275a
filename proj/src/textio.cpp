// Copyright 2026 The hltv Authors
// SPDX-License-Identifier: Apache-2.0

#include "hltv/textio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hltv/error.hpp"
#include "hltv/rng.hpp"

namespace hltv {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_array(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt_double(v[i]);
  }
  return s + ']';
}

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + '"';
}

std::string hash_hex(std::string_view text) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

std::string meta_json_line(const ArtifactMeta& m) {
  return "{\"_meta\":{\"schema_version\":" + std::to_string(kSchemaVersion) +
         ",\"seed\":" + std::to_string(m.seed) + ",\"config_hash\":" +
         json_string(m.config_hash) + "}}\n";
}

std::string meta_csv_line(const ArtifactMeta& m) {
  return "# schema_version=" + std::to_string(kSchemaVersion) + " seed=" +
         std::to_string(m.seed) + " config_hash=" + m.config_hash + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open " + tmp + " for writing");
    out << text;
    if (!out) fail(ErrorKind::Io, "write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, "cannot move " + tmp + " to " + path.string() + ": " + ec.message());
}

void require_file(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    fail(ErrorKind::MissingInput, "missing input file: " + path.string());
  }
}

std::string read_text(const std::filesystem::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const std::string&, std::size_t)>& fn) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    if (line.rfind("{\"_meta\"", 0) == 0) continue;
    fn(line, no);
  }
}

}  // namespace hltv
