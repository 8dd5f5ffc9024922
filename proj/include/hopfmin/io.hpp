#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace hopfmin {

/// Writes `text` to a temporary file in the destination directory and renames
/// it over `path`, so readers see either the old file or the complete new one.
/// Throws IoError.
void write_text_atomic(const std::string& path, const std::string& text);

/// Pretty-printed with two-space indentation and a trailing newline.
void write_json_atomic(const std::string& path, const nlohmann::json& j);

/// Throws IoError when the file is missing or is not valid JSON.
[[nodiscard]] nlohmann::json read_json_file(const std::string& path);

/// Record of one CLI invocation.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;
  int exit_status = 0;
  std::string started_at;  // UTC, ISO 8601
};

/// Library and toolchain versions compiled into this build.
[[nodiscard]] nlohmann::json build_versions();

void to_json(nlohmann::json& j, const RunManifest& m);

/// `<output>.manifest.json`, next to the output it describes.
[[nodiscard]] std::string manifest_path_for(const std::string& output);

}  // namespace hopfmin
