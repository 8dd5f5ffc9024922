#include "hopfmin/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include <Eigen/Core>

#include "hopfmin/errors.hpp"

namespace hopfmin {

namespace fs = std::filesystem;

void write_text_atomic(const std::string& path, const std::string& text) {
  const fs::path dest(path);
  fs::path dir = dest.parent_path();
  if (dir.empty()) dir = ".";
  if (!fs::is_directory(dir)) throw IoError("output directory does not exist: " + dir.string());
  const fs::path tmp = dir / ("." + dest.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os << text;
    os.flush();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, dest, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw IoError("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

void write_json_atomic(const std::string& path, const nlohmann::json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + " is not valid JSON: " + e.what());
  }
}

nlohmann::json build_versions() {
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  std::ostringstream json;
  json << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.'
       << NLOHMANN_JSON_VERSION_PATCH;
  return {{"hopfmin", HOPFMIN_VERSION},
          {"eigen", eigen.str()},
          {"nlohmann_json", json.str()},
          {"compiler", __VERSION__},
          {"cxx_standard", __cplusplus}};
}

void to_json(nlohmann::json& j, const RunManifest& m) {
  j = {{"command", m.command},
       {"argv", m.argv},
       {"config", m.config},
       {"inputs", m.inputs},
       {"outputs", m.outputs},
       {"versions", build_versions()},
       {"wall_time_s", m.wall_time_s},
       {"exit_status", m.exit_status},
       {"started_at", m.started_at}};
}

std::string manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

}  // namespace hopfmin
