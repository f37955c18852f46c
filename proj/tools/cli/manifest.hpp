#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace chis::cli {

std::string sha256_hex(const std::filesystem::path& path);

struct FileDigest {
  std::string path;
  std::string sha256;
};

/// Provenance record written next to every artifact a command produces.
struct RunManifest {
  std::string command;
  std::string tool_version;
  unsigned long long seed = 0;
  std::map<std::string, std::string> config;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::string started_at;
  std::string finished_at;

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  std::string to_json() const;
};

/// `<artifact>.manifest.json`
std::filesystem::path manifest_path_for(const std::filesystem::path& artifact);

std::string utc_timestamp();

}  // namespace chis::cli
