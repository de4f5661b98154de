#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lovesim {

inline constexpr const char* kVersion = "0.1.0";

// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct FileHash {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<FileHash> inputs;
  std::vector<FileHash> outputs;
  std::string version = kVersion;
  double duration_seconds = 0.0;

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

}  // namespace lovesim
