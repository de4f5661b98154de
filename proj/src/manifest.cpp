#include "lovesim/manifest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "lovesim/corpus_io.hpp"

namespace lovesim {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  return sha256_hex(read_text_file(path));
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.push_back({path.string(), sha256_file(path)});
}

void RunManifest::add_output(const std::filesystem::path& path) {
  outputs.push_back({path.string(), sha256_file(path)});
}

namespace {

nlohmann::json hashes_json(const std::vector<FileHash>& files) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : files) out.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return out;
}

std::vector<FileHash> hashes_from(const nlohmann::json& j) {
  std::vector<FileHash> out;
  for (const auto& f : j) out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"command", m.command},
                     {"config_path", m.config_path},
                     {"seeds", m.seeds},
                     {"inputs", hashes_json(m.inputs)},
                     {"outputs", hashes_json(m.outputs)},
                     {"version", m.version},
                     {"duration_seconds", m.duration_seconds}};
}

void from_json(const nlohmann::json& j, RunManifest& m) {
  j.at("command").get_to(m.command);
  m.config_path = j.value("config_path", std::string());
  m.seeds = j.value("seeds", std::map<std::string, std::uint64_t>{});
  m.inputs = hashes_from(j.value("inputs", nlohmann::json::array()));
  m.outputs = hashes_from(j.value("outputs", nlohmann::json::array()));
  m.version = j.value("version", std::string());
  m.duration_seconds = j.value("duration_seconds", 0.0);
}

}  // namespace lovesim
