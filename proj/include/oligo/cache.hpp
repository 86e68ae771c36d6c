// On-disk fingerprint cache: one payload file and one metadata file per key, written via rename.
#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "oligo/digest.hpp"

namespace oligo {

class FingerprintCache {
 public:
  explicit FingerprintCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static std::filesystem::path default_dir() {
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "oligo";
    if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "oligo";
    return std::filesystem::temp_directory_path() / "oligo-cache";
  }

  static std::string key_for(const std::string& spec_json, const std::string& params_json, const std::string& version) {
    return sha256_hex(spec_json + "\n" + params_json + "\n" + version);
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<std::string> get(const std::string& key) const {
    std::ifstream in(dir_ / (key + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void put(const std::string& key, const std::string& payload) const {
    std::filesystem::create_directories(dir_);
    nlohmann::json meta;
    auto now = std::chrono::system_clock::now();
    meta["created_at"] = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    meta["key"] = key;
    write_atomic(dir_ / (key + ".meta.json"), meta.dump());
    write_atomic(dir_ / (key + ".json"), payload);
  }

 private:
  std::filesystem::path dir_;

  static void write_atomic(const std::filesystem::path& target, const std::string& data) {
    std::random_device rd;
    auto tmp = target;
    tmp += ".tmp" + std::to_string(rd());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
      out << data;
      if (!out.flush()) throw std::runtime_error("cache: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  }
};

}  // namespace oligo
