#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace chats {

inline constexpr const char* kVersion = "0.1.0";

struct InputDigest {
  std::string name;    // basename
  std::string sha256;  // of the file contents
};

InputDigest digest_file(const std::filesystem::path& path);

// Everything that determines a run's outputs. Paths are recorded by basename
// and there is no wall-clock field, so equal manifests mean equal outputs
// given a frozen cache.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<InputDigest> inputs;
  std::int64_t seed = 0;
  std::vector<std::string> outputs;
  std::string version = kVersion;

  nlohmann::json to_json() const;  // includes run_id
  std::string run_id() const;      // sha256 of the manifest without run_id
};

// Writes <output>.manifest.json next to `output`.
std::filesystem::path write_manifest(const RunManifest& m, const std::filesystem::path& output);

// JSON cannot hold infinities; thresholds use "-inf" / "inf" strings.
nlohmann::json number_json(double v);

}  // namespace chats
