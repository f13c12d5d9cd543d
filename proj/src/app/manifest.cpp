#include "chats/app/manifest.hpp"

#include <cmath>

#include "chats/datastore.hpp"
#include "chats/text.hpp"

namespace chats {

using nlohmann::json;

InputDigest digest_file(const std::filesystem::path& path) {
  return {path.filename().string(), sha256_hex(read_text(path))};
}

namespace {

json body(const RunManifest& m) {
  json inputs = json::array();
  for (const auto& d : m.inputs) inputs.push_back({{"name", d.name}, {"sha256", d.sha256}});
  return {{"command", m.command}, {"config", m.config}, {"inputs", inputs},
          {"seed", m.seed},       {"outputs", m.outputs}, {"version", m.version}};
}

}  // namespace

std::string RunManifest::run_id() const { return sha256_hex(body(*this).dump()); }

json RunManifest::to_json() const {
  json j = body(*this);
  j["run_id"] = run_id();
  return j;
}

std::filesystem::path write_manifest(const RunManifest& m, const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p += ".manifest.json";
  write_text_atomic(p, m.to_json().dump(2) + "\n");
  return p;
}

json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace chats
