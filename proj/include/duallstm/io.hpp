#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace duallstm {

/// key=value text, one pair per line; '#' starts a comment, blank lines
/// ignored. Shared by the geometry, hyper and synth config files.
using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap parse_key_values(std::istream& in);
KeyValueMap load_key_values(const std::filesystem::path& path);

double kv_double(const KeyValueMap& kv, const std::string& key, double fallback);
long kv_long(const KeyValueMap& kv, const std::string& key, long fallback);

/// FNV-1a over the file bytes; provenance digests in manifests.
std::uint64_t fnv1a_file_digest(const std::filesystem::path& path);

/// One manifest per CLI command, written alongside its outputs.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, digest/hex
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> notes;    // free-form counters
  double wall_time_s = 0.0;
};

void write_manifest(const RunManifest& m, const std::filesystem::path& path);

}  // namespace duallstm
