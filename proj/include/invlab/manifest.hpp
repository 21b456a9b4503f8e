// Run manifests: what a command read and wrote, with SHA-256 digests.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace invlab {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string path;    // inputs: as given; outputs: relative to out_dir
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // arguments after the program name
  std::vector<std::string> config_paths;
  std::vector<FileDigest> inputs;
  std::string out_dir;
  std::vector<FileDigest> outputs;
  std::string version;
  std::optional<std::uint64_t> seed;
};

FileDigest digest_file(const std::filesystem::path& path, std::string label);

/// Pretty-printed JSON, keys in a fixed order, no timestamps.
std::string manifest_json(const RunManifest& manifest);
RunManifest parse_manifest(std::string_view json_text);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace invlab
