#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace msnm {

/// Provenance record written next to every CLI output as
/// `<output>.manifest.json`. Contains no wall-clock data, so identical
/// inputs and flags give identical manifests.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  /// file path -> "sha256:<hex>"
  std::map<std::string, std::string> input_digests;
  std::map<std::string, std::string> output_digests;
  std::string tool_version;

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  std::string to_json() const;
};

std::string sha256_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

/// Writes `<output>.manifest.json` and returns its path.
std::filesystem::path write_manifest(const std::filesystem::path& output, const RunManifest& manifest);

std::string_view tool_version();

}  // namespace msnm
