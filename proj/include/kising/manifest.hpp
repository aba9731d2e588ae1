#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace kising {

inline constexpr const char* kToolVersion = "0.1.0";

std::uint64_t fnv1a64(const std::string& data);

/// Provenance record written once per CLI invocation, next to the primary
/// output: config digest, base seed, tool version, UTC timestamp and the
/// list of files produced. Flat key-value text; output_file repeats.
struct RunManifest {
  std::uint64_t config_digest = 0;
  std::uint64_t base_seed = 0;
  std::string tool_version = kToolVersion;
  std::string timestamp;  // ISO-8601 UTC
  std::vector<std::string> output_files;
};

RunManifest make_manifest(const std::string& canonical_config,
                          std::uint64_t base_seed,
                          std::vector<std::string> output_files);

/// Writes to `<primary_output>.manifest` and returns the path.
std::filesystem::path write_manifest(const std::filesystem::path& primary_output,
                                     const RunManifest& manifest);

}  // namespace kising
