#include "kising/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace kising {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunManifest make_manifest(const std::string& canonical_config,
                          std::uint64_t base_seed,
                          std::vector<std::string> output_files) {
  RunManifest m;
  m.config_digest = fnv1a64(canonical_config);
  m.base_seed = base_seed;
  m.output_files = std::move(output_files);

  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  m.timestamp = buf;
  return m;
}

std::filesystem::path write_manifest(
    const std::filesystem::path& primary_output, const RunManifest& manifest) {
  std::filesystem::path path = primary_output;
  path += ".manifest";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  char digest[24];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(manifest.config_digest));
  out << "config_digest = " << digest << '\n'
      << "base_seed = " << manifest.base_seed << '\n'
      << "tool_version = " << manifest.tool_version << '\n'
      << "timestamp = " << manifest.timestamp << '\n';
  for (const std::string& f : manifest.output_files)
    out << "output_file = " << f << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
  return path;
}

}  // namespace kising
