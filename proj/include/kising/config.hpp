#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kising/harness.hpp"

namespace kising {

/// Flat "section.key = value" settings, as read from a config file or
/// assembled from command-line flags. Later sources override earlier ones.
class Settings {
 public:
  /// Parses an INI-style file: [section] headers, key = value lines,
  /// '#' comments. Unknown keys are rejected at resolve time, not here.
  static Settings from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  void merge_overrides(const Settings& overrides);
  bool contains(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return map_; }

 private:
  std::map<std::string, std::string> map_;
};

/// Everything a subcommand needs, with every default made explicit.
struct ResolvedConfig {
  ModelParams params;
  std::uint64_t burn_in_sweeps = 1000;
  std::uint64_t total_updates = 0;
  double lag_sweeps = 0.0;  // 0 -> one attempt
  std::uint64_t sim_seed = 0;  // 0 -> derived from params.rng_seed

  std::vector<double> sweep_values;
  std::size_t realizations = 5;
  std::vector<Method> methods;
  DEstimator d_estimator = DEstimator::tanh;
  std::size_t workers = 0;
  bool full_scale = false;

  std::string output_path;

  /// Canonical "key = value" text, sorted by key; hashed into the manifest.
  std::string canonical_text() const;

  ExperimentConfig experiment(SweepVariable variable) const;
};

/// Validates and applies defaults. Unknown keys, missing required keys and
/// out-of-range values raise std::invalid_argument naming the key.
/// `require_total_updates` adds L to the required set (simulate, sweeps).
ResolvedConfig resolve_config(const Settings& settings,
                              bool require_total_updates);

/// Recognized "section.key" names.
const std::vector<std::string>& known_config_keys();

}  // namespace kising
