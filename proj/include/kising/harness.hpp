#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kising/glauber.hpp"
#include "kising/inference.hpp"
#include "kising/model.hpp"
#include "kising/moments.hpp"

namespace kising {

enum class SweepVariable { temperature, data_length };
enum class DEstimator { tanh, finite_difference };

const char* d_estimator_name(DEstimator e);
DEstimator d_estimator_from_name(const std::string& name);

/// Protocol for one experiment: which variable is swept, over which values,
/// how many coupling realizations per point, and which inference methods run.
struct ExperimentConfig {
  ModelParams base_params;
  SweepVariable sweep_variable = SweepVariable::temperature;
  std::vector<double> sweep_values;  // strictly increasing
  std::size_t realizations = 5;
  std::vector<Method> methods;
  DEstimator d_estimator = DEstimator::tanh;
  std::uint64_t total_updates = 0;     // L; for data-length sweeps the max
  std::uint64_t burn_in_sweeps = 1000;
  double lag_sweeps = 0.0;             // 0 -> one attempt (1/N sweeps)
  std::size_t workers = 0;             // 0 -> hardware concurrency
  std::string output_path;

  void validate() const;
};

/// One aggregated data point. convergence_rate is the fraction of
/// realizations that produced a usable result (for TAP-iterative, the
/// fraction where the iteration converged).
struct SweepRecord {
  double sweep_value = 0.0;
  Method method = Method::nmf;
  double delta_mean = 0.0;
  double delta_stderr = 0.0;
  double fraction_three_real = 0.0;
  double convergence_rate = 0.0;
  std::size_t realizations = 0;
};

/// Per-realization failures, worth keeping next to the aggregate table.
struct FailureLog {
  std::vector<std::string> lines;
};

/// Delta vs temperature: fresh couplings, simulation, moments and inference
/// per (T, realization); results averaged per (T, method).
std::vector<SweepRecord> sweep_temperature(const ExperimentConfig& config,
                                           FailureLog* failures = nullptr);

/// Delta vs data length at fixed temperature. One long run per realization;
/// moments snapshots at every smaller L are prefixes of the longest run.
std::vector<SweepRecord> sweep_data_length(const ExperimentConfig& config,
                                           FailureLog* failures = nullptr);

/// Fraction of spins with three real cubic roots, per temperature.
std::vector<SweepRecord> root_fraction_sweep(const ExperimentConfig& config,
                                             FailureLog* failures = nullptr);

/// One scatter row per ordered pair (i, j), i != j, per data length.
struct ScatterRow {
  int i = 0;
  int j = 0;
  double j_true = 0.0;
  double j_nmf = 0.0;
  double j_tap_iter = 0.0;
  double j_tap_cubic = 0.0;
  double data_length = 0.0;
};

/// Inferred-vs-true couplings at a single temperature for each L in
/// sweep_values, one realization (the first realization seed).
std::vector<ScatterRow> scatter_experiment(const ExperimentConfig& config,
                                           FailureLog* failures = nullptr);

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepRecord>& records);
void write_scatter_csv(const std::filesystem::path& path,
                       const std::vector<ScatterRow>& rows);
void write_failure_log(const std::filesystem::path& path,
                       const FailureLog& failures);

/// Seed for realization r of sweep point v; pure function of its inputs.
std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t value_index,
                               std::size_t realization);

}  // namespace kising
