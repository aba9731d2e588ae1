#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "kising/model.hpp"

namespace kising {

/// Update counts for one simulation. total_updates is the measured data
/// length L (single-spin attempts); one sweep = N attempts = one time unit.
struct SimulationSchedule {
  std::uint64_t burn_in_updates = 0;
  std::uint64_t total_updates = 0;
  std::uint64_t rng_seed = 1;

  void validate(std::size_t n_spins) const;
};

/// Schedule with the default burn-in of 1000 sweeps.
SimulationSchedule make_schedule(std::size_t n_spins,
                                 std::uint64_t total_updates,
                                 std::uint64_t seed);

/// One measured attempt. flipped is the spin index, or -1 when the attempt
/// was rejected; value is the attempted spin's state after the attempt.
struct StepEvent {
  std::uint64_t attempt;
  std::int32_t flipped;
  std::int8_t value;
};

using SpinState = std::vector<std::int8_t>;

/// Called once per measured attempt, after the attempt is applied, with the
/// current configuration and the full effective-field vector.
using Observer = std::function<void(const StepEvent&,
                                    std::span<const std::int8_t> spins,
                                    std::span<const double> fields)>;

/// theta_i + sum_j J_ij s_j
double effective_field(const CouplingMatrix& j, std::span<const double> theta,
                       std::span<const std::int8_t> spins, std::size_t i);

/// 1 / (1 + exp(2 beta s_i H_i)); saturates smoothly, never overflows.
double flip_probability(double beta, int spin, double field);

/// Random-sequential Glauber dynamics from a uniformly random start.
/// Deterministic given (params, j, schedule). Returns the final state.
SpinState run(const ModelParams& params, const CouplingMatrix& j,
              const SimulationSchedule& schedule,
              const Observer& observer = {});

/// Exact stationary distribution of the master equation over all 2^N
/// configurations (N <= 12). State index bit i set <=> s_i = +1.
/// Valid for symmetric and asymmetric couplings.
std::vector<double> exact_stationary_distribution(const ModelParams& params,
                                                  const CouplingMatrix& j);

/// Boltzmann reference exp(beta [sum_i theta_i s_i + sum_{i<j} Js_ij s_i s_j])
/// with Js the symmetrized couplings; equals the stationary distribution
/// when J is symmetric.
std::vector<double> boltzmann_distribution(const ModelParams& params,
                                           const CouplingMatrix& j);

/// Spin value of state `index` at position i.
inline int state_spin(std::size_t index, std::size_t i) {
  return (index >> i) & 1 ? +1 : -1;
}

/// Streams the per-attempt record format to disk:
/// header "KISNTRAJ" + N (u32) + reserved (u32), then per measured attempt
/// attempt (u64 LE), flipped spin or -1 (i32 LE), resulting value (i8).
class TrajectoryWriter {
 public:
  TrajectoryWriter(const std::filesystem::path& path, std::uint32_t n_spins);
  ~TrajectoryWriter();
  TrajectoryWriter(const TrajectoryWriter&) = delete;
  TrajectoryWriter& operator=(const TrajectoryWriter&) = delete;

  void record(const StepEvent& event);
  void close();

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace kising
