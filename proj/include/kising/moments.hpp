#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "kising/glauber.hpp"
#include "kising/matrix.hpp"
#include "kising/model.hpp"

namespace kising {

/// Finalized moment estimates. c0 is the equal-time connected correlation,
/// c_lag the connected correlation at lag lag_delta (in sweep units, spin i
/// at the later time), d the derivative-corrected matrix dC/dt + C at lag 0.
struct MomentEstimates {
  std::size_t n = 0;
  std::vector<double> m;
  Matrix c0;
  Matrix c_lag;
  Matrix d;
  double lag_delta = 0.0;
  std::uint64_t sample_count = 0;
};

/// Streaming estimator over simulation output: constant memory in L.
///
/// Feed it as the run() observer. Raw sums for m, <s_i s_j>, the lagged
/// product and <tanh(beta H_i) s_j> are accumulated with run-length
/// batching: the configuration only changes on accepted flips, so identical
/// consecutive attempts collapse into one weighted rank-1 update.
class MomentAccumulator {
 public:
  /// lag_attempts is the correlation lag in single-spin attempts (>= 1).
  MomentAccumulator(std::size_t n_spins, double beta,
                    std::uint64_t lag_attempts);

  /// Observer entry point; attempts must arrive in order.
  void observe(const StepEvent& event, std::span<const std::int8_t> spins,
               std::span<const double> fields);

  Observer observer() {
    return [this](const StepEvent& e, std::span<const std::int8_t> s,
                  std::span<const double> f) { observe(e, s, f); };
  }

  /// Connected moments from the raw sums. The d member holds the tanh-based
  /// estimate (the default estimator). Requires at least two samples.
  MomentEstimates finalize() const;

  /// D_ij = <tanh(beta H_i) s_j> - m_i m_j, the stationary value of
  /// dC/dt + C at lag 0.
  Matrix estimate_d_tanh() const;

  std::uint64_t sample_count() const { return n_total_; }
  std::size_t n_spins() const { return n_; }
  double beta() const { return beta_; }
  std::uint64_t lag_attempts() const { return lag_; }

 private:
  void flush_equal() const;
  void flush_lag() const;

  std::size_t n_;
  double beta_;
  std::uint64_t lag_;

  // mirrors of the current window
  std::vector<double> sd_;
  std::vector<double> th_;
  std::vector<double> delayed_;
  std::vector<std::vector<double>> ring_;
  std::vector<std::uint8_t> ring_accepted_;

  // raw sums (mutable: flushed lazily from finalize)
  mutable std::vector<double> m_sum_;
  mutable Matrix c0_sum_;
  mutable Matrix clag_sum_;
  mutable Matrix tanh_sum_;
  mutable double w_equal_ = 0.0;
  mutable double w_lag_ = 0.0;

  std::uint64_t n_total_ = 0;
  std::uint64_t n_lag_ = 0;
  bool started_ = false;
};

/// Forward-difference estimate c0 + (c_lag - c0) / lag_delta; retained for
/// validating the tanh-based default.
Matrix estimate_d_fd(const MomentEstimates& moments);

/// Exact stationary moments by state enumeration (N <= 12); d is the exact
/// tanh-based matrix. Sampling-noise-free input for inference tests.
MomentEstimates oracle_moments(const ModelParams& params,
                               const CouplingMatrix& j);

/// Text format: header "N lag_delta sample_count", then m as one row, then
/// C0, C_lag and D as N rows each, space-separated full-precision floats.
void write_moments_file(const std::filesystem::path& path,
                        const MomentEstimates& moments);
MomentEstimates read_moments_file(const std::filesystem::path& path);

}  // namespace kising
