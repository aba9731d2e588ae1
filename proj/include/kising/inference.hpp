#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "kising/model.hpp"
#include "kising/moments.hpp"

namespace kising {

enum class Method { nmf, tap_iterative, tap_cubic };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct InferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Equal-time correlation matrix too ill-conditioned to invert.
struct SingularCorrelation : InferenceError {
  using InferenceError::InferenceError;
};
/// A spin froze (m_i^2 -> 1); the mean-field formulas degenerate.
struct SaturatedSpin : InferenceError {
  using InferenceError::InferenceError;
};
/// A selected cubic root sits within 1e-9 of 1, where 1/(1-F) blows up.
struct DegenerateRoot : InferenceError {
  using InferenceError::InferenceError;
};
/// Reconstruction error against an identically zero truth matrix.
struct ZeroTruth : InferenceError {
  using InferenceError::InferenceError;
};

/// Per-spin cubic diagnostics: constant term x_i, number of real roots
/// (1 or 3, boundary counted as 3 with a repeated root), selected root.
struct RootDiagnostics {
  std::vector<double> x;
  std::vector<int> root_counts;
  std::vector<double> selected_roots;

  bool empty() const { return x.empty(); }
};

struct InferenceResult {
  CouplingMatrix couplings;  // diagonal forced to zero
  Method method = Method::nmf;
  std::vector<double> f;  // per-spin Onsager factor; zero vector for nMF
  std::vector<double> inferred_diagonal;  // self-couplings before zeroing
  RootDiagnostics diagnostics;
  bool converged = true;
  std::size_t iterations = 0;
};

/// Real roots of F^3 - 2F^2 + F + x = 0 for x <= 0, ascending. selected is
/// the smallest root when three are real, the unique real root otherwise;
/// complex roots are discarded.
struct CubicSolution {
  std::array<double, 3> roots;
  int count;  // 1 or 3
  double selected;
};
CubicSolution solve_cubic_f(double x);

/// Naive mean-field inversion J = T A^-1 D C^-1, A = diag(1 - m_i^2).
InferenceResult infer_nmf(const MomentEstimates& moments, double temperature);

/// TAP inversion via the per-spin cubics: V = D C^-1,
/// x_i = -sum_j V_ij^2 (1 - m_j^2) / (1 - m_i^2), F_i the selected root,
/// J_ij = T V_ij / ((1 - m_i^2)(1 - F_i)).
InferenceResult infer_tap_cubic(const MomentEstimates& moments,
                                double temperature);

/// TAP inversion by fixed-point iteration J <- T A(J)^-1 D C^-1, started
/// from the nMF solution unless j0 is given. Stops when the mean entrywise
/// change drops below tolerance; divergence (any |J_ij| > 1e6 or non-finite)
/// is reported through converged = false, never thrown.
InferenceResult infer_tap_iterative(const MomentEstimates& moments,
                                    double temperature,
                                    const CouplingMatrix* j0 = nullptr,
                                    double tolerance = 1e-5,
                                    std::size_t max_iterations = 10'000);

/// Share of spins whose cubic has three real roots.
double fraction_three_real(const RootDiagnostics& diagnostics);

/// Delta = sqrt( sum_{i != j} (J_ij^re - J_ij^true)^2 / sum (J_ij^true)^2 ).
double reconstruction_error(const CouplingMatrix& inferred,
                            const CouplingMatrix& truth);

/// Matrix text format plus, for TAP results, per-spin diagnostic lines
/// "i x_i root_count selected_F".
void write_inference_file(const std::filesystem::path& path,
                          const InferenceResult& result);

}  // namespace kising
