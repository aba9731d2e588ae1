#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "kising/matrix.hpp"
#include "kising/rng.hpp"

namespace kising {

/// Full parameter vector defining one model instance.
struct ModelParams {
  std::size_t n_spins = 0;
  double temperature = 0.0;
  double coupling_scale = 1.0;           // J
  double asymmetry = 1.0;                // k
  std::vector<double> external_field;    // theta, one entry per spin
  std::uint64_t rng_seed = 1;

  double beta() const { return 1.0 / temperature; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Uniform-field shorthand: theta broadcast to every spin.
ModelParams make_params(std::size_t n_spins, double temperature,
                        double coupling_scale = 1.0, double asymmetry = 1.0,
                        double uniform_field = 0.0, std::uint64_t seed = 1);

/// N x N coupling matrix with zero diagonal and finite entries.
/// Ground truth and inference output share this type.
class CouplingMatrix {
 public:
  CouplingMatrix() = default;
  explicit CouplingMatrix(Matrix entries);  // validates

  std::size_t size() const { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(i, j);
  }
  const Matrix& mat() const { return entries_; }

 private:
  Matrix entries_;
};

/// Draws J = J_sym + k * J_asym with i.i.d. Gaussian upper-triangle entries
/// of variance J^2 / (N (1 + k^2)) in each part, mirrored with the
/// appropriate sign so the parts are exactly (anti)symmetric.
CouplingMatrix sample_couplings(const ModelParams& params, Rng& rng);

/// ((J + J^T)/2, (J - J^T)/2); the sum reproduces J exactly.
std::pair<Matrix, Matrix> decompose(const Matrix& j);

/// Plain-text matrix file: first line N, then N rows of N space-separated
/// full-precision floats.
void write_coupling_file(const std::filesystem::path& path,
                         const CouplingMatrix& j);
CouplingMatrix read_coupling_file(const std::filesystem::path& path);

}  // namespace kising
