#include "kising/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kising {

void ModelParams::validate() const {
  if (n_spins < 2) throw std::invalid_argument("n_spins must be at least 2");
  if (!(temperature > 0.0))
    throw std::invalid_argument("temperature must be positive");
  if (!(coupling_scale > 0.0))
    throw std::invalid_argument("coupling_scale must be positive");
  if (!(asymmetry >= 0.0))
    throw std::invalid_argument("asymmetry must be nonnegative");
  if (external_field.size() != n_spins)
    throw std::invalid_argument("external_field must have n_spins entries");
  for (double theta : external_field)
    if (!std::isfinite(theta))
      throw std::invalid_argument("external_field entries must be finite");
}

ModelParams make_params(std::size_t n_spins, double temperature,
                        double coupling_scale, double asymmetry,
                        double uniform_field, std::uint64_t seed) {
  ModelParams p;
  p.n_spins = n_spins;
  p.temperature = temperature;
  p.coupling_scale = coupling_scale;
  p.asymmetry = asymmetry;
  p.external_field.assign(n_spins, uniform_field);
  p.rng_seed = seed;
  return p;
}

CouplingMatrix::CouplingMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    throw std::invalid_argument("coupling matrix must be square");
  for (std::size_t i = 0; i < entries_.rows(); ++i) {
    if (entries_(i, i) != 0.0)
      throw std::invalid_argument("coupling matrix diagonal must be zero");
    for (std::size_t j = 0; j < entries_.cols(); ++j)
      if (!std::isfinite(entries_(i, j)))
        throw std::invalid_argument("coupling matrix entries must be finite");
  }
}

CouplingMatrix sample_couplings(const ModelParams& params, Rng& rng) {
  params.validate();
  const std::size_t n = params.n_spins;
  const double k = params.asymmetry;
  const double j = params.coupling_scale;
  const double sigma =
      std::sqrt(j * j / (static_cast<double>(n) * (1.0 + k * k)));

  // One draw per upper-triangle entry of each part, mirrored exactly.
  Matrix out(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double sym = sigma * rng.gaussian();
      const double asym = sigma * rng.gaussian();
      out(a, b) = sym + k * asym;
      out(b, a) = sym - k * asym;
    }
  }
  return CouplingMatrix(std::move(out));
}

std::pair<Matrix, Matrix> decompose(const Matrix& j) {
  if (j.rows() != j.cols())
    throw std::invalid_argument("decompose needs a square matrix");
  const std::size_t n = j.rows();
  Matrix sym(n, n);
  Matrix asym(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      sym(a, b) = 0.5 * (j(a, b) + j(b, a));
      asym(a, b) = 0.5 * (j(a, b) - j(b, a));
    }
  }
  return {std::move(sym), std::move(asym)};
}

void write_coupling_file(const std::filesystem::path& path,
                         const CouplingMatrix& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  const std::size_t n = j.size();
  out << n << '\n';
  char buf[32];
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      std::snprintf(buf, sizeof buf, "%.17g", j(a, b));
      out << buf << (b + 1 < n ? ' ' : '\n');
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CouplingMatrix read_coupling_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::size_t n = 0;
  in >> n;
  if (!in || n == 0)
    throw std::runtime_error("bad matrix header in " + path.string());
  Matrix m(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (!(in >> m(a, b)))
        throw std::runtime_error("truncated matrix in " + path.string());
  return CouplingMatrix(std::move(m));
}

}  // namespace kising
