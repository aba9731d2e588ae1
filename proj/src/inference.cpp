#include "kising/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace kising {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kSaturationLimit = 1e-12;
constexpr double kDegenerateRootGap = 1e-9;
constexpr double kDivergenceLimit = 1e6;
constexpr double kThreeRootBoundary = -4.0 / 27.0;

struct Workspace {
  std::size_t n;
  std::vector<double> one_minus_m2;
  Matrix v;  // D C^-1
};

// Shared front end: saturation check, conditioned inverse of C0, V = D C^-1.
Workspace prepare(const MomentEstimates& moments) {
  const std::size_t n = moments.n;
  if (n == 0 || moments.c0.rows() != n || moments.d.rows() != n)
    throw std::invalid_argument("moment estimates incomplete");

  Workspace ws;
  ws.n = n;
  ws.one_minus_m2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 1.0 - moments.m[i] * moments.m[i];
    if (a < kSaturationLimit)
      throw SaturatedSpin("spin " + std::to_string(i) +
                          " is frozen (1 - m^2 < 1e-12)");
    ws.one_minus_m2[i] = a;
  }

  double condition = 0.0;
  Matrix c_inv;
  try {
    c_inv = inverse_with_condition(moments.c0, condition);
  } catch (const std::domain_error&) {
    throw SingularCorrelation("equal-time correlation matrix is singular");
  }
  if (!(condition < kConditionLimit))
    throw SingularCorrelation(
        "equal-time correlation condition estimate " +
        std::to_string(condition) + " exceeds 1e12");

  ws.v = multiply(moments.d, c_inv);
  return ws;
}

InferenceResult pack_result(Matrix j_full, Method method,
                            std::vector<double> f, RootDiagnostics diag,
                            bool converged, std::size_t iterations) {
  const std::size_t n = j_full.rows();
  InferenceResult result;
  result.inferred_diagonal.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.inferred_diagonal[i] = j_full(i, i);
    j_full(i, i) = 0.0;  // ground truth has no self-connections
  }
  result.couplings = CouplingMatrix(std::move(j_full));
  result.method = method;
  result.f = std::move(f);
  result.diagnostics = std::move(diag);
  result.converged = converged;
  result.iterations = iterations;
  return result;
}

double cubic_value(double f, double x) { return ((f - 2.0) * f + 1.0) * f + x; }
double cubic_slope(double f) { return (3.0 * f - 4.0) * f + 1.0; }

// One guarded Newton step; repeated roots (zero slope) are left alone.
double polish_root(double f, double x) {
  const double slope = cubic_slope(f);
  if (std::abs(slope) < 1e-8) return f;
  return f - cubic_value(f, x) / slope;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::nmf:
      return "nmf";
    case Method::tap_iterative:
      return "tap-iterative";
    case Method::tap_cubic:
      return "tap-cubic";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "nmf") return Method::nmf;
  if (name == "tap-iterative") return Method::tap_iterative;
  if (name == "tap-cubic") return Method::tap_cubic;
  throw std::invalid_argument("unknown method: " + name);
}

CubicSolution solve_cubic_f(double x) {
  if (x > 0.0)
    throw std::invalid_argument("cubic constant term must be nonpositive");

  // Depress F = G + 2/3: G^3 - G/3 + (2/27 + x) = 0, so p = -1/3 and
  // q = 2/27 + x. Three real roots exactly when -4/27 <= x <= 0.
  const double q = 2.0 / 27.0 + x;
  CubicSolution sol{};

  if (x >= kThreeRootBoundary) {
    const double arg = std::clamp(-13.5 * q, -1.0, 1.0);  // -27q/2
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const double g =
          (2.0 / 3.0) *
          std::cos(phi - 2.0 * std::numbers::pi * static_cast<double>(k) / 3.0);
      sol.roots[k] = polish_root(g + 2.0 / 3.0, x);
    }
    std::sort(sol.roots.begin(), sol.roots.end());
    sol.count = 3;
    sol.selected = sol.roots[0];
  } else {
    // Cardano; q < -2/27 here, so both cube-root arguments stay positive.
    const double disc = 0.25 * q * q - 1.0 / 729.0;
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-0.5 * q + s);
    const double v = (1.0 / 9.0) / u;  // uv = -p/3
    sol.roots[0] = polish_root(u + v + 2.0 / 3.0, x);
    sol.roots[1] = sol.roots[2] = 0.0;
    sol.count = 1;
    sol.selected = sol.roots[0];
  }
  return sol;
}

InferenceResult infer_nmf(const MomentEstimates& moments, double temperature) {
  const Workspace ws = prepare(moments);
  Matrix j(ws.n, ws.n);
  for (std::size_t i = 0; i < ws.n; ++i) {
    const double scale = temperature / ws.one_minus_m2[i];
    for (std::size_t b = 0; b < ws.n; ++b) j(i, b) = scale * ws.v(i, b);
  }
  return pack_result(std::move(j), Method::nmf,
                     std::vector<double>(ws.n, 0.0), RootDiagnostics{}, true,
                     0);
}

namespace {

RootDiagnostics cubic_diagnostics(const Workspace& ws) {
  RootDiagnostics diag;
  diag.x.resize(ws.n);
  diag.root_counts.resize(ws.n);
  diag.selected_roots.resize(ws.n);
  for (std::size_t i = 0; i < ws.n; ++i) {
    double sum = 0.0;
    for (std::size_t b = 0; b < ws.n; ++b)
      sum += ws.v(i, b) * ws.v(i, b) * ws.one_minus_m2[b];
    diag.x[i] = -sum / ws.one_minus_m2[i];
    const CubicSolution sol = solve_cubic_f(diag.x[i]);
    diag.root_counts[i] = sol.count;
    diag.selected_roots[i] = sol.selected;
  }
  return diag;
}

}  // namespace

InferenceResult infer_tap_cubic(const MomentEstimates& moments,
                                double temperature) {
  const Workspace ws = prepare(moments);
  RootDiagnostics diag = cubic_diagnostics(ws);

  std::vector<double> f(ws.n);
  Matrix j(ws.n, ws.n);
  for (std::size_t i = 0; i < ws.n; ++i) {
    f[i] = diag.selected_roots[i];
    if (std::abs(f[i] - 1.0) < kDegenerateRootGap)
      throw DegenerateRoot("selected root for spin " + std::to_string(i) +
                           " lies within 1e-9 of 1");
    const double scale = temperature / (ws.one_minus_m2[i] * (1.0 - f[i]));
    for (std::size_t b = 0; b < ws.n; ++b) j(i, b) = scale * ws.v(i, b);
  }
  return pack_result(std::move(j), Method::tap_cubic, std::move(f),
                     std::move(diag), true, 0);
}

InferenceResult infer_tap_iterative(const MomentEstimates& moments,
                                    double temperature,
                                    const CouplingMatrix* j0, double tolerance,
                                    std::size_t max_iterations) {
  const Workspace ws = prepare(moments);
  const std::size_t n = ws.n;
  const double beta2 = 1.0 / (temperature * temperature);

  // Per-spin Onsager factor of an iterate.
  auto onsager = [&](const Matrix& j, std::size_t i) {
    double sum = 0.0;
    for (std::size_t b = 0; b < n; ++b)
      sum += j(i, b) * j(i, b) * ws.one_minus_m2[b];
    return beta2 * ws.one_minus_m2[i] * sum;
  };

  // Start from the nMF solution (the full matrix, self-couplings included,
  // so the fixed point matches the cubic scheme exactly).
  Matrix j(n, n);
  if (j0) {
    if (j0->size() != n)
      throw std::invalid_argument("initial couplings dimension mismatch");
    j = j0->mat();
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = temperature / ws.one_minus_m2[i];
      for (std::size_t b = 0; b < n; ++b) j(i, b) = scale * ws.v(i, b);
    }
  }

  bool converged = false;
  std::size_t iter = 0;
  Matrix next(n, n);
  while (iter < max_iterations) {
    ++iter;
    bool diverged = false;
    for (std::size_t i = 0; i < n && !diverged; ++i) {
      const double f_i = onsager(j, i);
      const double denom = ws.one_minus_m2[i] * (1.0 - f_i);
      const double scale = temperature / denom;
      for (std::size_t b = 0; b < n; ++b) {
        const double value = scale * ws.v(i, b);
        if (!std::isfinite(value) || std::abs(value) > kDivergenceLimit) {
          diverged = true;
          break;
        }
        next(i, b) = value;
      }
    }
    if (diverged) break;

    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t b = 0; b < n; ++b)
        delta += std::abs(next(i, b) - j(i, b));
    delta /= static_cast<double>(n * n);
    std::swap(j, next);
    if (delta < tolerance) {
      converged = true;
      break;
    }
  }

  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = onsager(j, i);
  RootDiagnostics diag = cubic_diagnostics(ws);
  return pack_result(std::move(j), Method::tap_iterative, std::move(f),
                     std::move(diag), converged, iter);
}

double fraction_three_real(const RootDiagnostics& diagnostics) {
  if (diagnostics.empty())
    throw std::invalid_argument("root diagnostics not populated");
  std::size_t three = 0;
  for (int c : diagnostics.root_counts)
    if (c == 3) ++three;
  return static_cast<double>(three) /
         static_cast<double>(diagnostics.root_counts.size());
}

double reconstruction_error(const CouplingMatrix& inferred,
                            const CouplingMatrix& truth) {
  const std::size_t n = truth.size();
  if (inferred.size() != n)
    throw std::invalid_argument("coupling dimension mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < n; ++b) {
      if (i == b) continue;
      const double diff = inferred(i, b) - truth(i, b);
      num += diff * diff;
      den += truth(i, b) * truth(i, b);
    }
  }
  if (den == 0.0) throw ZeroTruth("true couplings are identically zero");
  return std::sqrt(num / den);
}

void write_inference_file(const std::filesystem::path& path,
                          const InferenceResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  const std::size_t n = result.couplings.size();
  out << n << '\n';
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < n; ++b) {
      std::snprintf(buf, sizeof buf, "%.17g", result.couplings(i, b));
      out << buf << (b + 1 < n ? ' ' : '\n');
    }
  }
  if (!result.diagnostics.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", result.diagnostics.x[i]);
      out << i << ' ' << buf << ' ' << result.diagnostics.root_counts[i];
      std::snprintf(buf, sizeof buf, "%.17g",
                    result.diagnostics.selected_roots[i]);
      out << ' ' << buf << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace kising
