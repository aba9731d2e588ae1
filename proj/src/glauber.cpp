#include "kising/glauber.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "kising/kernels.hpp"

namespace kising {

void SimulationSchedule::validate(std::size_t n_spins) const {
  if (total_updates < n_spins)
    throw std::invalid_argument(
        "total_updates must cover at least one sweep (N attempts)");
}

SimulationSchedule make_schedule(std::size_t n_spins,
                                 std::uint64_t total_updates,
                                 std::uint64_t seed) {
  SimulationSchedule s;
  s.burn_in_updates = 1000 * static_cast<std::uint64_t>(n_spins);
  s.total_updates = total_updates;
  s.rng_seed = seed;
  return s;
}

double effective_field(const CouplingMatrix& j, std::span<const double> theta,
                       std::span<const std::int8_t> spins, std::size_t i) {
  const std::size_t n = j.size();
  if (i >= n) throw std::out_of_range("spin index out of range");
  double h = theta[i];
  for (std::size_t b = 0; b < n; ++b)
    h += j(i, b) * static_cast<double>(spins[b]);
  return h;
}

double flip_probability(double beta, int spin, double field) {
  const double x = 2.0 * beta * static_cast<double>(spin) * field;
  // Evaluate through exp(-|x|) so large |x| saturates without overflow.
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

namespace {

constexpr std::uint64_t kFieldRefreshInterval = 1'000'000;

void recompute_fields(const Matrix& jrows, std::span<const double> theta,
                      const std::vector<double>& sd, std::vector<double>& h) {
  const auto& ops = kernels::active();
  const std::size_t n = sd.size();
  for (std::size_t i = 0; i < n; ++i)
    h[i] = theta[i] + ops.dot(jrows.row(i), sd.data(), n);
}

}  // namespace

SpinState run(const ModelParams& params, const CouplingMatrix& j,
              const SimulationSchedule& schedule, const Observer& observer) {
  params.validate();
  schedule.validate(params.n_spins);
  const std::size_t n = params.n_spins;
  if (j.size() != n)
    throw std::invalid_argument("coupling matrix dimension mismatch");

  const double beta = params.beta();
  const auto& ops = kernels::active();

  // Row-major J for field recomputation; transposed copy so the column
  // touched by a flip is contiguous.
  const Matrix& jrows = j.mat();
  const Matrix jcols = jrows.transposed();

  Rng rng(schedule.rng_seed);
  SpinState spins(n);
  std::vector<double> sd(n);  // double mirror for the kernels
  for (std::size_t i = 0; i < n; ++i) {
    spins[i] = rng.uniform_index(2) == 0 ? -1 : +1;
    sd[i] = static_cast<double>(spins[i]);
  }

  std::vector<double> fields(n);
  recompute_fields(jrows, params.external_field, sd, fields);

  const std::uint64_t total = schedule.burn_in_updates + schedule.total_updates;
  std::uint64_t since_refresh = 0;
#ifndef NDEBUG
  std::vector<double> check(n);
#endif

  for (std::uint64_t attempt = 0; attempt < total; ++attempt) {
    const std::size_t i = rng.uniform_index(n);
    const double p = flip_probability(beta, spins[i], fields[i]);
    const bool accepted = rng.uniform() < p;
    if (accepted) {
      spins[i] = static_cast<std::int8_t>(-spins[i]);
      sd[i] = static_cast<double>(spins[i]);
      // J_ii = 0, so fields[i] is untouched by its own flip.
      ops.axpy(fields.data(), 2.0 * sd[i], jcols.row(i), n);
    }
    if (++since_refresh == kFieldRefreshInterval) {
      since_refresh = 0;
#ifndef NDEBUG
      check = fields;
#endif
      recompute_fields(jrows, params.external_field, sd, fields);
#ifndef NDEBUG
      for (std::size_t a = 0; a < n; ++a)
        assert(std::abs(check[a] - fields[a]) < 1e-10 &&
               "incremental field drift");
#endif
    }
    if (observer && attempt >= schedule.burn_in_updates) {
      const StepEvent event{attempt - schedule.burn_in_updates,
                            accepted ? static_cast<std::int32_t>(i) : -1,
                            spins[i]};
      observer(event, std::span<const std::int8_t>(spins),
               std::span<const double>(fields));
    }
  }
  return spins;
}

std::vector<double> exact_stationary_distribution(const ModelParams& params,
                                                  const CouplingMatrix& j) {
  params.validate();
  const std::size_t n = params.n_spins;
  if (j.size() != n)
    throw std::invalid_argument("coupling matrix dimension mismatch");
  if (n > 12)
    throw std::invalid_argument(
        "exact stationary distribution limited to n_spins <= 12");

  const std::size_t states = std::size_t{1} << n;
  const double beta = params.beta();

  // Generator of the master equation: column s holds outflows, Q[s'][s] the
  // rate s -> s'. Stationary vector solves Q p = 0 with sum(p) = 1; the last
  // row is replaced by the normalization.
  Matrix q(states, states);
  std::vector<std::int8_t> spins(n);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t i = 0; i < n; ++i)
      spins[i] = static_cast<std::int8_t>(state_spin(s, i));
    for (std::size_t i = 0; i < n; ++i) {
      const double h = effective_field(j, params.external_field,
                                       std::span<const std::int8_t>(spins), i);
      const double w = flip_probability(beta, spins[i], h);
      const std::size_t flipped = s ^ (std::size_t{1} << i);
      q(flipped, s) += w;
      q(s, s) -= w;
    }
  }
  for (std::size_t s = 0; s < states; ++s) q(states - 1, s) = 1.0;
  std::vector<double> rhs(states, 0.0);
  rhs[states - 1] = 1.0;

  std::vector<double> p = LuDecomposition(std::move(q)).solve(rhs);
  for (double& v : p) v = std::max(v, 0.0);  // clip LU round-off
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> boltzmann_distribution(const ModelParams& params,
                                           const CouplingMatrix& j) {
  params.validate();
  const std::size_t n = params.n_spins;
  const std::size_t states = std::size_t{1} << n;
  const double beta = params.beta();

  std::vector<double> logw(states);
  double max_logw = -1e300;
  for (std::size_t s = 0; s < states; ++s) {
    double u = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const double sa = state_spin(s, a);
      u += params.external_field[a] * sa;
      for (std::size_t b = a + 1; b < n; ++b)
        u += 0.5 * (j(a, b) + j(b, a)) * sa * state_spin(s, b);
    }
    logw[s] = beta * u;
    max_logw = std::max(max_logw, logw[s]);
  }
  std::vector<double> p(states);
  double total = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    p[s] = std::exp(logw[s] - max_logw);
    total += p[s];
  }
  for (double& v : p) v /= total;
  return p;
}

struct TrajectoryWriter::Impl {
  std::ofstream out;
};

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path,
                                   std::uint32_t n_spins)
    : impl_(new Impl{std::ofstream(path, std::ios::binary)}) {
  if (!impl_->out) {
    delete impl_;
    throw std::runtime_error("cannot open " + path.string());
  }
  char header[16];
  std::memcpy(header, "KISNTRAJ", 8);
  const std::uint32_t reserved = 0;
  std::memcpy(header + 8, &n_spins, 4);
  std::memcpy(header + 12, &reserved, 4);
  impl_->out.write(header, sizeof header);
}

TrajectoryWriter::~TrajectoryWriter() {
  close();
  delete impl_;
}

void TrajectoryWriter::record(const StepEvent& event) {
  char rec[13];
  std::memcpy(rec, &event.attempt, 8);
  std::memcpy(rec + 8, &event.flipped, 4);
  rec[12] = static_cast<char>(event.value);
  impl_->out.write(rec, sizeof rec);
}

void TrajectoryWriter::close() {
  if (impl_->out.is_open()) impl_->out.close();
}

}  // namespace kising
