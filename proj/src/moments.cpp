#include "kising/moments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "kising/kernels.hpp"

namespace kising {

MomentAccumulator::MomentAccumulator(std::size_t n_spins, double beta,
                                     std::uint64_t lag_attempts)
    : n_(n_spins),
      beta_(beta),
      lag_(lag_attempts),
      sd_(n_spins),
      th_(n_spins),
      delayed_(n_spins),
      m_sum_(n_spins, 0.0),
      c0_sum_(n_spins, n_spins),
      clag_sum_(n_spins, n_spins),
      tanh_sum_(n_spins, n_spins) {
  if (lag_ == 0) throw std::invalid_argument("lag_attempts must be positive");
  if (lag_ * n_spins > 50'000'000)
    throw std::invalid_argument("lag_attempts too large to buffer");
  ring_.assign(lag_, std::vector<double>(n_spins, 0.0));
  ring_accepted_.assign(lag_, 0);
}

void MomentAccumulator::flush_equal() const {
  if (w_equal_ == 0.0) return;
  const auto& ops = kernels::active();
  ops.axpy(m_sum_.data(), w_equal_, sd_.data(), n_);
  ops.rank1_update(c0_sum_.data(), sd_.data(), sd_.data(), n_, w_equal_);
  ops.rank1_update(tanh_sum_.data(), th_.data(), sd_.data(), n_, w_equal_);
  w_equal_ = 0.0;
}

void MomentAccumulator::flush_lag() const {
  if (w_lag_ == 0.0) return;
  kernels::active().rank1_update(clag_sum_.data(), sd_.data(), delayed_.data(),
                                 n_, w_lag_);
  w_lag_ = 0.0;
}

void MomentAccumulator::observe(const StepEvent& event,
                                std::span<const std::int8_t> spins,
                                std::span<const double> fields) {
  if (event.attempt != n_total_)
    throw std::logic_error("moment accumulator fed out of order");
  const bool accepted = event.flipped >= 0;

  if (!started_) {
    for (std::size_t i = 0; i < n_; ++i) {
      sd_[i] = static_cast<double>(spins[i]);
      th_[i] = std::tanh(beta_ * fields[i]);
    }
    started_ = true;
  } else {
    const std::uint64_t t = event.attempt;
    const bool delayed_changed =
        t >= lag_ && (ring_accepted_[t % lag_] != 0 || t == lag_);
    if (accepted) flush_equal();
    if (accepted || delayed_changed) flush_lag();
    if (delayed_changed) delayed_ = ring_[t % lag_];
    if (accepted) {
      sd_[event.flipped] = static_cast<double>(event.value);
      // Every field moves on a flip, so the whole tanh vector refreshes.
      for (std::size_t i = 0; i < n_; ++i)
        th_[i] = std::tanh(beta_ * fields[i]);
    }
  }

  const std::uint64_t t = event.attempt;
  if (t >= lag_) {
    ++n_lag_;
    w_lag_ += 1.0;
  }
  ring_[t % lag_] = sd_;
  ring_accepted_[t % lag_] = accepted ? 1 : 0;
  w_equal_ += 1.0;
  ++n_total_;
}

Matrix MomentAccumulator::estimate_d_tanh() const {
  if (n_total_ < 2)
    throw std::logic_error("too few samples to estimate moments");
  flush_equal();
  flush_lag();
  const double inv = 1.0 / static_cast<double>(n_total_);
  Matrix d(n_, n_);
  std::vector<double> m(n_);
  for (std::size_t i = 0; i < n_; ++i) m[i] = m_sum_[i] * inv;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      d(i, j) = tanh_sum_(i, j) * inv - m[i] * m[j];
  return d;
}

MomentEstimates MomentAccumulator::finalize() const {
  if (n_total_ < 2)
    throw std::logic_error("too few samples to estimate moments");
  flush_equal();
  flush_lag();

  MomentEstimates est;
  est.n = n_;
  est.sample_count = n_total_;
  est.lag_delta = static_cast<double>(lag_) / static_cast<double>(n_);

  const double inv = 1.0 / static_cast<double>(n_total_);
  est.m.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) est.m[i] = m_sum_[i] * inv;

  est.c0 = Matrix(n_, n_);
  est.d = Matrix(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      est.c0(i, j) = c0_sum_(i, j) * inv - est.m[i] * est.m[j];
      est.d(i, j) = tanh_sum_(i, j) * inv - est.m[i] * est.m[j];
    }
  }

  if (n_lag_ > 0) {
    const double inv_lag = 1.0 / static_cast<double>(n_lag_);
    est.c_lag = Matrix(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        est.c_lag(i, j) = clag_sum_(i, j) * inv_lag - est.m[i] * est.m[j];
  }
  return est;
}

Matrix estimate_d_fd(const MomentEstimates& moments) {
  if (moments.lag_delta <= 0.0)
    throw std::invalid_argument("finite-difference D needs lag_delta > 0");
  if (moments.c_lag.empty())
    throw std::invalid_argument("finite-difference D needs lagged moments");
  const std::size_t n = moments.n;
  Matrix d(n, n);
  const double inv_delta = 1.0 / moments.lag_delta;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d(i, j) = moments.c0(i, j) +
                (moments.c_lag(i, j) - moments.c0(i, j)) * inv_delta;
  return d;
}

MomentEstimates oracle_moments(const ModelParams& params,
                               const CouplingMatrix& j) {
  const std::vector<double> p = exact_stationary_distribution(params, j);
  const std::size_t n = params.n_spins;
  const std::size_t states = p.size();
  const double beta = params.beta();

  std::vector<double> m(n, 0.0);
  Matrix ss(n, n);
  Matrix ts(n, n);
  std::vector<std::int8_t> spins(n);
  for (std::size_t s = 0; s < states; ++s) {
    const double w = p[s];
    for (std::size_t i = 0; i < n; ++i)
      spins[i] = static_cast<std::int8_t>(state_spin(s, i));
    for (std::size_t i = 0; i < n; ++i) {
      m[i] += w * spins[i];
      const double th = std::tanh(
          beta * effective_field(j, params.external_field,
                                 std::span<const std::int8_t>(spins), i));
      for (std::size_t b = 0; b < n; ++b) {
        ss(i, b) += w * spins[i] * spins[b];
        ts(i, b) += w * th * spins[b];
      }
    }
  }

  MomentEstimates est;
  est.n = n;
  est.m = m;
  est.c0 = Matrix(n, n);
  est.d = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t b = 0; b < n; ++b) {
      est.c0(i, b) = ss(i, b) - m[i] * m[b];
      est.d(i, b) = ts(i, b) - m[i] * m[b];
    }
  est.lag_delta = 0.0;  // no lagged estimate: exact D is already in d
  est.sample_count = 0;
  return est;
}

namespace {

void write_row(std::ofstream& out, const double* row, std::size_t n) {
  char buf[32];
  for (std::size_t j = 0; j < n; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", row[j]);
    out << buf << (j + 1 < n ? ' ' : '\n');
  }
}

void read_matrix(std::ifstream& in, Matrix& m, std::size_t n,
                 const std::string& what) {
  m = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(in >> m(i, j))) throw std::runtime_error("truncated " + what);
}

}  // namespace

void write_moments_file(const std::filesystem::path& path,
                        const MomentEstimates& moments) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", moments.lag_delta);
  out << moments.n << ' ' << buf << ' ' << moments.sample_count << '\n';
  write_row(out, moments.m.data(), moments.n);
  const Matrix& lag = moments.c_lag.empty() ? moments.c0 : moments.c_lag;
  for (const Matrix* m : {&moments.c0, &lag, &moments.d})
    for (std::size_t i = 0; i < moments.n; ++i)
      write_row(out, m->row(i), moments.n);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

MomentEstimates read_moments_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  MomentEstimates est;
  if (!(in >> est.n >> est.lag_delta >> est.sample_count))
    throw std::runtime_error("bad moments header in " + path.string());
  est.m.resize(est.n);
  for (std::size_t i = 0; i < est.n; ++i)
    if (!(in >> est.m[i]))
      throw std::runtime_error("truncated moments in " + path.string());
  read_matrix(in, est.c0, est.n, "C0 block");
  read_matrix(in, est.c_lag, est.n, "lagged block");
  read_matrix(in, est.d, est.n, "D block");
  return est;
}

}  // namespace kising
