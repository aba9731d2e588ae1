#include "kising/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

namespace kising {

const char* d_estimator_name(DEstimator e) {
  return e == DEstimator::tanh ? "tanh" : "finite-difference";
}

DEstimator d_estimator_from_name(const std::string& name) {
  if (name == "tanh") return DEstimator::tanh;
  if (name == "finite-difference" || name == "finite_difference" ||
      name == "fd")
    return DEstimator::finite_difference;
  throw std::invalid_argument("unknown d estimator: " + name);
}

void ExperimentConfig::validate() const {
  base_params.validate();
  if (sweep_values.empty())
    throw std::invalid_argument("sweep_values must be nonempty");
  for (std::size_t i = 1; i < sweep_values.size(); ++i)
    if (!(sweep_values[i] > sweep_values[i - 1]))
      throw std::invalid_argument("sweep_values must be strictly increasing");
  if (realizations < 1)
    throw std::invalid_argument("realizations must be at least 1");
  if (methods.empty())
    throw std::invalid_argument("methods must be nonempty");
  if (sweep_variable == SweepVariable::temperature && total_updates == 0)
    throw std::invalid_argument("total_updates must be positive");
}

std::uint64_t realization_seed(std::uint64_t base_seed,
                               std::size_t value_index,
                               std::size_t realization) {
  return derive_seed(base_seed, value_index + 1, realization + 1);
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::uint64_t lag_attempts_for(const ExperimentConfig& config) {
  if (config.lag_sweeps <= 0.0) return 1;  // one attempt
  const double att =
      config.lag_sweeps * static_cast<double>(config.base_params.n_spins);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(att + 0.5));
}

SimulationSchedule schedule_for(const ExperimentConfig& config,
                                std::uint64_t total, std::uint64_t seed) {
  SimulationSchedule s;
  s.burn_in_updates =
      config.burn_in_sweeps * static_cast<std::uint64_t>(config.base_params.n_spins);
  s.total_updates = total;
  s.rng_seed = seed;
  return s;
}

struct MethodOutcome {
  bool usable = false;    // contributes to the delta mean
  bool converged = false; // for TAP-iterative, the stopping rule
  double delta = kNan;
  double fraction3 = kNan;
  std::string error;
};

struct RealizationOutcome {
  std::vector<MethodOutcome> per_method;
};

MethodOutcome run_method(Method method, const MomentEstimates& moments,
                         double temperature, const CouplingMatrix& truth) {
  MethodOutcome out;
  try {
    InferenceResult result;
    switch (method) {
      case Method::nmf:
        result = infer_nmf(moments, temperature);
        break;
      case Method::tap_cubic:
        result = infer_tap_cubic(moments, temperature);
        break;
      case Method::tap_iterative:
        result = infer_tap_iterative(moments, temperature);
        break;
    }
    out.converged = result.converged;
    out.usable = result.converged;
    out.delta = reconstruction_error(result.couplings, truth);
    if (!result.diagnostics.empty())
      out.fraction3 = fraction_three_real(result.diagnostics);
    if (!result.converged) out.error = "iteration did not converge";
  } catch (const InferenceError& e) {
    out.usable = false;
    out.converged = false;
    out.error = e.what();
  }
  return out;
}

/// Executes fn(task_index) over a pool; results land in caller-owned slots,
/// so output is independent of scheduling order.
void parallel_for(std::size_t tasks, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t t = next.fetch_add(1);
        if (t >= tasks) return;
        fn(t);
      }
    });
  }
  for (auto& th : pool) th.join();
}

void aggregate(const ExperimentConfig& config,
               const std::vector<RealizationOutcome>& outcomes,
               std::size_t value_index, double sweep_value,
               std::vector<SweepRecord>& records, FailureLog* failures) {
  const std::size_t r_count = config.realizations;
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    SweepRecord rec;
    rec.sweep_value = sweep_value;
    rec.method = config.methods[mi];
    rec.realizations = r_count;

    std::vector<double> deltas;
    std::vector<double> fractions;
    std::size_t converged = 0;
    for (std::size_t r = 0; r < r_count; ++r) {
      const MethodOutcome& out =
          outcomes[value_index * r_count + r].per_method[mi];
      if (out.usable) {
        deltas.push_back(out.delta);
        ++converged;
      } else if (failures) {
        char line[160];
        std::snprintf(line, sizeof line, "value=%.9g realization=%zu method=%s",
                      sweep_value, r, method_name(rec.method));
        failures->lines.push_back(std::string(line) + ": " + out.error);
      }
      if (std::isfinite(out.fraction3)) fractions.push_back(out.fraction3);
    }

    rec.convergence_rate =
        static_cast<double>(converged) / static_cast<double>(r_count);
    if (!deltas.empty()) {
      double mean = 0.0;
      for (double d : deltas) mean += d;
      mean /= static_cast<double>(deltas.size());
      rec.delta_mean = mean;
      if (deltas.size() > 1) {
        double ss = 0.0;
        for (double d : deltas) ss += (d - mean) * (d - mean);
        rec.delta_stderr = std::sqrt(
            ss / (static_cast<double>(deltas.size()) *
                  static_cast<double>(deltas.size() - 1)));
      }
    } else {
      rec.delta_mean = kNan;
      rec.delta_stderr = kNan;
    }
    if (!fractions.empty()) {
      double mean = 0.0;
      for (double f : fractions) mean += f;
      rec.fraction_three_real = mean / static_cast<double>(fractions.size());
    }
    records.push_back(rec);
  }
}

}  // namespace

std::vector<SweepRecord> sweep_temperature(const ExperimentConfig& config,
                                           FailureLog* failures) {
  config.validate();
  const std::size_t values = config.sweep_values.size();
  const std::size_t r_count = config.realizations;
  const std::uint64_t lag = lag_attempts_for(config);

  std::vector<RealizationOutcome> outcomes(values * r_count);
  parallel_for(values * r_count, config.workers, [&](std::size_t task) {
    const std::size_t vi = task / r_count;
    const std::size_t r = task % r_count;
    ModelParams params = config.base_params;
    params.temperature = config.sweep_values[vi];

    const std::uint64_t seed =
        realization_seed(config.base_params.rng_seed, vi, r);
    Rng coupling_rng(derive_seed(seed, 1));
    const CouplingMatrix truth = sample_couplings(params, coupling_rng);

    MomentAccumulator acc(params.n_spins, params.beta(), lag);
    run(params, truth,
        schedule_for(config, config.total_updates, derive_seed(seed, 2)),
        acc.observer());
    MomentEstimates moments = acc.finalize();
    if (config.d_estimator == DEstimator::finite_difference)
      moments.d = estimate_d_fd(moments);

    RealizationOutcome& out = outcomes[task];
    out.per_method.resize(config.methods.size());
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi)
      out.per_method[mi] =
          run_method(config.methods[mi], moments, params.temperature, truth);
  });

  std::vector<SweepRecord> records;
  for (std::size_t vi = 0; vi < values; ++vi)
    aggregate(config, outcomes, vi, config.sweep_values[vi], records, failures);
  return records;
}

namespace {

/// One realization of the nested data-length protocol: a single run of the
/// longest L with moment snapshots at every prefix length.
std::vector<MomentEstimates> prefix_moments(const ExperimentConfig& config,
                                            const CouplingMatrix& truth,
                                            std::uint64_t sim_seed,
                                            std::uint64_t lag) {
  const ModelParams& params = config.base_params;
  std::vector<std::uint64_t> lengths;
  lengths.reserve(config.sweep_values.size());
  for (double v : config.sweep_values)
    lengths.push_back(static_cast<std::uint64_t>(v));

  MomentAccumulator acc(params.n_spins, params.beta(), lag);
  std::vector<MomentEstimates> snapshots(lengths.size());
  std::size_t next_cut = 0;
  Observer obs = [&](const StepEvent& e, std::span<const std::int8_t> s,
                     std::span<const double> f) {
    acc.observe(e, s, f);
    while (next_cut < lengths.size() && e.attempt + 1 == lengths[next_cut]) {
      snapshots[next_cut] = acc.finalize();
      ++next_cut;
    }
  };
  run(params, truth, schedule_for(config, lengths.back(), sim_seed), obs);
  for (MomentEstimates& est : snapshots)
    if (config.d_estimator == DEstimator::finite_difference)
      est.d = estimate_d_fd(est);
  return snapshots;
}

}  // namespace

std::vector<SweepRecord> sweep_data_length(const ExperimentConfig& config,
                                           FailureLog* failures) {
  config.validate();
  for (double v : config.sweep_values)
    if (v < 1.0 || v != std::floor(v))
      throw std::invalid_argument("data lengths must be positive integers");

  const std::size_t values = config.sweep_values.size();
  const std::size_t r_count = config.realizations;
  const std::uint64_t lag = lag_attempts_for(config);
  const double temperature = config.base_params.temperature;

  std::vector<RealizationOutcome> outcomes(values * r_count);
  parallel_for(r_count, config.workers, [&](std::size_t r) {
    const std::uint64_t seed =
        realization_seed(config.base_params.rng_seed, 0, r);
    Rng coupling_rng(derive_seed(seed, 1));
    const CouplingMatrix truth =
        sample_couplings(config.base_params, coupling_rng);

    const std::vector<MomentEstimates> snapshots =
        prefix_moments(config, truth, derive_seed(seed, 2), lag);
    for (std::size_t vi = 0; vi < values; ++vi) {
      RealizationOutcome& out = outcomes[vi * r_count + r];
      out.per_method.resize(config.methods.size());
      for (std::size_t mi = 0; mi < config.methods.size(); ++mi)
        out.per_method[mi] = run_method(config.methods[mi], snapshots[vi],
                                        temperature, truth);
    }
  });

  std::vector<SweepRecord> records;
  for (std::size_t vi = 0; vi < values; ++vi)
    aggregate(config, outcomes, vi, config.sweep_values[vi], records, failures);
  return records;
}

std::vector<SweepRecord> root_fraction_sweep(const ExperimentConfig& config,
                                             FailureLog* failures) {
  if (std::find(config.methods.begin(), config.methods.end(),
                Method::tap_cubic) == config.methods.end())
    throw std::invalid_argument(
        "root fraction sweep requires the tap-cubic method");
  return sweep_temperature(config, failures);
}

std::vector<ScatterRow> scatter_experiment(const ExperimentConfig& config,
                                           FailureLog* failures) {
  config.validate();
  const std::size_t n = config.base_params.n_spins;
  const double temperature = config.base_params.temperature;
  const std::uint64_t lag = lag_attempts_for(config);

  const std::uint64_t seed = realization_seed(config.base_params.rng_seed, 0, 0);
  Rng coupling_rng(derive_seed(seed, 1));
  const CouplingMatrix truth =
      sample_couplings(config.base_params, coupling_rng);
  const std::vector<MomentEstimates> snapshots =
      prefix_moments(config, truth, derive_seed(seed, 2), lag);

  std::vector<ScatterRow> rows;
  rows.reserve(config.sweep_values.size() * n * (n - 1));
  for (std::size_t vi = 0; vi < config.sweep_values.size(); ++vi) {
    const MomentEstimates& moments = snapshots[vi];
    Matrix nmf(n, n), tap_iter(n, n, kNan), tap_cubic(n, n, kNan);
    auto record_failure = [&](Method m, const char* what) {
      if (!failures) return;
      char line[160];
      std::snprintf(line, sizeof line, "value=%.9g realization=0 method=%s",
                    config.sweep_values[vi], method_name(m));
      failures->lines.push_back(std::string(line) + ": " + what);
    };
    try {
      nmf = infer_nmf(moments, temperature).couplings.mat();
    } catch (const InferenceError& e) {
      nmf = Matrix(n, n, kNan);
      record_failure(Method::nmf, e.what());
    }
    try {
      const InferenceResult res = infer_tap_iterative(moments, temperature);
      if (res.converged)
        tap_iter = res.couplings.mat();
      else
        record_failure(Method::tap_iterative, "iteration did not converge");
    } catch (const InferenceError& e) {
      record_failure(Method::tap_iterative, e.what());
    }
    try {
      tap_cubic = infer_tap_cubic(moments, temperature).couplings.mat();
    } catch (const InferenceError& e) {
      record_failure(Method::tap_cubic, e.what());
    }

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        ScatterRow row;
        row.i = static_cast<int>(i);
        row.j = static_cast<int>(j);
        row.j_true = truth(i, j);
        row.j_nmf = nmf(i, j);
        row.j_tap_iter = tap_iter(i, j);
        row.j_tap_cubic = tap_cubic(i, j);
        row.data_length = config.sweep_values[vi];
        rows.push_back(row);
      }
    }
  }
  return rows;
}

namespace {

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "sweep_value,method,delta_mean,delta_stderr,fraction_three_real,"
         "convergence_rate,realizations\n";
  for (const SweepRecord& r : records) {
    out << fmt9(r.sweep_value) << ',' << method_name(r.method) << ','
        << fmt9(r.delta_mean) << ',' << fmt9(r.delta_stderr) << ','
        << fmt9(r.fraction_three_real) << ',' << fmt9(r.convergence_rate)
        << ',' << r.realizations << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_scatter_csv(const std::filesystem::path& path,
                       const std::vector<ScatterRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "i,j,J_true,J_nmf,J_tap_iter,J_tap_cubic,L\n";
  for (const ScatterRow& r : rows) {
    out << r.i << ',' << r.j << ',' << fmt9(r.j_true) << ',' << fmt9(r.j_nmf)
        << ',' << fmt9(r.j_tap_iter) << ',' << fmt9(r.j_tap_cubic) << ','
        << fmt9(r.data_length) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_failure_log(const std::filesystem::path& path,
                       const FailureLog& failures) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (const std::string& line : failures.lines) out << line << '\n';
}

}  // namespace kising
