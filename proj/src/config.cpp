#include "kising/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kising {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("bad numeric value for " + key + ": " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  // Accept scientific notation for counts (2e7 etc).
  const double v = parse_double(key, value);
  if (v < 0.0 || v != std::floor(v) || v > 1.8e19)
    throw std::invalid_argument(key + " must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Settings Settings::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  Settings s;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("bad section header at line " +
                                    std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key = value at line " +
                                  std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("empty key at line " + std::to_string(lineno));
    s.set(section.empty() ? key : section + "." + key, value);
  }
  return s;
}

void Settings::set(const std::string& key, const std::string& value) {
  map_[key] = value;
}

void Settings::merge_overrides(const Settings& overrides) {
  for (const auto& [k, v] : overrides.map_) map_[k] = v;
}

bool Settings::contains(const std::string& key) const {
  return map_.count(key) != 0;
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "model.n_spins",        "model.temperature",
      "model.coupling_scale", "model.asymmetry",
      "model.external_field", "model.seed",
      "simulation.burn_in_sweeps", "simulation.total_updates",
      "simulation.lag_sweeps",     "simulation.seed",
      "sweep.values",        "sweep.realizations",
      "sweep.methods",       "sweep.d_estimator",
      "sweep.workers",       "sweep.full_scale",
      "output.path",
  };
  return keys;
}

std::string ResolvedConfig::canonical_text() const {
  std::map<std::string, std::string> kv;
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  kv["model.n_spins"] = std::to_string(params.n_spins);
  kv["model.temperature"] = num(params.temperature);
  kv["model.coupling_scale"] = num(params.coupling_scale);
  kv["model.asymmetry"] = num(params.asymmetry);
  {
    std::string theta;
    for (std::size_t i = 0; i < params.external_field.size(); ++i) {
      if (i) theta += ',';
      theta += num(params.external_field[i]);
    }
    kv["model.external_field"] = theta;
  }
  kv["model.seed"] = std::to_string(params.rng_seed);
  kv["simulation.burn_in_sweeps"] = std::to_string(burn_in_sweeps);
  kv["simulation.total_updates"] = std::to_string(total_updates);
  kv["simulation.lag_sweeps"] = num(lag_sweeps);
  kv["simulation.seed"] = std::to_string(sim_seed);
  {
    std::string vals;
    for (std::size_t i = 0; i < sweep_values.size(); ++i) {
      if (i) vals += ',';
      vals += num(sweep_values[i]);
    }
    kv["sweep.values"] = vals;
  }
  kv["sweep.realizations"] = std::to_string(realizations);
  {
    std::string names;
    for (std::size_t i = 0; i < methods.size(); ++i) {
      if (i) names += ',';
      names += method_name(methods[i]);
    }
    kv["sweep.methods"] = names;
  }
  kv["sweep.d_estimator"] = d_estimator_name(d_estimator);
  kv["sweep.workers"] = std::to_string(workers);
  kv["sweep.full_scale"] = full_scale ? "true" : "false";
  kv["output.path"] = output_path;

  std::string text;
  for (const auto& [k, v] : kv) {
    text += k;
    text += " = ";
    text += v;
    text += '\n';
  }
  return text;
}

ExperimentConfig ResolvedConfig::experiment(SweepVariable variable) const {
  ExperimentConfig e;
  e.base_params = params;
  e.sweep_variable = variable;
  e.sweep_values = sweep_values;
  e.realizations = realizations;
  e.methods = methods;
  e.d_estimator = d_estimator;
  e.total_updates = total_updates;
  e.burn_in_sweeps = burn_in_sweeps;
  e.lag_sweeps = lag_sweeps;
  e.workers = workers;
  e.output_path = output_path;
  return e;
}

ResolvedConfig resolve_config(const Settings& settings,
                              bool require_total_updates) {
  const auto& known = known_config_keys();
  for (const auto& [key, value] : settings.entries()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key: " + key);
  }

  auto get = [&](const std::string& key) -> const std::string* {
    auto it = settings.entries().find(key);
    return it == settings.entries().end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const std::string& {
    const std::string* v = get(key);
    if (!v) throw std::invalid_argument("missing required config key: " + key);
    return *v;
  };

  ResolvedConfig rc;

  const std::uint64_t n = parse_u64("model.n_spins", require("model.n_spins"));
  if (n < 2) throw std::invalid_argument("n_spins must be at least 2");
  const double t =
      parse_double("model.temperature", require("model.temperature"));
  if (!(t > 0.0)) throw std::invalid_argument("temperature must be positive");

  rc.params.n_spins = static_cast<std::size_t>(n);
  rc.params.temperature = t;
  if (const std::string* v = get("model.coupling_scale")) {
    rc.params.coupling_scale = parse_double("model.coupling_scale", *v);
    if (!(rc.params.coupling_scale > 0.0))
      throw std::invalid_argument("coupling_scale must be positive");
  }
  if (const std::string* v = get("model.asymmetry")) {
    rc.params.asymmetry = parse_double("model.asymmetry", *v);
    if (rc.params.asymmetry < 0.0)
      throw std::invalid_argument("asymmetry must be nonnegative");
  }

  // theta: scalar broadcast, or @path to a one-value-per-line vector file
  rc.params.external_field.assign(rc.params.n_spins, 0.0);
  if (const std::string* v = get("model.external_field")) {
    if (!v->empty() && v->front() == '@') {
      std::ifstream in(v->substr(1));
      if (!in)
        throw std::invalid_argument("cannot open external_field file " +
                                    v->substr(1));
      std::vector<double> theta;
      double x;
      while (in >> x) theta.push_back(x);
      if (theta.size() != rc.params.n_spins)
        throw std::invalid_argument(
            "external_field file must hold exactly n_spins values");
      rc.params.external_field = std::move(theta);
    } else {
      rc.params.external_field.assign(rc.params.n_spins,
                                      parse_double("model.external_field", *v));
    }
  }
  if (const std::string* v = get("model.seed"))
    rc.params.rng_seed = parse_u64("model.seed", *v);

  if (const std::string* v = get("simulation.burn_in_sweeps"))
    rc.burn_in_sweeps = parse_u64("simulation.burn_in_sweeps", *v);
  if (const std::string* v = get("simulation.total_updates")) {
    rc.total_updates = parse_u64("simulation.total_updates", *v);
    if (rc.total_updates < rc.params.n_spins)
      throw std::invalid_argument(
          "total_updates must cover at least one sweep");
  } else if (require_total_updates) {
    throw std::invalid_argument(
        "missing required config key: simulation.total_updates");
  }
  if (const std::string* v = get("simulation.lag_sweeps")) {
    rc.lag_sweeps = parse_double("simulation.lag_sweeps", *v);
    if (rc.lag_sweeps < 0.0)
      throw std::invalid_argument("lag_sweeps must be nonnegative");
  }
  if (const std::string* v = get("simulation.seed"))
    rc.sim_seed = parse_u64("simulation.seed", *v);
  if (rc.sim_seed == 0) rc.sim_seed = derive_seed(rc.params.rng_seed, 2);

  if (const std::string* v = get("sweep.values")) {
    for (const std::string& item : split_list(*v))
      rc.sweep_values.push_back(parse_double("sweep.values", item));
    if (rc.sweep_values.empty())
      throw std::invalid_argument("sweep.values must be nonempty");
    for (std::size_t i = 1; i < rc.sweep_values.size(); ++i)
      if (!(rc.sweep_values[i] > rc.sweep_values[i - 1]))
        throw std::invalid_argument("sweep.values must be strictly increasing");
  }
  if (const std::string* v = get("sweep.realizations")) {
    rc.realizations =
        static_cast<std::size_t>(parse_u64("sweep.realizations", *v));
    if (rc.realizations < 1)
      throw std::invalid_argument("realizations must be at least 1");
  }
  rc.methods = {Method::nmf, Method::tap_iterative, Method::tap_cubic};
  if (const std::string* v = get("sweep.methods")) {
    rc.methods.clear();
    for (const std::string& item : split_list(*v))
      rc.methods.push_back(method_from_name(item));
    if (rc.methods.empty())
      throw std::invalid_argument("sweep.methods must be nonempty");
  }
  if (const std::string* v = get("sweep.d_estimator"))
    rc.d_estimator = d_estimator_from_name(*v);
  if (const std::string* v = get("sweep.workers"))
    rc.workers = static_cast<std::size_t>(parse_u64("sweep.workers", *v));
  if (const std::string* v = get("sweep.full_scale"))
    rc.full_scale = (*v == "true" || *v == "1" || *v == "yes");

  if (const std::string* v = get("output.path")) rc.output_path = *v;

  return rc;
}

}  // namespace kising
