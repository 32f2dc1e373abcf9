#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "trucedyn/command.hpp"
#include "trucedyn/density.hpp"
#include "trucedyn/dynamics.hpp"
#include "trucedyn/errors.hpp"
#include "trucedyn/game.hpp"

namespace trucedyn {

struct SweepSpec {
  std::string param;  // e, alpha, beta, c, R, V or p0
  double from = 0.0;
  double to = 0.0;
  int steps = 1;
};

// One experiment description. Every field is optional in the JSON document;
// the defaults below are the canonical example parameterization.
struct RunConfig {
  double R = 3.0, V = 1.0, S = 0.0, P = 1.0;
  double e = 0.0;
  double alpha = 0.2, beta = 1.0, c = 1.0;
  bool allow_negative_alpha = false;
  std::string mode = "aggregate";         // aggregate | density
  double p0 = 0.9;
  std::string density_kind = "gaussian";  // gaussian | two_point
  double density_mean = 0.0;
  std::optional<double> density_sigma;    // gaussian: 1.0, two_point: 0.1
  std::optional<double> theta_min;        // default -8 (-14 for two_point)
  std::optional<double> theta_max;        // default +8 (+14 for two_point)
  std::int64_t grid_n = 401;
  double dt = 0.01;
  double t_end = 200.0;
  std::optional<double> sample_interval;  // default max(dt, t_end/2000)
  std::optional<SweepSpec> sweep;
  std::string out_path;                   // per-verb default when empty
  std::optional<std::string> format;      // csv | json; verb default when unset
  std::uint64_t seed = 0;                 // reserved for randomized harnesses
};

namespace detail {

inline double json_num(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number())
    throw ValidationError(field + ": must be a number");
  return v.get<double>();
}

inline bool json_bool(const nlohmann::json& v, const std::string& field) {
  if (!v.is_boolean())
    throw ValidationError(field + ": must be a boolean");
  return v.get<bool>();
}

inline std::string json_str(const nlohmann::json& v, const std::string& field) {
  if (!v.is_string())
    throw ValidationError(field + ": must be a string");
  return v.get<std::string>();
}

inline std::int64_t json_int(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number_integer())
    throw ValidationError(field + ": must be an integer");
  return v.get<std::int64_t>();
}

inline void reject_unknown(const std::string& prefix, const std::string& key) {
  throw ValidationError("config: unknown key '" +
                        (prefix.empty() ? key : prefix + "." + key) + "'");
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  using detail::json_bool;
  using detail::json_int;
  using detail::json_num;
  using detail::json_str;
  if (!j.is_object())
    throw ValidationError("config: must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, val] : j.items()) {
    if (key == "payoffs") {
      if (!val.is_object()) throw ValidationError("payoffs: must be an object");
      for (const auto& [k, v] : val.items()) {
        if (k == "R") cfg.R = json_num(v, "payoffs.R");
        else if (k == "V") cfg.V = json_num(v, "payoffs.V");
        else if (k == "S") cfg.S = json_num(v, "payoffs.S");
        else if (k == "P") cfg.P = json_num(v, "payoffs.P");
        else detail::reject_unknown("payoffs", k);
      }
    } else if (key == "e") {
      cfg.e = json_num(val, "e");
    } else if (key == "commander") {
      if (!val.is_object())
        throw ValidationError("commander: must be an object");
      for (const auto& [k, v] : val.items()) {
        if (k == "alpha") cfg.alpha = json_num(v, "commander.alpha");
        else if (k == "beta") cfg.beta = json_num(v, "commander.beta");
        else if (k == "c") cfg.c = json_num(v, "commander.c");
        else if (k == "allow_negative_alpha")
          cfg.allow_negative_alpha = json_bool(v, "commander.allow_negative_alpha");
        else detail::reject_unknown("commander", k);
      }
    } else if (key == "mode") {
      cfg.mode = json_str(val, "mode");
    } else if (key == "p0") {
      cfg.p0 = json_num(val, "p0");
    } else if (key == "density") {
      if (!val.is_object()) throw ValidationError("density: must be an object");
      for (const auto& [k, v] : val.items()) {
        if (k == "kind") cfg.density_kind = json_str(v, "density.kind");
        else if (k == "mean") cfg.density_mean = json_num(v, "density.mean");
        else if (k == "sigma") cfg.density_sigma = json_num(v, "density.sigma");
        else detail::reject_unknown("density", k);
      }
    } else if (key == "grid") {
      if (!val.is_object()) throw ValidationError("grid: must be an object");
      for (const auto& [k, v] : val.items()) {
        if (k == "theta_min") cfg.theta_min = json_num(v, "grid.theta_min");
        else if (k == "theta_max") cfg.theta_max = json_num(v, "grid.theta_max");
        else if (k == "n") cfg.grid_n = json_int(v, "grid.n");
        else detail::reject_unknown("grid", k);
      }
    } else if (key == "dt") {
      cfg.dt = json_num(val, "dt");
    } else if (key == "t_end") {
      cfg.t_end = json_num(val, "t_end");
    } else if (key == "sample_interval") {
      cfg.sample_interval = json_num(val, "sample_interval");
    } else if (key == "sweep") {
      if (!val.is_object()) throw ValidationError("sweep: must be an object");
      SweepSpec spec;
      for (const auto& [k, v] : val.items()) {
        if (k == "param") spec.param = json_str(v, "sweep.param");
        else if (k == "from") spec.from = json_num(v, "sweep.from");
        else if (k == "to") spec.to = json_num(v, "sweep.to");
        else if (k == "steps")
          spec.steps = static_cast<int>(json_int(v, "sweep.steps"));
        else detail::reject_unknown("sweep", k);
      }
      cfg.sweep = spec;
    } else if (key == "output") {
      if (!val.is_object()) throw ValidationError("output: must be an object");
      for (const auto& [k, v] : val.items()) {
        if (k == "path") cfg.out_path = json_str(v, "output.path");
        else if (k == "format") cfg.format = json_str(v, "output.format");
        else detail::reject_unknown("output", k);
      }
    } else if (key == "seed") {
      const std::int64_t s = json_int(val, "seed");
      if (s < 0) throw ValidationError("seed: must be a nonnegative integer");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else {
      detail::reject_unknown("", key);
    }
  }
  return cfg;
}

inline PayoffMatrix payoffs(const RunConfig& cfg) {
  return PayoffMatrix(cfg.R, cfg.V, cfg.S, cfg.P);
}

inline EnforcementLevel enforcement(const RunConfig& cfg) {
  return EnforcementLevel(cfg.e);
}

inline CommanderParams commander(const RunConfig& cfg) {
  return CommanderParams(cfg.alpha, cfg.beta, cfg.c, cfg.allow_negative_alpha);
}

inline StrategyGrid strategy_grid(const RunConfig& cfg) {
  // the two-point preset's peaks sit at +-12, outside the usual [-8, 8]
  const bool wide = cfg.density_kind == "two_point";
  const double lo = cfg.theta_min.value_or(wide ? -14.0 : -8.0);
  const double hi = cfg.theta_max.value_or(wide ? 14.0 : 8.0);
  if (cfg.grid_n < 3)
    throw ValidationError("grid.n: need at least 3 nodes, got " +
                          std::to_string(cfg.grid_n));
  return StrategyGrid(lo, hi, static_cast<std::size_t>(cfg.grid_n));
}

inline DensityState initial_density(const RunConfig& cfg) {
  const StrategyGrid grid = strategy_grid(cfg);
  if (cfg.density_kind == "gaussian")
    return make_gaussian(grid, cfg.density_mean,
                         cfg.density_sigma.value_or(1.0));
  if (cfg.density_kind == "two_point")
    return make_two_point(grid, cfg.p0, cfg.density_sigma.value_or(0.1));
  throw ValidationError("density.kind: must be gaussian or two_point, got '" +
                        cfg.density_kind + "'");
}

inline double resolved_sample_interval(const RunConfig& cfg) {
  if (!cfg.sample_interval) return 0.0;  // simulate() substitutes the default
  if (!(*cfg.sample_interval > 0.0))
    throw ValidationError("sample_interval: must be > 0, got " +
                          std::to_string(*cfg.sample_interval));
  return *cfg.sample_interval;
}

inline void validate_format(const std::string& format) {
  if (format != "csv" && format != "json")
    throw ValidationError("output.format: must be csv or json, got '" +
                          format + "'");
}

inline void validate_sweep(const SweepSpec& spec) {
  static const char* const allowed[] = {"e", "alpha", "beta", "c",
                                        "R", "V", "p0"};
  bool ok = false;
  for (const char* p : allowed) ok = ok || spec.param == p;
  if (!ok)
    throw ValidationError("sweep.param: must be one of e, alpha, beta, c, R, "
                          "V, p0; got '" + spec.param + "'");
  detail::require_finite(spec.from, "sweep.from");
  detail::require_finite(spec.to, "sweep.to");
  if (spec.steps < 1)
    throw ValidationError("sweep.steps: must be >= 1, got " +
                          std::to_string(spec.steps));
  if (!(spec.from <= spec.to))
    throw ValidationError("sweep.from: must be <= sweep.to, got [" +
                          std::to_string(spec.from) + ", " +
                          std::to_string(spec.to) + "]");
}

// Builds every referenced domain object so each invariant violation surfaces
// as a config error naming the offending field, before any run starts.
inline void validate(const RunConfig& cfg) {
  payoffs(cfg);
  enforcement(cfg);
  commander(cfg);
  if (cfg.mode != "aggregate" && cfg.mode != "density")
    throw ValidationError("mode: must be aggregate or density, got '" +
                          cfg.mode + "'");
  detail::require_fraction(cfg.p0, "p0");
  detail::require_dt(cfg.dt);
  detail::require_t_end(cfg.t_end);
  resolved_sample_interval(cfg);
  if (cfg.mode == "density") initial_density(cfg);
  if (cfg.sweep) validate_sweep(*cfg.sweep);
  if (cfg.format) validate_format(*cfg.format);
}

}  // namespace trucedyn
