#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trucedyn/config.hpp"
#include "trucedyn/equilibria.hpp"
#include "trucedyn/policy.hpp"
#include "trucedyn/serialize.hpp"

namespace trucedyn::cli {

namespace detail {

// Evenly spaced scan with both endpoints exact; the midpoint arithmetic is
// ordered so round fractions (e.g. the threshold in a [0,3]x301 scan) land
// on representable values instead of straddling them.
inline std::vector<double> linspace(double from, double to, int steps) {
  std::vector<double> xs(static_cast<std::size_t>(steps));
  if (steps == 1) {
    xs[0] = from;
    return xs;
  }
  for (int i = 0; i < steps; ++i)
    xs[static_cast<std::size_t>(i)] =
        from + (static_cast<double>(i) * (to - from)) /
                   static_cast<double>(steps - 1);
  xs.back() = to;
  return xs;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError("config: invalid JSON in '" + path + "': " +
                          ex.what());
  }
  return parse_run_config(j);
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("output.path: cannot open '" + path +
                          "' for writing");
  out << bytes;
  if (!out)
    throw ValidationError("output.path: failed while writing '" + path + "'");
}

inline std::string resolved_format(const RunConfig& cfg,
                                   const char* verb_default) {
  const std::string format = cfg.format.value_or(verb_default);
  validate_format(format);
  return format;
}

inline std::string resolved_path(const RunConfig& cfg, const char* stem,
                                 const std::string& format) {
  return cfg.out_path.empty() ? std::string(stem) + "." + format
                              : cfg.out_path;
}

inline std::string json_bytes(const nlohmann::ordered_json& j) {
  return j.dump(2) + "\n";
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const PayoffMatrix m = payoffs(cfg);
  const EnforcementLevel e = enforcement(cfg);
  const Trajectory traj =
      cfg.mode == "density"
          ? simulate_density(initial_density(cfg), e, m, cfg.t_end, cfg.dt,
                             resolved_sample_interval(cfg))
          : simulate_aggregate(cfg.p0, e, m, cfg.t_end, cfg.dt,
                               resolved_sample_interval(cfg));
  const std::string format = detail::resolved_format(cfg, "csv");
  const std::string path = detail::resolved_path(cfg, "trajectory", format);
  std::ostringstream buf;
  if (format == "csv")
    write_trajectory_csv(buf, traj);
  else
    buf << detail::json_bytes(trajectory_json(traj));
  detail::write_file(path, buf.str());

  const double final_pbar = traj.final_pbar();
  const std::string label = attractor_label(final_pbar);
  std::string pretty = label;
  if (label == "peace") pretty = "peace (1)";
  if (label == "conflict") pretty = "conflict (0)";
  out << "final pbar " << format_double(final_pbar) << " attractor " << pretty
      << "\n";
  out << "wrote " << path << "\n";
  return 0;
}

inline int cmd_bifurcate(const RunConfig& cfg, std::ostream& out) {
  const PayoffMatrix m = payoffs(cfg);
  SweepSpec spec;
  if (cfg.sweep) {
    spec = *cfg.sweep;
    if (spec.param != "e")
      throw ValidationError("sweep.param: bifurcate scans enforcement; "
                            "expected 'e', got '" + spec.param + "'");
  } else {
    spec = {"e", 0.0, 1.5 * m.threshold(), 301};
  }
  const auto es = detail::linspace(spec.from, spec.to, spec.steps);
  const auto records = bifurcation_records(es, m);

  const std::string format = detail::resolved_format(cfg, "csv");
  const std::string path = detail::resolved_path(cfg, "bifurcation", format);
  std::ostringstream buf;
  if (format == "csv")
    write_bifurcation_csv(buf, records);
  else
    buf << detail::json_bytes(bifurcation_json(records));
  detail::write_file(path, buf.str());
  out << "wrote " << path << " (" << records.size() << " rows)\n";
  return 0;
}

inline int cmd_stackelberg(const RunConfig& cfg, std::ostream& out) {
  const PayoffMatrix m = payoffs(cfg);
  const StackelbergSolution sol = optimal_enforcement(commander(cfg), m);

  const std::string format = detail::resolved_format(cfg, "json");
  const std::string path = detail::resolved_path(cfg, "stackelberg", format);
  std::ostringstream buf;
  if (format == "csv")
    write_stackelberg_csv(buf, sol);
  else
    buf << detail::json_bytes(stackelberg_json(sol));
  detail::write_file(path, buf.str());

  out << "e_star " << format_double(sol.e_star) << " regime "
      << to_string(sol.regime) << " utility " << format_double(sol.utility)
      << " case " << static_cast<int>(sol.outcome_case) << "\n";
  if (sol.regime == CommandRegime::Conflict && sol.e_star == m.threshold())
    out << "note: the conflict optimum sits exactly at the threshold R - V; "
           "realizing it requires enforcement slightly above\n";
  out << "wrote " << path << "\n";
  return 0;
}

inline int cmd_policy(const RunConfig& cfg, std::ostream& out) {
  const auto levers = lever_report(commander(cfg), payoffs(cfg));
  const std::string format = detail::resolved_format(cfg, "csv");
  const std::string path = detail::resolved_path(cfg, "levers", format);
  std::ostringstream buf;
  if (format == "csv")
    write_lever_csv(buf, levers);
  else
    buf << detail::json_bytes(lever_json(levers));
  detail::write_file(path, buf.str());
  out << "wrote " << path << "\n";
  return 0;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.sweep)
    throw ValidationError("sweep.param: the sweep verb needs a sweep spec "
                          "(param, from, to, steps)");
  const SweepSpec& spec = *cfg.sweep;
  const auto values = detail::linspace(spec.from, spec.to, spec.steps);

  // points are independent; rows are built in scan order so the output is
  // deterministic no matter how this loop is scheduled
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double v : values) {
    RunConfig point = cfg;
    if (spec.param == "e") point.e = v;
    else if (spec.param == "alpha") point.alpha = v;
    else if (spec.param == "beta") point.beta = v;
    else if (spec.param == "c") point.c = v;
    else if (spec.param == "R") point.R = v;
    else if (spec.param == "V") point.V = v;
    else point.p0 = v;

    const PayoffMatrix m = payoffs(point);
    const EnforcementLevel e = enforcement(point);
    const Trajectory traj =
        point.mode == "density"
            ? simulate_density(initial_density(point), e, m, point.t_end,
                               point.dt, resolved_sample_interval(point))
            : simulate_aggregate(point.p0, e, m, point.t_end, point.dt,
                                 resolved_sample_interval(point));
    const auto report = analyze(e, m);
    const auto sol = optimal_enforcement(commander(point), m);
    rows.push_back({spec.param, v, traj.final_pbar(),
                    attractor_label(traj.final_pbar()), report.regime,
                    sol.e_star, sol.regime, sol.outcome_case});
  }

  const std::string format = detail::resolved_format(cfg, "csv");
  const std::string path = detail::resolved_path(cfg, "sweep", format);
  std::ostringstream buf;
  if (format == "csv")
    write_sweep_csv(buf, rows);
  else
    buf << detail::json_bytes(sweep_json(rows));
  detail::write_file(path, buf.str());
  out << "wrote " << path << " (" << rows.size() << " rows)\n";
  return 0;
}

// Parses arguments (program name excluded), runs the selected verb, and
// reports through the given streams. Exit status: 0 success, 2 rejected
// input, 3 numeric failure.
inline int run(std::vector<std::string> args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"evolutionary truce dynamics under hierarchical enforcement"};
  app.name("trucedyn");
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  std::optional<double> e, alpha, beta, c, p0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--out", out_path, "output file path");
    sub->add_option("--format", format, "output format: csv or json");
    sub->add_option("--e", e, "enforcement level override");
    sub->add_option("--alpha", alpha, "commander conflict-value override");
    sub->add_option("--beta", beta, "commander discipline-value override");
    sub->add_option("--c", c, "enforcement cost override");
    sub->add_option("--p0", p0, "initial cooperating share override");
  };
  CLI::App* sim = app.add_subcommand("simulate",
                                     "integrate the cooperation dynamics");
  CLI::App* bif = app.add_subcommand("bifurcate",
                                     "scan equilibria against enforcement");
  CLI::App* stk = app.add_subcommand(
      "stackelberg", "solve the command authority's enforcement problem");
  CLI::App* pol = app.add_subcommand("policy",
                                     "critical values of the peace levers");
  CLI::App* swp = app.add_subcommand("sweep",
                                     "summarize runs across one parameter");
  for (CLI::App* sub : {sim, bif, stk, pol, swp}) add_common(sub);

  try {
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{}
                                        : detail::load_config(config_path);
    if (e) cfg.e = *e;
    if (alpha) cfg.alpha = *alpha;
    if (beta) cfg.beta = *beta;
    if (c) cfg.c = *c;
    if (p0) cfg.p0 = *p0;
    if (!out_path.empty()) cfg.out_path = out_path;
    if (!format.empty()) cfg.format = format;
    validate(cfg);

    if (sim->parsed()) return cmd_simulate(cfg, out);
    if (bif->parsed()) return cmd_bifurcate(cfg, out);
    if (stk->parsed()) return cmd_stackelberg(cfg, out);
    if (pol->parsed()) return cmd_policy(cfg, out);
    return cmd_sweep(cfg, out);
  } catch (const ValidationError& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  } catch (const NumericError& ex) {
    err << "numeric error: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    err << "unexpected error: " << ex.what() << "\n";
    return 3;
  }
}

}  // namespace trucedyn::cli
