#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "trucedyn/command.hpp"
#include "trucedyn/dynamics.hpp"
#include "trucedyn/equilibria.hpp"
#include "trucedyn/errors.hpp"
#include "trucedyn/policy.hpp"

namespace trucedyn {

// 17 significant digits round-trip any IEEE double exactly.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline double parse_double(const std::string& s, const char* field) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ValidationError(std::string(field) + ": not a number: '" + s + "'");
  return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

inline void require_header(const std::string& got, const std::string& want,
                           const char* what) {
  if (got != want)
    throw ValidationError(std::string(what) + ": expected header '" + want +
                          "', got '" + got + "'");
}

inline void require_cells(const std::vector<std::string>& cells,
                          std::size_t want, const char* what) {
  if (cells.size() != want)
    throw ValidationError(std::string(what) + ": expected " +
                          std::to_string(want) + " columns, got " +
                          std::to_string(cells.size()));
}

}  // namespace detail

inline const char* to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::Conflict: return "conflict";
    case FixedPointKind::Interior: return "interior";
    case FixedPointKind::Peace: return "peace";
  }
  return "?";
}

inline FixedPointKind parse_fixed_point_kind(const std::string& s) {
  if (s == "conflict") return FixedPointKind::Conflict;
  if (s == "interior") return FixedPointKind::Interior;
  if (s == "peace") return FixedPointKind::Peace;
  throw ValidationError("branch: unknown fixed-point kind '" + s + "'");
}

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

inline Stability parse_stability(const std::string& s) {
  if (s == "stable") return Stability::Stable;
  if (s == "unstable") return Stability::Unstable;
  if (s == "marginal") return Stability::Marginal;
  throw ValidationError("stability: unknown stability '" + s + "'");
}

inline const char* to_string(DynamicsRegime r) {
  switch (r) {
    case DynamicsRegime::Bistable: return "bistable";
    case DynamicsRegime::MonostableConflict: return "monostable_conflict";
    case DynamicsRegime::Threshold: return "threshold";
  }
  return "?";
}

inline DynamicsRegime parse_dynamics_regime(const std::string& s) {
  if (s == "bistable") return DynamicsRegime::Bistable;
  if (s == "monostable_conflict") return DynamicsRegime::MonostableConflict;
  if (s == "threshold") return DynamicsRegime::Threshold;
  throw ValidationError("eq_regime: unknown dynamics regime '" + s + "'");
}

inline const char* to_string(CommandRegime r) {
  return r == CommandRegime::Peace ? "peace" : "conflict";
}

inline CommandRegime parse_command_regime(const std::string& s) {
  if (s == "peace") return CommandRegime::Peace;
  if (s == "conflict") return CommandRegime::Conflict;
  throw ValidationError("regime: unknown command regime '" + s + "'");
}

inline const char* to_string(Lever l) {
  switch (l) {
    case Lever::Alpha: return "alpha";
    case Lever::Beta: return "beta";
    case Lever::Cost: return "c";
    case Lever::ThresholdRV: return "threshold_rv";
  }
  return "?";
}

inline Lever parse_lever(const std::string& s) {
  if (s == "alpha") return Lever::Alpha;
  if (s == "beta") return Lever::Beta;
  if (s == "c") return Lever::Cost;
  if (s == "threshold_rv") return Lever::ThresholdRV;
  throw ValidationError("lever: unknown lever '" + s + "'");
}

inline const char* to_string(LeverDirection d) {
  return d == LeverDirection::Decrease ? "decrease" : "increase";
}

inline LeverDirection parse_lever_direction(const std::string& s) {
  if (s == "decrease") return LeverDirection::Decrease;
  if (s == "increase") return LeverDirection::Increase;
  throw ValidationError("direction: unknown direction '" + s + "'");
}

inline OutcomeCase parse_outcome_case(int v) {
  if (v < 1 || v > 4)
    throw ValidationError("case: outcome case must be 1..4, got " +
                          std::to_string(v));
  return static_cast<OutcomeCase>(v);
}

// ---- trajectories ----------------------------------------------------------

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.kind() == Trajectory::Kind::Density) {
    os << "t,pbar,var_p,mean_payoff\n";
    for (const auto& s : traj.samples())
      os << format_double(s.t) << ',' << format_double(s.pbar) << ','
         << format_double(s.var_p) << ',' << format_double(s.mean_payoff)
         << '\n';
  } else {
    os << "t,pbar\n";
    for (const auto& s : traj.samples())
      os << format_double(s.t) << ',' << format_double(s.pbar) << '\n';
  }
}

inline Trajectory parse_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw ValidationError("trajectory: empty input");
  auto header = detail::split_csv(line);
  const bool density = header.size() == 4;
  if (density)
    detail::require_header(line, "t,pbar,var_p,mean_payoff", "trajectory");
  else
    detail::require_header(line, "t,pbar", "trajectory");
  Trajectory traj(density ? Trajectory::Kind::Density
                          : Trajectory::Kind::Aggregate);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    detail::require_cells(cells, density ? 4u : 2u, "trajectory");
    TrajectoryPoint pt;
    pt.t = detail::parse_double(cells[0], "trajectory.t");
    pt.pbar = detail::parse_double(cells[1], "trajectory.pbar");
    if (density) {
      pt.var_p = detail::parse_double(cells[2], "trajectory.var_p");
      pt.mean_payoff = detail::parse_double(cells[3], "trajectory.mean_payoff");
    }
    traj.append(pt);
  }
  return traj;
}

inline nlohmann::ordered_json trajectory_json(const Trajectory& traj) {
  const bool density = traj.kind() == Trajectory::Kind::Density;
  nlohmann::ordered_json j;
  j["kind"] = density ? "density" : "aggregate";
  auto& rows = j["samples"] = nlohmann::ordered_json::array();
  for (const auto& s : traj.samples()) {
    nlohmann::ordered_json row{{"t", s.t}, {"pbar", s.pbar}};
    if (density) {
      row["var_p"] = s.var_p;
      row["mean_payoff"] = s.mean_payoff;
    }
    rows.push_back(std::move(row));
  }
  return j;
}

inline Trajectory parse_trajectory_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("samples"))
    throw ValidationError("trajectory: expected {kind, samples}");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "aggregate" && kind != "density")
    throw ValidationError("trajectory.kind: unknown kind '" + kind + "'");
  const bool density = kind == "density";
  Trajectory traj(density ? Trajectory::Kind::Density
                          : Trajectory::Kind::Aggregate);
  for (const auto& row : j.at("samples")) {
    TrajectoryPoint pt;
    pt.t = row.at("t").get<double>();
    pt.pbar = row.at("pbar").get<double>();
    if (density) {
      pt.var_p = row.at("var_p").get<double>();
      pt.mean_payoff = row.at("mean_payoff").get<double>();
    }
    traj.append(pt);
  }
  return traj;
}

// ---- bifurcation scans -----------------------------------------------------

inline void write_bifurcation_csv(std::ostream& os,
                                  std::span<const BifurcationRecord> records) {
  os << "e,branch,pstar,stability\n";
  for (const auto& r : records)
    os << format_double(r.e) << ',' << to_string(r.branch) << ','
       << format_double(r.pstar) << ',' << to_string(r.stability) << '\n';
}

inline std::vector<BifurcationRecord> parse_bifurcation_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw ValidationError("bifurcation: empty input");
  detail::require_header(line, "e,branch,pstar,stability", "bifurcation");
  std::vector<BifurcationRecord> records;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    detail::require_cells(cells, 4, "bifurcation");
    records.push_back({detail::parse_double(cells[0], "bifurcation.e"),
                       parse_fixed_point_kind(cells[1]),
                       detail::parse_double(cells[2], "bifurcation.pstar"),
                       parse_stability(cells[3])});
  }
  return records;
}

inline nlohmann::ordered_json bifurcation_json(
    std::span<const BifurcationRecord> records) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : records)
    rows.push_back({{"e", r.e},
                    {"branch", to_string(r.branch)},
                    {"pstar", r.pstar},
                    {"stability", to_string(r.stability)}});
  return rows;
}

inline std::vector<BifurcationRecord> parse_bifurcation_json(
    const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("bifurcation: expected an array");
  std::vector<BifurcationRecord> records;
  for (const auto& row : j)
    records.push_back({row.at("e").get<double>(),
                       parse_fixed_point_kind(row.at("branch").get<std::string>()),
                       row.at("pstar").get<double>(),
                       parse_stability(row.at("stability").get<std::string>())});
  return records;
}

// ---- Stackelberg solutions -------------------------------------------------

inline nlohmann::ordered_json stackelberg_json(const StackelbergSolution& s) {
  return nlohmann::ordered_json{
      {"e_star", s.e_star},
      {"regime", to_string(s.regime)},
      {"utility", s.utility},
      {"case", static_cast<int>(s.outcome_case)},
      {"e_p", s.peace_candidate.e},
      {"U_p", s.peace_candidate.utility},
      {"e_c", s.conflict_candidate.e},
      {"U_c", s.conflict_candidate.utility},
      {"prop1_rhs", s.prop1_rhs}};
}

inline StackelbergSolution parse_stackelberg_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw ValidationError("stackelberg: expected a JSON object");
  StackelbergSolution s;
  try {
    s.e_star = j.at("e_star").get<double>();
    s.regime = parse_command_regime(j.at("regime").get<std::string>());
    s.utility = j.at("utility").get<double>();
    s.outcome_case = parse_outcome_case(j.at("case").get<int>());
    s.peace_candidate = {j.at("e_p").get<double>(), j.at("U_p").get<double>()};
    s.conflict_candidate = {j.at("e_c").get<double>(),
                            j.at("U_c").get<double>()};
    s.prop1_rhs = j.at("prop1_rhs").get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("stackelberg: ") + ex.what());
  }
  return s;
}

inline void write_stackelberg_csv(std::ostream& os,
                                  const StackelbergSolution& s) {
  os << "e_star,regime,utility,case,e_p,U_p,e_c,U_c,prop1_rhs\n"
     << format_double(s.e_star) << ',' << to_string(s.regime) << ','
     << format_double(s.utility) << ',' << static_cast<int>(s.outcome_case)
     << ',' << format_double(s.peace_candidate.e) << ','
     << format_double(s.peace_candidate.utility) << ','
     << format_double(s.conflict_candidate.e) << ','
     << format_double(s.conflict_candidate.utility) << ','
     << format_double(s.prop1_rhs) << '\n';
}

inline StackelbergSolution parse_stackelberg_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw ValidationError("stackelberg: empty input");
  detail::require_header(line, "e_star,regime,utility,case,e_p,U_p,e_c,U_c,prop1_rhs",
                         "stackelberg");
  if (!std::getline(is, line))
    throw ValidationError("stackelberg: missing data row");
  const auto cells = detail::split_csv(line);
  detail::require_cells(cells, 9, "stackelberg");
  StackelbergSolution s;
  s.e_star = detail::parse_double(cells[0], "stackelberg.e_star");
  s.regime = parse_command_regime(cells[1]);
  s.utility = detail::parse_double(cells[2], "stackelberg.utility");
  s.outcome_case = parse_outcome_case(
      static_cast<int>(detail::parse_double(cells[3], "stackelberg.case")));
  s.peace_candidate = {detail::parse_double(cells[4], "stackelberg.e_p"),
                       detail::parse_double(cells[5], "stackelberg.U_p")};
  s.conflict_candidate = {detail::parse_double(cells[6], "stackelberg.e_c"),
                          detail::parse_double(cells[7], "stackelberg.U_c")};
  s.prop1_rhs = detail::parse_double(cells[8], "stackelberg.prop1_rhs");
  return s;
}

// ---- lever reports ---------------------------------------------------------

inline void write_lever_csv(std::ostream& os,
                            std::span<const LeverResult> levers) {
  os << "lever,current,critical,direction,feasible\n";
  for (const auto& l : levers) {
    os << to_string(l.lever) << ',' << format_double(l.current) << ',';
    if (l.critical) os << format_double(*l.critical);
    os << ',' << to_string(l.direction) << ','
       << (l.feasible ? "true" : "false") << '\n';
  }
}

inline std::vector<LeverResult> parse_lever_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("levers: empty input");
  detail::require_header(line, "lever,current,critical,direction,feasible",
                         "levers");
  std::vector<LeverResult> levers;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    detail::require_cells(cells, 5, "levers");
    LeverResult l{parse_lever(cells[0]),
                  detail::parse_double(cells[1], "levers.current"),
                  std::nullopt, false, parse_lever_direction(cells[3])};
    if (!cells[2].empty())
      l.critical = detail::parse_double(cells[2], "levers.critical");
    if (cells[4] == "true") l.feasible = true;
    else if (cells[4] == "false") l.feasible = false;
    else throw ValidationError("levers.feasible: expected true/false, got '" +
                               cells[4] + "'");
    levers.push_back(l);
  }
  return levers;
}

inline nlohmann::ordered_json lever_json(std::span<const LeverResult> levers) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& l : levers) {
    nlohmann::ordered_json row{{"lever", to_string(l.lever)},
                               {"current", l.current},
                               {"critical", nullptr},
                               {"direction", to_string(l.direction)},
                               {"feasible", l.feasible}};
    if (l.critical) row["critical"] = *l.critical;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<LeverResult> parse_lever_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("levers: expected an array");
  std::vector<LeverResult> levers;
  for (const auto& row : j) {
    LeverResult l{parse_lever(row.at("lever").get<std::string>()),
                  row.at("current").get<double>(), std::nullopt,
                  row.at("feasible").get<bool>(),
                  parse_lever_direction(row.at("direction").get<std::string>())};
    if (!row.at("critical").is_null())
      l.critical = row.at("critical").get<double>();
    levers.push_back(l);
  }
  return levers;
}

// ---- sweeps ----------------------------------------------------------------

// One sweep point: the swept parameter value plus the run summary (where the
// population lands, the phase portrait, and the commander's response).
struct SweepRow {
  std::string param;
  double value;
  double final_pbar;
  std::string attractor;
  DynamicsRegime eq_regime;
  double e_star;
  CommandRegime cmd_regime;
  OutcomeCase outcome_case;
};

inline void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "param,value,final_pbar,attractor,eq_regime,e_star,cmd_regime,case\n";
  for (const auto& r : rows)
    os << r.param << ',' << format_double(r.value) << ','
       << format_double(r.final_pbar) << ',' << r.attractor << ','
       << to_string(r.eq_regime) << ',' << format_double(r.e_star) << ','
       << to_string(r.cmd_regime) << ',' << static_cast<int>(r.outcome_case)
       << '\n';
}

inline std::vector<SweepRow> parse_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("sweep: empty input");
  detail::require_header(
      line, "param,value,final_pbar,attractor,eq_regime,e_star,cmd_regime,case",
      "sweep");
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    detail::require_cells(cells, 8, "sweep");
    SweepRow r;
    r.param = cells[0];
    r.value = detail::parse_double(cells[1], "sweep.value");
    r.final_pbar = detail::parse_double(cells[2], "sweep.final_pbar");
    r.attractor = cells[3];
    r.eq_regime = parse_dynamics_regime(cells[4]);
    r.e_star = detail::parse_double(cells[5], "sweep.e_star");
    r.cmd_regime = parse_command_regime(cells[6]);
    r.outcome_case = parse_outcome_case(
        static_cast<int>(detail::parse_double(cells[7], "sweep.case")));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline nlohmann::ordered_json sweep_json(std::span<const SweepRow> rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    arr.push_back({{"param", r.param},
                   {"value", r.value},
                   {"final_pbar", r.final_pbar},
                   {"attractor", r.attractor},
                   {"eq_regime", to_string(r.eq_regime)},
                   {"e_star", r.e_star},
                   {"cmd_regime", to_string(r.cmd_regime)},
                   {"case", static_cast<int>(r.outcome_case)}});
  return arr;
}

inline std::vector<SweepRow> parse_sweep_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("sweep: expected an array");
  std::vector<SweepRow> rows;
  for (const auto& row : j) {
    SweepRow r;
    r.param = row.at("param").get<std::string>();
    r.value = row.at("value").get<double>();
    r.final_pbar = row.at("final_pbar").get<double>();
    r.attractor = row.at("attractor").get<std::string>();
    r.eq_regime = parse_dynamics_regime(row.at("eq_regime").get<std::string>());
    r.e_star = row.at("e_star").get<double>();
    r.cmd_regime = parse_command_regime(row.at("cmd_regime").get<std::string>());
    r.outcome_case = parse_outcome_case(row.at("case").get<int>());
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace trucedyn
