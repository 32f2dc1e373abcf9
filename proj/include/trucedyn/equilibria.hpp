#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trucedyn/errors.hpp"
#include "trucedyn/game.hpp"

namespace trucedyn {

enum class FixedPointKind { Conflict, Interior, Peace };

enum class Stability { Stable, Unstable, Marginal };

// Eigenvalues within this band of zero are reported as marginal rather than
// forced into a stable/unstable call the arithmetic cannot support.
inline constexpr double kEigenvalueTol = 1e-12;

inline Stability classify_stability(double eigenvalue) {
  if (eigenvalue < -kEigenvalueTol) return Stability::Stable;
  if (eigenvalue > kEigenvalueTol) return Stability::Unstable;
  return Stability::Marginal;
}

struct Equilibrium {
  double pstar;
  FixedPointKind kind;
  double eigenvalue;  // d(drift)/d(pbar) at pstar
  Stability stability;
};

enum class DynamicsRegime { Bistable, MonostableConflict, Threshold };

struct EquilibriumReport {
  std::vector<Equilibrium> equilibria;  // ascending in pstar
  DynamicsRegime regime;
  // separatrix between the conflict and peace basins; present iff bistable
  std::optional<double> basin_boundary;
};

// Root of the truce benefit in (0, 1); exists iff e < R - V.
inline std::optional<double> interior_equilibrium(EnforcementLevel e,
                                                  const PayoffMatrix& m) {
  if (!(e.value() < m.threshold())) return std::nullopt;
  return (e.value() + m.P() - m.S()) / m.benefit_slope();
}

// Derivative of the aggregate drift in pbar; its sign at a fixed point
// decides stability of the one-dimensional flow.
inline double stability_derivative(double pbar, EnforcementLevel e,
                                   const PayoffMatrix& m) {
  detail::require_fraction(pbar, "pbar");
  const double benefit =
      m.benefit_slope() * pbar + (m.S() - m.P()) - e.value();
  return (1.0 - 2.0 * pbar) * benefit + pbar * (1.0 - pbar) * m.benefit_slope();
}

// Locates every fixed point of the reduced dynamics, classifies each by the
// drift derivative, and names the phase portrait.
inline EquilibriumReport analyze(EnforcementLevel e, const PayoffMatrix& m) {
  EquilibriumReport report;
  auto add = [&](double pstar, FixedPointKind kind) {
    const double eig = stability_derivative(pstar, e, m);
    report.equilibria.push_back({pstar, kind, eig, classify_stability(eig)});
  };
  add(0.0, FixedPointKind::Conflict);
  const auto interior = interior_equilibrium(e, m);
  if (interior) add(*interior, FixedPointKind::Interior);
  add(1.0, FixedPointKind::Peace);

  const double tau = m.threshold();
  if (e.value() < tau)
    report.regime = DynamicsRegime::Bistable;
  else if (e.value() > tau)
    report.regime = DynamicsRegime::MonostableConflict;
  else
    report.regime = DynamicsRegime::Threshold;

  if (report.regime == DynamicsRegime::Bistable) report.basin_boundary = interior;
  return report;
}

// Smallest initial cooperating share from which the population reaches full
// truce; alias for the interior equilibrium while the system is bistable.
inline std::optional<double> basin_threshold(EnforcementLevel e,
                                             const PayoffMatrix& m) {
  return interior_equilibrium(e, m);
}

// One enforcement level of a bifurcation scan. A marginal fixed point (the
// tangency at e = R - V) is one-sided and belongs to neither list; the full
// per-point classification is available through analyze().
struct BifurcationRow {
  double e;
  std::vector<double> stable;
  std::vector<double> unstable;
};

namespace detail {

inline void require_e_scan(std::span<const double> e_values) {
  if (e_values.empty())
    throw ValidationError("e_values: must be nonempty");
  for (std::size_t i = 1; i < e_values.size(); ++i)
    if (!(e_values[i] >= e_values[i - 1]))
      throw ValidationError("e_values: must be sorted ascending");
}

}  // namespace detail

inline std::vector<BifurcationRow> bifurcation_sweep(
    std::span<const double> e_values, const PayoffMatrix& m) {
  detail::require_e_scan(e_values);
  std::vector<BifurcationRow> rows;
  rows.reserve(e_values.size());
  for (double e : e_values) {
    const auto report = analyze(EnforcementLevel(e), m);
    BifurcationRow row{e, {}, {}};
    for (const auto& eq : report.equilibria) {
      if (eq.stability == Stability::Stable) row.stable.push_back(eq.pstar);
      else if (eq.stability == Stability::Unstable) row.unstable.push_back(eq.pstar);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Flat per-branch scan rows, keeping the three-valued stability so the
// tangency point at e = R - V survives into exported diagrams.
struct BifurcationRecord {
  double e;
  FixedPointKind branch;
  double pstar;
  Stability stability;
};

inline std::vector<BifurcationRecord> bifurcation_records(
    std::span<const double> e_values, const PayoffMatrix& m) {
  detail::require_e_scan(e_values);
  std::vector<BifurcationRecord> records;
  for (double e : e_values)
    for (const auto& eq : analyze(EnforcementLevel(e), m).equilibria)
      records.push_back({e, eq.kind, eq.pstar, eq.stability});
  return records;
}

}  // namespace trucedyn
