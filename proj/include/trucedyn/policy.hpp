#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "trucedyn/command.hpp"
#include "trucedyn/errors.hpp"
#include "trucedyn/game.hpp"

namespace trucedyn {

enum class Lever { Alpha, Beta, Cost, ThresholdRV };

enum class LeverDirection { Decrease, Increase };

// Critical value of one policy lever, all else held fixed. `critical` is the
// boundary value at which the commander switches to preferring peace; absent
// when no admissible value of the lever can get there.
struct LeverResult {
  Lever lever;
  double current;
  std::optional<double> critical;
  bool feasible;
  LeverDirection direction;
};

// Payoffs with the truce threshold R - V moved to tau by adjusting R alone.
inline PayoffMatrix with_threshold(const PayoffMatrix& m, double tau) {
  return PayoffMatrix(m.V() + tau, m.V(), m.S(), m.P());
}

namespace detail {

inline bool prefers_peace(const CommanderParams& cp, const PayoffMatrix& m) {
  return optimal_enforcement(cp, m).regime == CommandRegime::Peace;
}

// Closed-form candidates land within a few ulps of the floating boundary;
// walk to the first representable value on the peace side so that applying
// the reported critical actually flips the regime.
template <typename PeaceAt>
inline double snap_to_peace(double x, PeaceAt&& peace_at, bool upward) {
  const double to = upward ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 64; ++i) {
    if (peace_at(x)) return x;
    x = std::nextafter(x, to);
  }
  if (peace_at(x)) return x;
  throw NumericError("lever critical value failed to stabilize near " +
                     std::to_string(x));
}

}  // namespace detail

// Largest conflict valuation still compatible with peace. Infeasible when
// the discipline ridge beta/c already exceeds the threshold: there the
// forgone-utility bound is negative and no alpha >= 0 reaches it.
inline LeverResult critical_alpha(const CommanderParams& cp,
                                  const PayoffMatrix& m) {
  const auto sol = optimal_enforcement(cp, m);
  LeverResult r{Lever::Alpha, cp.alpha(), std::nullopt, false,
                LeverDirection::Decrease};
  if (sol.regime == CommandRegime::Peace) {
    r.critical = cp.alpha();
    r.feasible = true;
    return r;
  }
  if (sol.prop1_rhs < 0.0) return r;
  r.critical = std::max(0.0, sol.prop1_rhs);
  r.feasible = true;
  return r;
}

// Largest discipline value beta preserving peace. Feasible while the
// required ridge position stays nonnegative, i.e. alpha <= (c/2)(R - V)^2.
inline LeverResult critical_beta(const CommanderParams& cp,
                                 const PayoffMatrix& m) {
  LeverResult r{Lever::Beta, cp.beta(), std::nullopt, false,
                LeverDirection::Decrease};
  if (detail::prefers_peace(cp, m)) {
    r.critical = cp.beta();
    r.feasible = true;
    return r;
  }
  const double tau = m.threshold();
  // same association as the optimizer's bound at beta = 0, so the
  // feasibility test and the flip test cannot disagree by an ulp
  const double cap = 0.5 * cp.cost() * (tau * tau);
  if (cp.alpha() > cap) return r;
  const double candidate = std::max(
      0.0, cp.cost() * (tau - std::sqrt(2.0 * cp.alpha() / cp.cost())));
  auto peace_at = [&](double b) {
    return detail::prefers_peace(
        CommanderParams(cp.alpha(), b, cp.cost(), cp.negative_alpha_allowed()),
        m);
  };
  r.critical = detail::snap_to_peace(candidate, peace_at, /*upward=*/false);
  r.feasible = true;
  return r;
}

// Smallest enforcement cost c at which peace becomes preferred. Always
// attainable: the forgone-utility bound grows like (c/2)(R - V)^2, so an
// expanding bracket plus bisection finds the switch point.
inline LeverResult critical_cost(const CommanderParams& cp,
                                 const PayoffMatrix& m) {
  LeverResult r{Lever::Cost, cp.cost(), std::nullopt, true,
                LeverDirection::Increase};
  if (detail::prefers_peace(cp, m)) {
    r.critical = cp.cost();
    return r;
  }
  auto peace_at = [&](double c) {
    return detail::prefers_peace(
        CommanderParams(cp.alpha(), cp.beta(), c, cp.negative_alpha_allowed()),
        m);
  };
  double lo = cp.cost();
  double hi = cp.cost();
  for (int i = 0; i < 200 && !peace_at(hi); ++i) {
    lo = hi;
    hi *= 2.0;
  }
  if (!peace_at(hi))
    throw NumericError("cost lever: bracket expansion failed to reach peace");
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at rounding resolution
    (peace_at(mid) ? hi : lo) = mid;
  }
  r.critical = hi;
  return r;
}

// Smallest truce threshold tau' = R' - V (raised through R) that makes the
// commander prefer peace; always feasible since the bound grows in tau.
inline LeverResult critical_threshold(const CommanderParams& cp,
                                      const PayoffMatrix& m) {
  LeverResult r{Lever::ThresholdRV, m.threshold(), std::nullopt, true,
                LeverDirection::Increase};
  if (detail::prefers_peace(cp, m)) {
    r.critical = m.threshold();
    return r;
  }
  const double candidate = std::max(
      m.threshold(),
      cp.beta() / cp.cost() + std::sqrt(2.0 * cp.alpha() / cp.cost()));
  auto peace_at = [&](double tau) {
    return detail::prefers_peace(cp, with_threshold(m, tau));
  };
  r.critical = detail::snap_to_peace(candidate, peace_at, /*upward=*/true);
  return r;
}

// All four levers against the same baseline, in a fixed order.
inline std::vector<LeverResult> lever_report(const CommanderParams& cp,
                                             const PayoffMatrix& m) {
  return {critical_alpha(cp, m), critical_beta(cp, m), critical_cost(cp, m),
          critical_threshold(cp, m)};
}

}  // namespace trucedyn
