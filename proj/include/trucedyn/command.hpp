#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "trucedyn/errors.hpp"
#include "trucedyn/game.hpp"

namespace trucedyn {

// Command authority preferences: alpha values ongoing conflict, beta values
// visible discipline (rises linearly in e), and c prices enforcement
// quadratically. Negative conflict value is unusual enough to require an
// explicit opt-in.
class CommanderParams {
 public:
  CommanderParams(double alpha, double beta, double cost,
                  bool allow_negative_alpha = false)
      : alpha_(alpha), beta_(beta), cost_(cost),
        allow_negative_alpha_(allow_negative_alpha) {
    detail::require_finite(alpha_, "commander.alpha");
    detail::require_finite(beta_, "commander.beta");
    detail::require_finite(cost_, "commander.c");
    if (!(cost_ > 0.0))
      throw ValidationError("commander.c: enforcement cost must be > 0, got " +
                            std::to_string(cost_));
    if (!(beta_ >= 0.0))
      throw ValidationError("commander.beta: discipline value must be >= 0, "
                            "got " + std::to_string(beta_));
    if (!allow_negative_alpha_ && !(alpha_ >= 0.0))
      throw ValidationError(
          "commander.alpha: conflict value must be >= 0 (set "
          "allow_negative_alpha to permit a truce-favoring command), got " +
          std::to_string(alpha_));
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double cost() const { return cost_; }
  bool negative_alpha_allowed() const { return allow_negative_alpha_; }

 private:
  double alpha_, beta_, cost_;
  bool allow_negative_alpha_;
};

enum class CommandRegime { Peace, Conflict };

// Long-run outcomes by where the discipline ridge beta/c sits relative to
// the truce threshold and which branch the commander prefers. Serialized as
// the case index 1..4. PeaceAtThreshold requires a conflict-averse command
// (alpha < 0); with alpha >= 0 the conflict branch always wins past the
// threshold.
enum class OutcomeCase {
  StablePeaceLowEnforcement = 1,   // beta/c < R - V, peace preferred
  PeaceAtThreshold = 2,            // beta/c > R - V, peace still preferred
  TransitionToConflict = 3,        // beta/c < R - V, conflict chosen anyway
  FullConflictHighEnforcement = 4  // beta/c > R - V, conflict preferred
};

// Commander utility at enforcement e once the population has settled: full
// truce survives for e <= R - V and collapses beyond, which is where the
// alpha term switches on.
inline double commander_utility(EnforcementLevel e, const CommanderParams& cp,
                                const PayoffMatrix& m) {
  const double ev = e.value();
  const double quad = cp.beta() * ev - 0.5 * cp.cost() * ev * ev;
  return ev <= m.threshold() ? quad : cp.alpha() + quad;
}

struct BranchOptimum {
  double e;
  double utility;
};

struct StackelbergSolution {
  double e_star;
  CommandRegime regime;
  double utility;
  BranchOptimum peace_candidate;     // best enforcement keeping full truce
  BranchOptimum conflict_candidate;  // best enforcement conceding collapse
  OutcomeCase outcome_case;
  // peace holds iff alpha <= this; equals the utility gap at the two
  // candidates net of alpha
  double prop1_rhs;
};

// Solves the commander's problem by comparing the two branch maxima of the
// piecewise-quadratic utility. The conflict branch is optimized over the
// closed set [R - V, inf) so its supremum is attained; ties go to peace.
inline StackelbergSolution optimal_enforcement(const CommanderParams& cp,
                                               const PayoffMatrix& m) {
  const double tau = m.threshold();
  const double ridge = cp.beta() / cp.cost();  // unconstrained quadratic peak
  const double e_p = std::min(ridge, tau);
  const double e_c = std::max(ridge, tau);
  const double u_p = cp.beta() * e_p - 0.5 * cp.cost() * e_p * e_p;
  const double u_c = cp.alpha() + cp.beta() * e_c - 0.5 * cp.cost() * e_c * e_c;
  const double rhs = 0.5 * cp.cost() * (e_c * e_c - e_p * e_p) -
                     cp.beta() * (e_c - e_p);

  // alpha <= rhs is algebraically u_p >= u_c; deciding through the single
  // comparison keeps the optimizer and peace_condition in exact agreement
  const bool peace = cp.alpha() <= rhs;

  StackelbergSolution sol;
  sol.peace_candidate = {e_p, u_p};
  sol.conflict_candidate = {e_c, u_c};
  sol.regime = peace ? CommandRegime::Peace : CommandRegime::Conflict;
  sol.e_star = peace ? e_p : e_c;
  sol.utility = peace ? u_p : u_c;
  sol.prop1_rhs = rhs;
  if (ridge > tau)
    sol.outcome_case = peace ? OutcomeCase::PeaceAtThreshold
                             : OutcomeCase::FullConflictHighEnforcement;
  else
    sol.outcome_case = peace ? OutcomeCase::StablePeaceLowEnforcement
                             : OutcomeCase::TransitionToConflict;
  return sol;
}

struct PeaceCondition {
  bool prefers_peace;
  double rhs;  // largest conflict value alpha compatible with peace
};

// Peace is chosen iff alpha <= (c/2)(e_c^2 - e_p^2) - beta(e_c - e_p), the
// utility the commander forgoes by capping enforcement at the threshold.
inline PeaceCondition peace_condition(const CommanderParams& cp,
                                      const PayoffMatrix& m) {
  const auto sol = optimal_enforcement(cp, m);
  return {sol.regime == CommandRegime::Peace, sol.prop1_rhs};
}

inline OutcomeCase classify_outcome(const CommanderParams& cp,
                                    const PayoffMatrix& m) {
  return optimal_enforcement(cp, m).outcome_case;
}

}  // namespace trucedyn
