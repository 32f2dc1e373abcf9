#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "trucedyn/errors.hpp"

namespace trucedyn {

namespace detail {

inline void require_finite(double x, const char* field) {
  if (!std::isfinite(x))
    throw ValidationError(std::string(field) + ": must be finite");
}

inline void require_fraction(double x, const char* field) {
  if (!(x >= 0.0 && x <= 1.0))
    throw ValidationError(std::string(field) + ": must lie in [0, 1], got " +
                          std::to_string(x));
}

}  // namespace detail

// Stage game between two combatant units. Each chooses truce (T) or attack
// (A); R is the mutual-truce payoff, V the payoff to attacking a truce
// keeper, S the payoff to keeping truce against an attacker, P the
// mutual-attack payoff. R > V and P > S make both (T,T) and (A,A) strict
// equilibria, which is what turns fraternization into a coordination
// problem rather than a dominance one.
class PayoffMatrix {
 public:
  PayoffMatrix(double mutual_truce, double temptation, double sucker,
               double mutual_attack)
      : r_(mutual_truce), v_(temptation), s_(sucker), p_(mutual_attack) {
    detail::require_finite(r_, "payoffs.R");
    detail::require_finite(v_, "payoffs.V");
    detail::require_finite(s_, "payoffs.S");
    detail::require_finite(p_, "payoffs.P");
    if (!(r_ > v_))
      throw ValidationError(
          "payoffs.R: mutual truce must beat unilateral attack (R > V), got "
          "R=" + std::to_string(r_) + " V=" + std::to_string(v_));
    if (!(p_ > s_))
      throw ValidationError(
          "payoffs.P: mutual attack must beat being suckered (P > S), got "
          "P=" + std::to_string(p_) + " S=" + std::to_string(s_));
  }

  double R() const { return r_; }
  double V() const { return v_; }
  double S() const { return s_; }
  double P() const { return p_; }

  // Slope of the truce benefit in the cooperating share; positive whenever
  // the coordination ordering holds.
  double benefit_slope() const { return (r_ - v_) - (s_ - p_); }

  // Enforcement level at which full truce stops being self-sustaining.
  double threshold() const { return r_ - v_; }

 private:
  double r_, v_, s_, p_;
};

// Sanction level the command authority imposes on truce behavior.
class EnforcementLevel {
 public:
  explicit EnforcementLevel(double e) : e_(e) {
    detail::require_finite(e_, "e");
    if (!(e_ >= 0.0))
      throw ValidationError("e: enforcement must be >= 0, got " +
                            std::to_string(e_));
  }
  double value() const { return e_; }

 private:
  double e_;
};

// Heritable disposition toward truce; propensity() maps it to a probability.
class StrategyParam {
 public:
  explicit StrategyParam(double theta) : theta_(theta) {
    detail::require_finite(theta_, "theta");
  }
  double value() const { return theta_; }

 private:
  double theta_;
};

namespace detail {

// exp stays finite on [-709, 709]; beyond that the logistic has already
// saturated to 0 or 1 in double precision anyway.
inline double logistic(double t) {
  t = std::clamp(t, -709.0, 709.0);
  return 1.0 / (1.0 + std::exp(-t));
}

}  // namespace detail

// Probability that a type-theta agent keeps truce in an encounter.
inline double propensity(StrategyParam theta) {
  return detail::logistic(theta.value());
}

// Payoff of an unconditional attacker facing a population whose share pbar
// keeps truce.
inline double attack_payoff(double pbar, const PayoffMatrix& m) {
  detail::require_fraction(pbar, "pbar");
  return pbar * m.V() + (1.0 - pbar) * m.P();
}

// Net gain from keeping truce instead of attacking, after the sanction e.
// Positive iff pbar exceeds the interior indifference point.
inline double truce_benefit(double pbar, EnforcementLevel e,
                            const PayoffMatrix& m) {
  detail::require_fraction(pbar, "pbar");
  return pbar * (m.R() - m.V()) + (1.0 - pbar) * (m.S() - m.P()) - e.value();
}

// Expected payoff of a type-theta agent: the attacker baseline plus the
// propensity-weighted truce benefit.
inline double expected_payoff(StrategyParam theta, double pbar,
                              EnforcementLevel e, const PayoffMatrix& m) {
  return attack_payoff(pbar, m) + propensity(theta) * truce_benefit(pbar, e, m);
}

}  // namespace trucedyn
