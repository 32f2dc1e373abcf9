#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "trucedyn/density.hpp"
#include "trucedyn/errors.hpp"
#include "trucedyn/game.hpp"

namespace trucedyn {

struct TrajectoryPoint {
  double t = 0.0;
  double pbar = 0.0;
  // density runs also record the propensity variance and mean payoff
  double var_p = std::numeric_limits<double>::quiet_NaN();
  double mean_payoff = std::numeric_limits<double>::quiet_NaN();
};

// Time-ordered record of a simulation run.
class Trajectory {
 public:
  enum class Kind { Aggregate, Density };

  explicit Trajectory(Kind kind) : kind_(kind) {}

  Kind kind() const { return kind_; }

  void append(TrajectoryPoint pt) {
    if (!samples_.empty() && !(pt.t > samples_.back().t))
      throw ValidationError("trajectory.t: sample times must be strictly "
                            "increasing, got " + std::to_string(pt.t) +
                            " after " + std::to_string(samples_.back().t));
    samples_.push_back(pt);
  }

  const std::vector<TrajectoryPoint>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  const TrajectoryPoint& back() const { return samples_.back(); }
  double final_pbar() const { return samples_.back().pbar; }

 private:
  Kind kind_;
  std::vector<TrajectoryPoint> samples_;
};

namespace detail {

inline void require_dt(double dt) {
  if (!std::isfinite(dt) || !(dt > 0.0))
    throw ValidationError("dt: must be > 0 and finite, got " +
                          std::to_string(dt));
}

inline void require_t_end(double t_end) {
  if (!std::isfinite(t_end) || !(t_end > 0.0))
    throw ValidationError("t_end: must be > 0 and finite, got " +
                          std::to_string(t_end));
}

// steps between recorded samples; <= 0 interval requests the default
inline std::int64_t sample_stride(double dt, double t_end, double interval) {
  if (interval <= 0.0) interval = std::max(dt, t_end / 2000.0);
  if (!std::isfinite(interval))
    throw ValidationError("sample_interval: must be finite");
  return std::max<std::int64_t>(1, std::llround(interval / dt));
}

}  // namespace detail

// Bound on dt * max|fitness - mean fitness| beyond which the discrete
// replicator update is allowed to run.
inline constexpr double kReplicatorStepGuard = 0.1;

// Mean population payoff under the density, by quadrature of payoff * f.
inline double population_mean_payoff(const DensityState& d, EnforcementLevel e,
                                     const PayoffMatrix& m) {
  const auto p = node_propensities(d.grid());
  const double base = attack_payoff(mean_cooperation(d), m);
  const double benefit = truce_benefit(mean_cooperation(d), e, m);
  std::vector<double> fw(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    fw[i] = (base + p[i] * benefit) * d.weights()[i];
  return integrate(d.grid(), fw);
}

// One explicit-Euler replicator step: f <- f * (1 + dt * (payoff - mean)),
// then clip stray negatives and renormalize. Selection acts only through
// payoff differences, so the frequency-dependent baseline cancels.
inline DensityState density_step(const DensityState& d, EnforcementLevel e,
                                 const PayoffMatrix& m, double dt) {
  detail::require_dt(dt);
  const StrategyGrid& g = d.grid();
  const auto p = node_propensities(g);
  const double pbar = mean_cooperation(d);
  const double base = attack_payoff(pbar, m);
  const double benefit = truce_benefit(pbar, e, m);

  std::vector<double> fitness(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) fitness[i] = base + p[i] * benefit;

  std::vector<double> fw(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) fw[i] = fitness[i] * d.weights()[i];
  const double mean_fitness = integrate(g, fw);

  double worst = 0.0;
  for (double f : fitness) worst = std::max(worst, std::abs(f - mean_fitness));
  if (dt * worst > kReplicatorStepGuard)
    throw NumericError("replicator step size too large: dt * max|payoff - "
                       "mean| = " + std::to_string(dt * worst) +
                       " exceeds the stability guard " +
                       std::to_string(kReplicatorStepGuard));

  std::vector<double> next(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    next[i] = std::max(0.0, d.weights()[i] * (1.0 + dt * (fitness[i] - mean_fitness)));

  const double mass = integrate(g, next);
  if (!(mass > 0.0))
    throw NumericError("replicator step degenerated: density mass vanished "
                       "after clipping");
  for (double& w : next) w /= mass;
  return DensityState(g, std::move(next), d.t() + dt);
}

// Full-density replicator run; records t, mean cooperation, propensity
// variance and mean payoff at the sampling stride.
inline Trajectory simulate_density(const DensityState& initial,
                                   EnforcementLevel e, const PayoffMatrix& m,
                                   double t_end, double dt,
                                   double sample_interval = 0.0) {
  detail::require_dt(dt);
  detail::require_t_end(t_end);
  const std::int64_t n = std::max<std::int64_t>(1, std::llround(t_end / dt));
  const std::int64_t stride = detail::sample_stride(dt, t_end, sample_interval);

  Trajectory traj(Trajectory::Kind::Density);
  const double t0 = initial.t();
  DensityState d = initial;
  auto record = [&](std::int64_t i) {
    traj.append({t0 + static_cast<double>(i) * dt, mean_cooperation(d),
                 propensity_variance(d), population_mean_payoff(d, e, m)});
  };
  record(0);
  for (std::int64_t i = 1; i <= n; ++i) {
    d = density_step(d, e, m, dt);
    if (i % stride == 0 || i == n) record(i);
  }
  return traj;
}

namespace detail {

// cubic drift of the cooperating share; callable outside [0, 1] because
// Runge-Kutta stage points may briefly step past the boundary
inline double aggregate_drift(double pbar, double e, const PayoffMatrix& m) {
  return pbar * (1.0 - pbar) *
         (m.benefit_slope() * pbar + (m.S() - m.P()) - e);
}

}  // namespace detail

// Drift of the cooperating share under the reduced one-dimensional dynamics:
// pbar(1 - pbar) times the truce benefit at pbar.
inline double aggregate_velocity(double pbar, EnforcementLevel e,
                                 const PayoffMatrix& m) {
  detail::require_fraction(pbar, "pbar");
  return detail::aggregate_drift(pbar, e.value(), m);
}

// Names the attractor a trajectory has settled on: "peace" within tol of
// full truce, "conflict" within tol of full attack, otherwise "undecided".
inline const char* attractor_label(double pbar, double tol = 1e-3) {
  if (std::abs(pbar - 1.0) <= tol) return "peace";
  if (std::abs(pbar) <= tol) return "conflict";
  return "undecided";
}

// Classical RK4 on the reduced dynamics with the state clamped back to
// [0, 1] after each step.
inline Trajectory simulate_aggregate(double p0, EnforcementLevel e,
                                     const PayoffMatrix& m, double t_end,
                                     double dt, double sample_interval = 0.0) {
  detail::require_fraction(p0, "p0");
  detail::require_dt(dt);
  detail::require_t_end(t_end);
  const std::int64_t n = std::max<std::int64_t>(1, std::llround(t_end / dt));
  const std::int64_t stride = detail::sample_stride(dt, t_end, sample_interval);

  Trajectory traj(Trajectory::Kind::Aggregate);
  double p = p0;
  traj.append({0.0, p});
  for (std::int64_t i = 1; i <= n; ++i) {
    const double k1 = detail::aggregate_drift(p, e.value(), m);
    const double k2 = detail::aggregate_drift(p + 0.5 * dt * k1, e.value(), m);
    const double k3 = detail::aggregate_drift(p + 0.5 * dt * k2, e.value(), m);
    const double k4 = detail::aggregate_drift(p + dt * k3, e.value(), m);
    p = std::clamp(p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0, 1.0);
    if (i % stride == 0 || i == n)
      traj.append({static_cast<double>(i) * dt, p});
  }
  return traj;
}

}  // namespace trucedyn
