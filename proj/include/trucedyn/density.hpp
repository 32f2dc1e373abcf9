#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trucedyn/errors.hpp"
#include "trucedyn/game.hpp"

namespace trucedyn {

// Uniform discretization of the strategy axis [theta_min, theta_max].
class StrategyGrid {
 public:
  StrategyGrid(double theta_min, double theta_max, std::size_t n)
      : lo_(theta_min), hi_(theta_max), n_(n) {
    detail::require_finite(lo_, "grid.theta_min");
    detail::require_finite(hi_, "grid.theta_max");
    if (!(lo_ < hi_))
      throw ValidationError("grid.theta_min: must be < grid.theta_max, got [" +
                            std::to_string(lo_) + ", " + std::to_string(hi_) +
                            "]");
    if (n_ < 3)
      throw ValidationError("grid.n: need at least 3 nodes, got " +
                            std::to_string(n_));
    spacing_ = (hi_ - lo_) / static_cast<double>(n_ - 1);
  }

  // Default working grid: [-8, 8] covers propensities from ~3e-4 to
  // ~1 - 3e-4, which is every behavior the smooth dynamics can distinguish.
  static StrategyGrid standard() { return StrategyGrid(-8.0, 8.0, 401); }

  double theta_min() const { return lo_; }
  double theta_max() const { return hi_; }
  std::size_t size() const { return n_; }
  double spacing() const { return spacing_; }

  double node(std::size_t i) const {
    // pin the last node so accumulated rounding never overshoots the bound
    return i + 1 == n_ ? hi_ : lo_ + static_cast<double>(i) * spacing_;
  }

  bool operator==(const StrategyGrid&) const = default;

 private:
  double lo_, hi_;
  std::size_t n_;
  double spacing_;
};

// Trapezoidal quadrature of nodal values over the grid. Spectrally accurate
// for smooth densities that vanish at both ends, which is the regime the
// simulations live in.
inline double integrate(const StrategyGrid& g, std::span<const double> values) {
  if (values.size() != g.size())
    throw ValidationError("grid.values: expected " + std::to_string(g.size()) +
                          " nodal values, got " + std::to_string(values.size()));
  double acc = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
  return acc * g.spacing();
}

// Truce propensity evaluated at every node.
inline std::vector<double> node_propensities(const StrategyGrid& g) {
  std::vector<double> p(g.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = detail::logistic(g.node(i));
  return p;
}

// Population density over strategies, sampled on a grid: nonnegative nodal
// weights with unit trapezoidal mass.
class DensityState {
 public:
  DensityState(StrategyGrid grid, std::vector<double> weights, double t = 0.0)
      : grid_(grid), weights_(std::move(weights)), t_(t) {
    detail::require_finite(t_, "density.t");
    if (weights_.size() != grid_.size())
      throw ValidationError("density.weights: expected " +
                            std::to_string(grid_.size()) + " values, got " +
                            std::to_string(weights_.size()));
    for (double w : weights_)
      if (!(w >= 0.0) || !std::isfinite(w))
        throw ValidationError(
            "density.weights: must be finite and >= 0, got " +
            std::to_string(w));
    const double mass = integrate(grid_, weights_);
    if (std::abs(mass - 1.0) > kMassTol)
      throw ValidationError("density.weights: trapezoidal mass must be 1 "
                            "within 1e-10, got " + std::to_string(mass));
  }

  // Scales nonnegative raw weights to unit mass.
  static DensityState normalized(const StrategyGrid& grid,
                                 std::vector<double> raw, double t = 0.0) {
    const double mass = integrate(grid, raw);
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw ValidationError("density.weights: total mass must be positive "
                            "and finite, got " + std::to_string(mass));
    for (double& w : raw) w /= mass;
    return DensityState(grid, std::move(raw), t);
  }

  static constexpr double kMassTol = 1e-10;

  const StrategyGrid& grid() const { return grid_; }
  std::span<const double> weights() const { return weights_; }
  double t() const { return t_; }

 private:
  StrategyGrid grid_;
  std::vector<double> weights_;
  double t_;
};

// Population share keeping truce: the propensity mean under the density.
inline double mean_cooperation(const DensityState& d) {
  const auto p = node_propensities(d.grid());
  std::vector<double> pf(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) pf[i] = p[i] * d.weights()[i];
  return integrate(d.grid(), pf);
}

// Variance of the truce propensity under the density. This is the quantity
// that sets the speed of selection on the mean.
inline double propensity_variance(const DensityState& d) {
  const auto p = node_propensities(d.grid());
  std::vector<double> buf(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) buf[i] = p[i] * d.weights()[i];
  const double m1 = integrate(d.grid(), buf);
  for (std::size_t i = 0; i < p.size(); ++i) buf[i] = p[i] * p[i] * d.weights()[i];
  const double m2 = integrate(d.grid(), buf);
  return std::max(0.0, m2 - m1 * m1);
}

// Gaussian initial density, normalized on the grid.
inline DensityState make_gaussian(const StrategyGrid& grid, double mean,
                                  double sigma, double t = 0.0) {
  detail::require_finite(mean, "density.mean");
  detail::require_finite(sigma, "density.sigma");
  if (!(sigma > 0.0))
    throw ValidationError("density.sigma: must be > 0, got " +
                          std::to_string(sigma));
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double z = (grid.node(i) - mean) / sigma;
    w[i] = std::exp(-0.5 * z * z);
  }
  return DensityState::normalized(grid, std::move(w), t);
}

// Peak placement for the two-point preset. At theta = +-12 the propensities
// are within 7e-6 of 1 and 0, so the mixture is a faithful stand-in for a
// population of pure truce keepers and pure attackers.
inline constexpr double kTwoPointTheta = 12.0;

// Mixture of two narrow peaks at +-kTwoPointTheta whose weights are chosen
// so the initial mean cooperation equals pbar0 exactly (in quadrature).
inline DensityState make_two_point(const StrategyGrid& grid, double pbar0,
                                   double sigma = 0.1, double t = 0.0) {
  detail::require_fraction(pbar0, "p0");
  if (!(grid.theta_min() <= -kTwoPointTheta &&
        grid.theta_max() >= kTwoPointTheta))
    throw ValidationError(
        "grid.theta_max: the two-point preset needs the grid to cover "
        "[-12, 12], got [" + std::to_string(grid.theta_min()) + ", " +
        std::to_string(grid.theta_max()) + "]");
  const DensityState hi = make_gaussian(grid, kTwoPointTheta, sigma, t);
  const DensityState lo = make_gaussian(grid, -kTwoPointTheta, sigma, t);
  const double m_hi = mean_cooperation(hi);
  const double m_lo = mean_cooperation(lo);
  const double w = (pbar0 - m_lo) / (m_hi - m_lo);
  if (!(w >= 0.0 && w <= 1.0))
    throw ValidationError("p0: " + std::to_string(pbar0) +
                          " is outside the reachable range [" +
                          std::to_string(m_lo) + ", " + std::to_string(m_hi) +
                          "] of the two-point preset");
  std::vector<double> mix(grid.size());
  for (std::size_t i = 0; i < mix.size(); ++i)
    mix[i] = w * hi.weights()[i] + (1.0 - w) * lo.weights()[i];
  return DensityState(grid, std::move(mix), t);
}

}  // namespace trucedyn
