#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "trucedyn/density.hpp"
#include "trucedyn/dynamics.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace trucedyn;

namespace {
const PayoffMatrix kDefault(3.0, 1.0, 0.0, 1.0);
}

TEST_CASE("strategy grid nodes, spacing and validation") {
  const StrategyGrid g(-8.0, 8.0, 401);
  CHECK(g.size() == 401);
  CHECK(g.node(0) == -8.0);
  CHECK(g.node(400) == 8.0);
  CHECK_THAT(g.spacing(), WithinAbs(0.04, 1e-15));
  CHECK_THAT(g.node(200), WithinAbs(0.0, 1e-13));
  CHECK(StrategyGrid::standard() == g);

  CHECK_THROWS_AS(StrategyGrid(1.0, 1.0, 11), ValidationError);
  CHECK_THROWS_AS(StrategyGrid(2.0, -2.0, 11), ValidationError);
  CHECK_THROWS_AS(StrategyGrid(-8.0, 8.0, 2), ValidationError);
  CHECK_THROWS_WITH(StrategyGrid(-8.0, 8.0, 1), ContainsSubstring("grid.n"));
  CHECK_THROWS_WITH(StrategyGrid(3.0, 2.0, 11),
                    ContainsSubstring("grid.theta_min"));
}

TEST_CASE("trapezoid quadrature integrates exactly what it should") {
  const StrategyGrid g(-8.0, 8.0, 401);
  std::vector<double> ones(g.size(), 1.0);
  CHECK_THAT(integrate(g, ones), WithinAbs(16.0, 1e-12));

  std::vector<double> linear(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) linear[i] = 2.0 * g.node(i) + 3.0;
  CHECK_THAT(integrate(g, linear), WithinAbs(48.0, 1e-12));

  std::vector<double> wrong(g.size() - 1, 1.0);
  CHECK_THROWS_AS(integrate(g, wrong), ValidationError);
}

TEST_CASE("density state invariants") {
  const StrategyGrid g(-8.0, 8.0, 401);

  std::vector<double> uniform(g.size(), 1.0 / 16.0);
  const DensityState d(g, uniform);
  CHECK(d.t() == 0.0);
  CHECK(d.weights().size() == g.size());

  std::vector<double> negative(g.size(), 1.0 / 16.0);
  negative[5] = -1e-3;
  CHECK_THROWS_WITH(DensityState(g, negative),
                    ContainsSubstring("density.weights"));

  std::vector<double> offmass(g.size(), 1.0 / 15.0);
  CHECK_THROWS_AS(DensityState(g, offmass), ValidationError);

  std::vector<double> raw(g.size(), 0.37);
  const DensityState n = DensityState::normalized(g, raw);
  std::vector<double> w(n.weights().begin(), n.weights().end());
  CHECK_THAT(integrate(g, w), WithinAbs(1.0, 1e-14));

  std::vector<double> zero(g.size(), 0.0);
  CHECK_THROWS_AS(DensityState::normalized(g, zero), ValidationError);
}

TEST_CASE("mean cooperation of reference densities") {
  SECTION("frozen high-resolution value for an offset Gaussian") {
    const StrategyGrid g(-10.0, 10.0, 2001);
    const double got = mean_cooperation(make_gaussian(g, 1.0, 1.0));
    CHECK_THAT(got, WithinAbs(0.69673467014368384, 1e-12));
    const auto ref = oracle::gaussian_propensity_moments(1.0, 1.0, -10.0, 10.0,
                                                         400001);
    CHECK_THAT(ref.mean, WithinAbs(0.69673467014368384, 1e-13));
  }

  SECTION("symmetric Gaussian sits at one half") {
    const StrategyGrid g = StrategyGrid::standard();
    CHECK_THAT(mean_cooperation(make_gaussian(g, 0.0, 1.0)),
               WithinAbs(0.5, 1e-6));
  }

  SECTION("mass concentrated at theta = 12 cooperates almost surely") {
    const StrategyGrid g(-14.0, 14.0, 2801);
    CHECK_THAT(mean_cooperation(make_gaussian(g, 12.0, 0.05)),
               WithinAbs(1.0, 1e-4));
  }
}

TEST_CASE("propensity variance of reference densities") {
  const StrategyGrid g = StrategyGrid::standard();

  SECTION("frozen value for the standard Gaussian") {
    const double got = propensity_variance(make_gaussian(g, 0.0, 1.0));
    CHECK_THAT(got, WithinAbs(0.043379035858092718, 1e-12));
    CHECK(got < 0.25);
    const auto ref =
        oracle::gaussian_propensity_moments(0.0, 1.0, -8.0, 8.0, 400001);
    CHECK_THAT(ref.var, WithinAbs(0.043379035858092718, 1e-12));
  }

  SECTION("a narrow bump's variance follows the delta-method limit") {
    // Var[p] for a tight bump at theta is ~ (p'(theta) sigma)^2
    const double p1 = propensity(StrategyParam(1.0));
    const double slope = p1 * (1.0 - p1);
    const double expect = slope * slope * 0.05 * 0.05;
    CHECK_THAT(propensity_variance(make_gaussian(g, 1.0, 0.05)),
               WithinRel(expect, 0.05));
  }

  SECTION("a balanced two-point mixture approaches the Bernoulli maximum") {
    const StrategyGrid wide(-14.0, 14.0, 1401);
    CHECK_THAT(propensity_variance(make_two_point(wide, 0.5)),
               WithinAbs(0.25, 1e-4));
  }

  SECTION("never exceeds the Bernoulli bound on random mixtures") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 300; ++i) {
      const DensityState d = oracle::random_mixture(rng, g);
      const double pbar = mean_cooperation(d);
      const double var = propensity_variance(d);
      CHECK(var >= 0.0);
      CHECK(var <= pbar * (1.0 - pbar) + 1e-12);
    }
  }
}

TEST_CASE("gaussian preset validation") {
  const StrategyGrid g = StrategyGrid::standard();
  CHECK_THROWS_WITH(make_gaussian(g, 0.0, 0.0),
                    ContainsSubstring("density.sigma"));
  CHECK_THROWS_AS(make_gaussian(g, 0.0, -1.0), ValidationError);
  CHECK_THROWS_AS(make_gaussian(g, std::nan(""), 1.0), ValidationError);
  // a bump far outside the grid has no representable mass
  CHECK_THROWS_AS(make_gaussian(g, 500.0, 0.5), ValidationError);
}

TEST_CASE("two-point preset hits the requested initial mean exactly") {
  const StrategyGrid wide(-14.0, 14.0, 1401);
  for (double pbar0 : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const DensityState d = make_two_point(wide, pbar0);
    CHECK_THAT(mean_cooperation(d), WithinAbs(pbar0, 1e-12));
  }
  CHECK_THROWS_WITH(make_two_point(StrategyGrid::standard(), 0.5),
                    ContainsSubstring("grid.theta_max"));
  // exact 0 and 1 are unreachable: the peaks keep ~6e-6 of the other action
  CHECK_THROWS_WITH(make_two_point(wide, 0.0), ContainsSubstring("p0"));
  CHECK_THROWS_AS(make_two_point(wide, 1.0), ValidationError);
}

TEST_CASE("replicator step behavior") {
  const StrategyGrid g = StrategyGrid::standard();
  const DensityState d0 = make_gaussian(g, 0.0, 1.0);

  SECTION("a population indifferent on average does not move") {
    // symmetric density has pbar = 0.5; e = 0.5 zeroes the truce benefit
    const double pbar0 = mean_cooperation(d0);
    REQUIRE_THAT(truce_benefit(pbar0, EnforcementLevel(0.5), kDefault),
                 WithinAbs(0.0, 1e-9));
    const DensityState d1 =
        density_step(d0, EnforcementLevel(0.5), kDefault, 0.01);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK_THAT(d1.weights()[i], WithinAbs(d0.weights()[i], 1e-12));
  }

  SECTION("positive benefit pushes the mean up, negative pulls it down") {
    const DensityState up =
        density_step(d0, EnforcementLevel(0.0), kDefault, 0.01);
    CHECK(mean_cooperation(up) > mean_cooperation(d0));
    const DensityState down =
        density_step(d0, EnforcementLevel(2.0), kDefault, 0.01);
    CHECK(mean_cooperation(down) < mean_cooperation(d0));
  }

  SECTION("advances time by dt") {
    const DensityState d1 =
        density_step(d0, EnforcementLevel(0.0), kDefault, 0.01);
    CHECK_THAT(d1.t(), WithinAbs(0.01, 1e-15));
  }

  SECTION("rejects nonpositive dt and guards oversized steps") {
    CHECK_THROWS_AS(density_step(d0, EnforcementLevel(0.0), kDefault, 0.0),
                    ValidationError);
    CHECK_THROWS_AS(density_step(d0, EnforcementLevel(0.0), kDefault, -0.1),
                    ValidationError);
    const StrategyGrid wide(-14.0, 14.0, 1401);
    const DensityState sharp = make_two_point(wide, 0.9);
    CHECK_THROWS_AS(density_step(sharp, EnforcementLevel(3.0), kDefault, 1.0),
                    NumericError);
    CHECK_THROWS_WITH(density_step(sharp, EnforcementLevel(3.0), kDefault, 1.0),
                      ContainsSubstring("guard"));
  }

  SECTION("mass stays at one over many steps") {
    DensityState d = d0;
    for (int i = 0; i < 10000; ++i) {
      d = density_step(d, EnforcementLevel(0.0), kDefault, 0.01);
      if (i % 1000 == 999) {
        std::vector<double> w(d.weights().begin(), d.weights().end());
        CHECK_THAT(integrate(d.grid(), w), WithinAbs(1.0, 1e-8));
      }
    }
  }

  SECTION("per-step mean change equals benefit times variance") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> ue(0.0, 3.0);
    int tested = 0;
    for (int i = 0; i < 200; ++i) {
      const DensityState d = oracle::random_mixture(rng, g);
      const EnforcementLevel e(ue(rng));
      const double pbar = mean_cooperation(d);
      const double expected =
          truce_benefit(pbar, e, kDefault) * propensity_variance(d);
      if (std::abs(expected) < 1e-6) continue;
      const double dt = 0.01;
      const DensityState next = density_step(d, e, kDefault, dt);
      const double got = (mean_cooperation(next) - pbar) / dt;
      CHECK_THAT(got, WithinRel(expected, 1e-7));
      ++tested;
    }
    CHECK(tested >= 100);
  }
}

TEST_CASE("density simulation trajectories") {
  const StrategyGrid wide(-14.0, 14.0, 1401);

  SECTION("over-threshold enforcement collapses cooperation monotonically") {
    const DensityState d0 = make_two_point(wide, 0.9);
    const Trajectory traj =
        simulate_density(d0, EnforcementLevel(3.0), kDefault, 50.0, 0.01);
    CHECK(traj.kind() == Trajectory::Kind::Density);
    double prev = 1.0;
    for (const auto& s : traj.samples()) {
      CHECK(s.pbar <= prev + 1e-12);
      CHECK(std::isfinite(s.var_p));
      CHECK(std::isfinite(s.mean_payoff));
      prev = s.pbar;
    }
    CHECK(traj.final_pbar() < 1e-2);
  }

  SECTION("without enforcement a cooperating majority locks in truce") {
    const DensityState d0 = make_two_point(wide, 0.9);
    const Trajectory traj =
        simulate_density(d0, EnforcementLevel(0.0), kDefault, 100.0, 0.01);
    CHECK(traj.final_pbar() > 1.0 - 1e-3);
  }

  SECTION("sampling stride bounds the number of rows") {
    const DensityState d0 = make_gaussian(wide, 0.0, 1.0);
    const Trajectory traj =
        simulate_density(d0, EnforcementLevel(0.0), kDefault, 200.0, 0.01);
    CHECK(traj.samples().size() == 2001);
    CHECK(traj.samples().front().t == 0.0);
    CHECK_THAT(traj.back().t, WithinAbs(200.0, 1e-9));
    double prev = -1.0;
    for (const auto& s : traj.samples()) {
      CHECK(s.t > prev);
      prev = s.t;
    }
  }

  SECTION("explicit sample interval is honored") {
    const DensityState d0 = make_gaussian(wide, 0.0, 1.0);
    const Trajectory traj =
        simulate_density(d0, EnforcementLevel(0.0), kDefault, 1.0, 0.01, 0.1);
    CHECK(traj.samples().size() == 11);
  }

  SECTION("invalid horizons are rejected") {
    const DensityState d0 = make_gaussian(wide, 0.0, 1.0);
    CHECK_THROWS_WITH(
        simulate_density(d0, EnforcementLevel(0.0), kDefault, 0.0, 0.01),
        ContainsSubstring("t_end"));
  }
}

TEST_CASE("aggregate velocity field") {
  CHECK(aggregate_velocity(0.0, EnforcementLevel(1.0), kDefault) == 0.0);
  CHECK(aggregate_velocity(1.0, EnforcementLevel(1.0), kDefault) == 0.0);
  CHECK_THAT(aggregate_velocity(0.5, EnforcementLevel(0.0), kDefault),
             WithinAbs(0.125, 1e-15));
  CHECK_THAT(aggregate_velocity(0.5, EnforcementLevel(0.5), kDefault),
             WithinAbs(0.0, 1e-15));
  CHECK_THROWS_AS(aggregate_velocity(-0.01, EnforcementLevel(0.0), kDefault),
                  ValidationError);
  CHECK_THROWS_AS(aggregate_velocity(1.01, EnforcementLevel(0.0), kDefault),
                  ValidationError);

  SECTION("equals benefit times pbar(1 - pbar) on random draws") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> up(0.0, 1.0), ue(0.0, 3.0);
    for (int i = 0; i < 500; ++i) {
      const PayoffMatrix m = oracle::random_payoffs(rng);
      const double p = up(rng);
      const EnforcementLevel e(ue(rng));
      const double lhs = aggregate_velocity(p, e, m);
      const double rhs = p * (1.0 - p) * truce_benefit(p, e, m);
      CHECK(oracle::close(lhs, rhs, 1e-12, 1e-15));
      CHECK(oracle::close(
          lhs, oracle::drift(p, e.value(), m.R(), m.V(), m.S(), m.P()),
          1e-12, 1e-15));
    }
  }
}

TEST_CASE("aggregate simulation") {
  SECTION("fixed points stay put") {
    for (double p0 : {0.0, 1.0}) {
      const Trajectory traj =
          simulate_aggregate(p0, EnforcementLevel(0.5), kDefault, 10.0, 0.01);
      for (const auto& s : traj.samples()) CHECK(s.pbar == p0);
    }
  }

  SECTION("default run from 0.9 reaches full truce") {
    const Trajectory traj =
        simulate_aggregate(0.9, EnforcementLevel(0.0), kDefault, 200.0, 0.01);
    CHECK(traj.kind() == Trajectory::Kind::Aggregate);
    CHECK(traj.samples().size() == 2001);
    CHECK_THAT(traj.final_pbar(), WithinAbs(1.0, 1e-6));
  }

  SECTION("basin split around the interior point at e = 0") {
    CHECK_THAT(
        simulate_aggregate(0.34, EnforcementLevel(0.0), kDefault, 200.0, 0.01)
            .final_pbar(),
        WithinAbs(1.0, 1e-6));
    CHECK_THAT(
        simulate_aggregate(0.32, EnforcementLevel(0.0), kDefault, 200.0, 0.01)
            .final_pbar(),
        WithinAbs(0.0, 1e-6));
  }

  SECTION("halving dt cuts the endpoint error about sixteenfold") {
    const EnforcementLevel e(0.0);
    const double ref =
        simulate_aggregate(0.4, e, kDefault, 5.0, 1e-5).final_pbar();
    const double err1 = std::abs(
        simulate_aggregate(0.4, e, kDefault, 5.0, 0.05).final_pbar() - ref);
    const double err2 = std::abs(
        simulate_aggregate(0.4, e, kDefault, 5.0, 0.025).final_pbar() - ref);
    REQUIRE(err2 > 0.0);
    const double ratio = err1 / err2;
    CHECK(ratio > 10.0);
    CHECK(ratio < 25.0);
  }

  SECTION("input validation") {
    CHECK_THROWS_AS(
        simulate_aggregate(1.5, EnforcementLevel(0.0), kDefault, 1.0, 0.01),
        ValidationError);
    CHECK_THROWS_WITH(
        simulate_aggregate(0.5, EnforcementLevel(0.0), kDefault, 1.0, 0.0),
        ContainsSubstring("dt"));
    CHECK_THROWS_AS(
        simulate_aggregate(0.5, EnforcementLevel(0.0), kDefault, -1.0, 0.01),
        ValidationError);
  }
}

TEST_CASE("two-point density tracks the aggregate reduction") {
  const StrategyGrid wide(-14.0, 14.0, 1401);
  for (double pbar0 : {0.9, 0.6}) {
    const Trajectory dense = simulate_density(
        make_two_point(wide, pbar0), EnforcementLevel(0.0), kDefault, 50.0,
        0.01);
    const Trajectory agg = simulate_aggregate(pbar0, EnforcementLevel(0.0),
                                              kDefault, 50.0, 0.01);
    REQUIRE(dense.samples().size() == agg.samples().size());
    double sup = 0.0;
    for (std::size_t i = 0; i < dense.samples().size(); ++i)
      sup = std::max(sup, std::abs(dense.samples()[i].pbar -
                                   agg.samples()[i].pbar));
    CHECK(sup <= 1e-2);
  }
}

TEST_CASE("trajectory bookkeeping") {
  Trajectory traj(Trajectory::Kind::Aggregate);
  CHECK(traj.empty());
  traj.append({0.0, 0.5});
  traj.append({0.1, 0.6});
  CHECK(traj.samples().size() == 2);
  CHECK(traj.final_pbar() == 0.6);
  CHECK_THROWS_AS(traj.append({0.1, 0.7}), ValidationError);
  CHECK_THROWS_AS(traj.append({0.05, 0.7}), ValidationError);
}

TEST_CASE("attractor labels") {
  CHECK(std::string(attractor_label(0.9996)) == "peace");
  CHECK(std::string(attractor_label(0.0004)) == "conflict");
  CHECK(std::string(attractor_label(0.5)) == "undecided");
  CHECK(std::string(attractor_label(0.99)) == "undecided");
}
