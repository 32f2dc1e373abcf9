#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>

#include "oracles.hpp"
#include "trucedyn/game.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace trucedyn;

TEST_CASE("propensity maps dispositions to truce probabilities") {
  CHECK(propensity(StrategyParam(0.0)) == 0.5);
  CHECK_THAT(propensity(StrategyParam(std::log(3.0))), WithinAbs(0.75, 1e-15));
  CHECK_THAT(propensity(StrategyParam(-std::log(3.0))), WithinAbs(0.25, 1e-15));

  SECTION("saturates cleanly at extreme dispositions") {
    CHECK(propensity(StrategyParam(1e308)) == 1.0);
    CHECK(propensity(StrategyParam(-1e308)) >= 0.0);
    CHECK(propensity(StrategyParam(-1e308)) < 1e-300);
    CHECK(std::isfinite(propensity(StrategyParam(709.0))));
    CHECK(std::isfinite(propensity(StrategyParam(-709.0))));
  }

  SECTION("strictly increasing and interior on the working range") {
    double prev = propensity(StrategyParam(-30.0));
    for (int i = 1; i <= 600; ++i) {
      const double theta = -30.0 + i * 0.1;
      const double p = propensity(StrategyParam(theta));
      CHECK(p > prev);
      CHECK(p > 0.0);
      CHECK(p < 1.0);
      prev = p;
    }
  }

  SECTION("symmetry p(theta) + p(-theta) = 1") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-37.0, 37.0);
    for (int i = 0; i < 1000; ++i) {
      const double theta = u(rng);
      CHECK_THAT(propensity(StrategyParam(theta)) +
                     propensity(StrategyParam(-theta)),
                 WithinAbs(1.0, 1e-15));
    }
  }

  SECTION("rejects non-finite dispositions") {
    CHECK_THROWS_AS(StrategyParam(std::nan("")), ValidationError);
    CHECK_THROWS_AS(StrategyParam(INFINITY), ValidationError);
  }
}

TEST_CASE("payoff matrix enforces the coordination ordering") {
  CHECK_THROWS_AS(PayoffMatrix(1.0, 3.0, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(PayoffMatrix(3.0, 3.0, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(PayoffMatrix(3.0, 1.0, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(PayoffMatrix(3.0, 1.0, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(PayoffMatrix(std::nan(""), 1.0, 0.0, 1.0), ValidationError);
  CHECK_THROWS_WITH(PayoffMatrix(1.0, 3.0, 0.0, 1.0),
                    ContainsSubstring("payoffs.R"));
  CHECK_THROWS_WITH(PayoffMatrix(3.0, 1.0, 1.0, 0.0),
                    ContainsSubstring("payoffs.P"));

  const PayoffMatrix m(3.0, 1.0, 0.0, 1.0);
  CHECK(m.R() == 3.0);
  CHECK(m.V() == 1.0);
  CHECK(m.S() == 0.0);
  CHECK(m.P() == 1.0);
  CHECK(m.benefit_slope() == 3.0);
  CHECK(m.threshold() == 2.0);

  SECTION("slope and threshold stay positive over random draws") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
      const PayoffMatrix d = oracle::random_payoffs(rng);
      CHECK(d.benefit_slope() > 0.0);
      CHECK(d.threshold() > 0.0);
      CHECK_THAT(d.benefit_slope(),
                 WithinAbs(d.threshold() + (d.P() - d.S()), 1e-12));
    }
  }
}

TEST_CASE("enforcement and strategy parameters validate their ranges") {
  CHECK(EnforcementLevel(0.0).value() == 0.0);
  CHECK(EnforcementLevel(2.5).value() == 2.5);
  CHECK_THROWS_AS(EnforcementLevel(-0.1), ValidationError);
  CHECK_THROWS_AS(EnforcementLevel(std::nan("")), ValidationError);
  CHECK_THROWS_WITH(EnforcementLevel(-1.0), ContainsSubstring("e:"));
  CHECK(StrategyParam(-3.25).value() == -3.25);
}

TEST_CASE("attack payoff interpolates mutual attack toward temptation") {
  const PayoffMatrix m(3.0, 1.0, 0.0, 1.0);
  CHECK(attack_payoff(0.0, m) == m.P());
  CHECK(attack_payoff(1.0, m) == m.V());
  CHECK(attack_payoff(0.5, m) == 1.0);

  const PayoffMatrix skew(4.0, 1.0, -1.0, 2.0);
  CHECK_THAT(attack_payoff(0.25, skew), WithinAbs(1.75, 1e-15));

  CHECK_THROWS_AS(attack_payoff(-0.1, m), ValidationError);
  CHECK_THROWS_AS(attack_payoff(1.1, m), ValidationError);
  CHECK_THROWS_AS(attack_payoff(std::nan(""), m), ValidationError);
}

TEST_CASE("truce benefit is affine with slope Delta and the expected root") {
  const PayoffMatrix m(3.0, 1.0, 0.0, 1.0);
  const EnforcementLevel none(0.0);
  CHECK(truce_benefit(1.0, none, m) == 2.0);
  CHECK(truce_benefit(0.0, none, m) == -1.0);
  CHECK_THAT(truce_benefit(1.0 / 3.0, none, m), WithinAbs(0.0, 1e-15));

  SECTION("enforcement shifts the benefit down uniformly") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> up(0.0, 1.0), ue(0.0, 3.0);
    for (int i = 0; i < 500; ++i) {
      const PayoffMatrix d = oracle::random_payoffs(rng);
      const double p = up(rng), e = ue(rng);
      CHECK_THAT(truce_benefit(p, EnforcementLevel(e), d),
                 WithinAbs(truce_benefit(p, EnforcementLevel(0.0), d) - e,
                           1e-12));
    }
  }

  SECTION("slope between any two shares equals benefit_slope") {
    const PayoffMatrix d(4.5, 2.0, -3.0, 0.5);
    const double b0 = truce_benefit(0.2, EnforcementLevel(1.0), d);
    const double b1 = truce_benefit(0.9, EnforcementLevel(1.0), d);
    CHECK_THAT((b1 - b0) / 0.7, WithinRel(d.benefit_slope(), 1e-12));
  }
}

TEST_CASE("expected payoff is the attacker baseline plus weighted benefit") {
  const PayoffMatrix m(3.0, 1.0, 0.0, 1.0);
  CHECK_THAT(expected_payoff(StrategyParam(0.0), 0.5, EnforcementLevel(0.5), m),
             WithinAbs(1.0, 1e-15));
  // at theta = 50 the propensity has saturated to 1 in double precision
  CHECK(expected_payoff(StrategyParam(50.0), 1.0, EnforcementLevel(0.0), m) ==
        m.R());
  CHECK_THAT(expected_payoff(StrategyParam(-50.0), 0.7, EnforcementLevel(1.0), m),
             WithinAbs(attack_payoff(0.7, m), 1e-12));

  SECTION("decomposition identity on random draws") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> up(0.0, 1.0), ue(0.0, 3.0),
        ut(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
      const PayoffMatrix d = oracle::random_payoffs(rng);
      const double p = up(rng), e = ue(rng), theta = ut(rng);
      const double lhs =
          expected_payoff(StrategyParam(theta), p, EnforcementLevel(e), d);
      const double prop = oracle::logistic(theta);
      const double base = p * d.V() + (1.0 - p) * d.P();
      const double benefit =
          p * (d.R() - d.V()) + (1.0 - p) * (d.S() - d.P()) - e;
      CHECK(oracle::close(lhs, base + prop * benefit, 1e-12, 1e-12));
    }
  }

  SECTION("monotone in disposition with the sign of the benefit") {
    const EnforcementLevel e(1.0);
    const double benefit_high = truce_benefit(0.9, e, m);   // positive
    const double benefit_low = truce_benefit(0.1, e, m);    // negative
    REQUIRE(benefit_high > 0.0);
    REQUIRE(benefit_low < 0.0);
    CHECK(expected_payoff(StrategyParam(2.0), 0.9, e, m) >
          expected_payoff(StrategyParam(-2.0), 0.9, e, m));
    CHECK(expected_payoff(StrategyParam(2.0), 0.1, e, m) <
          expected_payoff(StrategyParam(-2.0), 0.1, e, m));
  }
}
