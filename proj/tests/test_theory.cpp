#include <cmath>

#include "doctest.h"
#include "qcsma/error.hpp"
#include "qcsma/theory.hpp"

using namespace qcsma;

namespace {

// c − ρ_U = 1 with γ_U = 1.
NetworkSpec drain_one(int sizeU, double r) {
  NetworkSpec s;
  s.sizeU = sizeU;
  s.sizeV = 2;
  s.gammaU = 1.0;
  s.gammaV = 1.0;
  s.lambdaU = 1.0;
  s.lambdaV = 1.0;
  s.mu = 1.0;
  s.c = 2.0;
  s.r = r;
  s.delta = 0.05;
  return s;
}

}  // namespace

TEST_CASE("frozen asymptotic mean") {
  NetworkSpec s = drain_one(2, 1000.0);
  CHECK(mean_tau_frozen_asymptotic(s, 10.0) == doctest::Approx(5.0));
  s.sizeU = 1;
  CHECK(mean_tau_frozen_asymptotic(s, 7.0) == doctest::Approx(1.0));
  s.sizeU = 3;
  CHECK(mean_tau_frozen_asymptotic(s, 100.0) == doctest::Approx(10000.0 / 3.0));
}

TEST_CASE("nu") {
  const NetworkSpec s = drain_one(2, 1000.0);
  const RateFunction g = PowerLaw{1.0, 1.0};
  CHECK(nu(s, g, 0.0) == doctest::Approx(2.0 / 1000.0));
  CHECK(nu(s, g, 500.0) == doctest::Approx(2.0 / 500.0));
  CHECK_THROWS_AS(nu(s, g, 1000.0), Error);
  const NetworkSpec one = drain_one(1, 1000.0);
  CHECK(nu(one, g, 0.0) == 1.0);
  CHECK(nu(one, g, 700.0) == 1.0);
}

TEST_CASE("numeric critical scale") {
  CHECK(solve_Mc_numeric(drain_one(2, 1e6), PowerLaw{1.0, 1.0}) == doctest::Approx(1e6 / 3.0).epsilon(0.01));
  CHECK(solve_Mc_numeric(drain_one(1, 1e6), PowerLaw{1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(solve_Mc_numeric(drain_one(2, 1e8), PowerLaw{1.0, 0.5}) == doctest::Approx(0.5 * 1e4).epsilon(0.02));
}

TEST_CASE("closed form regimes") {
  const auto sub = closed_form_Mc(drain_one(3, 1e6), PowerLaw{2.0, 0.25});
  CHECK(sub.regime == Regime::Subcritical);
  CHECK(sub.Fc == doctest::Approx(4.0 / 3.0));
  CHECK(sub.exponent == doctest::Approx(0.5));
  CHECK(sub.Mc == doctest::Approx(4.0 / 3.0 * 1e3));
  CHECK_FALSE(sub.C);

  const auto crit = closed_form_Mc(drain_one(2, 1e6), PowerLaw{1.0, 1.0});
  CHECK(crit.regime == Regime::Critical);
  CHECK(crit.Fc == doctest::Approx(1.0 / 3.0));
  REQUIRE(crit.C);
  CHECK(*crit.C == doctest::Approx(1.0 / 3.0));
  CHECK(crit.exponent == 1.0);

  NetworkSpec s = drain_one(2, 1e6);
  s.c = 3.0;  // α = 1/2
  const auto sup = closed_form_Mc(s, PowerLaw{1.0, 2.0});
  CHECK(sup.regime == Regime::Supercritical);
  CHECK(sup.Fc == doctest::Approx(0.5));
  CHECK(sup.exponent == 1.0);
  CHECK(sup.Mc_window);

  CHECK_THROWS_AS(closed_form_Mc(s, Tabulated{{{0, 0}, {1e7, 1e7}}}), Error);
  try {
    closed_form_Mc(s, Tabulated{{{0, 0}, {1e7, 1e7}}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedRateKind);
  }
}

TEST_CASE("slowly varying modulation is detected") {
  const auto th = closed_form_Mc(drain_one(2, 1e6), SlowlyVaryingOnly{LogPower{1.0}});
  CHECK(th.regime == Regime::SlowlyVarying);
}

TEST_CASE("limit law examples") {
  TheoryReport crit;
  crit.regime = Regime::Critical;
  crit.C = 0.5;
  CHECK(limit_law_P(crit, 0.0) == 1.0);
  CHECK(limit_law_P(crit, 1.0) == doctest::Approx(0.5));
  CHECK(limit_law_P(crit, 2.0) == 0.0);
  TheoryReport sup;
  sup.regime = Regime::Supercritical;
  sup.C = 1.0;
  CHECK(limit_law_P(sup, 0.0) == 1.0);
  CHECK(limit_law_P(sup, std::nextafter(1.0, 0.0)) == 1.0);
  CHECK(limit_law_P(sup, 1.0) == 0.0);
  CHECK(limit_law_P(sup, 1.5) == 0.0);
  TheoryReport sub;
  CHECK(limit_law_P(sub, 2.0) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("numeric survival integral") {
  const NetworkSpec one = drain_one(1, 1e6);
  CHECK(survival_external_numeric(one, PowerLaw{1.0, 1.0}, 1.0, 0.0) == 1.0);
  CHECK(survival_external_numeric(one, PowerLaw{1.0, 1.0}, 1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));

  const NetworkSpec s = drain_one(2, 1e6);
  const auto th = closed_form_Mc(s, PowerLaw{1.0, 1.0});
  CHECK(std::fabs(survival_external_numeric(s, PowerLaw{1.0, 1.0}, th.Mc, 1.0) - 4.0 / 9.0) <= 1e-2);
  // The critical law vanishes at 1/C, where the drift reaches zero.
  CHECK(survival_external_numeric(s, PowerLaw{1.0, 1.0}, th.Mc, 1.0 / *th.C) == 0.0);
  CHECK(limit_law_P(th, 1.0 / *th.C) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("numeric and closed form agree at r = 1e6") {
  for (double beta : {0.4, 1.0, 2.0}) {
    NetworkSpec s = drain_one(2, 1e6);
    s.lambdaU = 0.5;
    const RateFunction g = PowerLaw{1.0, beta};
    const auto th = closed_form_Mc(s, g);
    CHECK(std::fabs(solve_Mc_numeric(s, g) - th.Mc) / th.Mc <= 0.02);
  }
}

TEST_CASE("frozen chain oracle") {
  CHECK(exact_mean_hitting_time(FrozenChain(1, 1, 1.0, 1.0)) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(exact_mean_hitting_time(FrozenChain(1, 1, 0.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(exact_mean_hitting_time(FrozenChain(2, 1, 100.0, 1e6)) == doctest::Approx(50.0).epsilon(0.1));
  const double ratio = exact_mean_hitting_time(FrozenChain(2, 2, 1e3, 1e9)) /
                       mean_tau_frozen_asymptotic(drain_one(2, 1e3), 1e3);
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
  // |U| = 2: E = (r_U + 3)/2 once r_V is effectively infinite.
  CHECK(exact_mean_hitting_time(FrozenChain(2, 2, 10.0, 1e12)) == doctest::Approx(6.5).epsilon(1e-6));
  CHECK_THROWS_AS(exact_mean_hitting_time(FrozenChain(1, 1, 1.0, 0.0)), Error);
}

TEST_CASE("frozen chain layout") {
  const FrozenChain ch(2, 3, 1.5, 2.0);
  CHECK(ch.states() == 1 + 3 + 7);
  const auto& q = ch.generator();
  for (int i = 0; i < ch.states(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < ch.states(); ++j) sum += q[static_cast<std::size_t>(i) * ch.states() + j];
    CHECK(sum == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(ch.rate(0, ch.index_u(1u)) == 1.5);
  CHECK(ch.rate(0, ch.index_v(4u)) == 2.0);
  CHECK(ch.rate(ch.state_u(), ch.index_u(2u)) == 1.0);
}
