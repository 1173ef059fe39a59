#include <cmath>
#include <vector>

#include "doctest.h"
#include "qcsma/coupling.hpp"
#include "qcsma/harness.hpp"
#include "qcsma/rng.hpp"

using namespace qcsma;

namespace {

NetworkSpec reference(double r, double delta) {
  NetworkSpec s;
  s.r = r;
  s.delta = delta;
  return s;
}

const RateFunction kGU = PowerLaw{1.0, 1.0};
const RateFunction kGV = PowerLaw{1.0, 2.0};

}  // namespace

TEST_CASE("tick acceptance regions are nested") {
  const std::vector<double> p = {0.2, 0.5, 0.9, 1.0};
  const std::vector<bool> all(4, true);
  std::vector<bool> prev(4, true);
  for (double u = 0.0; u < 1.0; u += 0.01) {
    const auto fire = accept_tick(u, p, all);
    for (std::size_t k = 0; k < p.size(); ++k) {
      CHECK(fire[k] == (u < p[k]));
      if (fire[k]) CHECK(prev[k]);  // raising u never adds a copy
      if (k > 0 && fire[k - 1]) CHECK(fire[k]);
    }
    prev = fire;
  }
  CHECK(accept_tick(0.0, p, {false, true, true, true})[0] == false);
}

TEST_CASE("majorant covers both bound families") {
  const NetworkSpec s = reference(1000.0, 0.1);
  const Majorant h = majorant_for(s);
  CHECK(h(0.0) == doctest::Approx(1000.0 + 200.0 + 100.0));
  CHECK(h.kink() == doctest::Approx((1200.0 - 1100.0) / (0.5 + 0.5)));
  const Tube u = tube_for(s, Side::U), v = tube_for(s, Side::V);
  for (double t = 0.0; t <= 2000.0; t += 10.0) {
    CHECK(h(t) >= u.upper(t));
    CHECK(h(t) >= v.upper(t));
  }
}

TEST_CASE("delta = 0: lower, plain and upper external copies coincide") {
  const NetworkSpec s = reference(500.0, 0.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto r = run_coupled_system(s, kGU, kGV, seed,
                                      {ModelTag::LowerExternal, ModelTag::External, ModelTag::UpperExternal},
                                      {{0, 1}, {1, 0}, {2, 1}, {1, 2}});
    CHECK_FALSE(r.majorant_violated);
    REQUIRE(r.copies[1].tau);
    CHECK(r.copies[0].tau == r.copies[1].tau);
    CHECK(r.copies[2].tau == r.copies[1].tau);
    for (const auto& p : r.pairs) CHECK(p.violations == 0);
  }
}

TEST_CASE("coupled runs are deterministic in the seed") {
  const NetworkSpec s = reference(500.0, 0.05);
  const auto a = coupled_triple(s, kGU, kGV, 42);
  const auto b = coupled_triple(s, kGU, kGV, 42);
  CHECK(a.tau_low == b.tau_low);
  CHECK(a.tau_int == b.tau_int);
  CHECK(a.tau_upp == b.tau_upp);
  CHECK(a.tau_bar_iso == b.tau_bar_iso);
}

TEST_CASE("lower coupling: ordering and transition order") {
  const NetworkSpec s = reference(2000.0, 0.05);
  const double T_U = validate(s).T_U;
  int eligible = 0, ordered = 0, checked = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto run = coupled_run_low(s, kGU, kGV, replica_seed(77, seed));
    CHECK_FALSE(run.majorant_violated);
    if (run.good_int && run.tau_low && run.tau_int) {
      ++eligible;
      ordered += *run.tau_low <= *run.tau_int;
    }
    if (run.good_int && run.tau_low && *run.tau_low <= T_U) {
      ++checked;
      CHECK(run.violations_low == 0);
    }
  }
  REQUIRE(eligible > 900);
  CHECK(ordered >= 0.99 * eligible);
  CHECK(checked > 900);
}

TEST_CASE("upper coupling: pre-transition order") {
  const NetworkSpec s = reference(2000.0, 0.05);
  int n = 0, ordered = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto run = coupled_run_upp(s, kGU, kGV, replica_seed(78, seed));
    if (run.coupling_undefined || !run.good_iso) continue;
    ++n;
    ordered += run.tau_bar_upp && *run.tau_bar_iso <= *run.tau_bar_upp;
    CHECK(run.violations_upp == 0);
  }
  REQUIRE(n > 900);
  CHECK(ordered >= 0.99 * n);
}

TEST_CASE("internal pre-transition precedes the upper transition") {
  const NetworkSpec s = reference(2000.0, 0.05);
  int n = 0, ordered = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto run = coupled_triple(s, kGU, kGV, replica_seed(79, seed));
    if (!run.tau_bar_int) continue;
    ++n;
    ordered += !run.tau_upp || *run.tau_bar_int <= *run.tau_upp;
    if (run.tau_bar_iso && *run.tau_bar_iso <= validate(s).T_U) CHECK(run.tau_bar_iso == run.tau_bar_int);
  }
  REQUIRE(n > 450);
  CHECK(ordered >= 0.99 * n);
}

TEST_CASE("larger delta widens the lower/upper gap") {
  double prev = -HUGE_VAL;
  for (double delta : {0.02, 0.05, 0.1}) {
    const NetworkSpec s = reference(2000.0, delta);
    double low = 0.0, upp = 0.0;
    int n = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto run = coupled_triple(s, kGU, kGV, replica_seed(80, seed));
      if (!run.tau_low || !run.tau_upp) continue;
      low += *run.tau_low;
      upp += *run.tau_upp;
      ++n;
    }
    REQUIRE(n > 150);
    const double gap = (upp - low) / n;
    CHECK(gap > prev);
    prev = gap;
  }
}

TEST_CASE("coupling leaves the internal marginal unchanged") {
  const NetworkSpec s = reference(1000.0, 0.05);
  std::vector<double> coupled;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto run = coupled_run_low(s, kGU, kGV, replica_seed(81, seed));
    if (run.tau_int) coupled.push_back(*run.tau_int);
  }
  const auto a = estimate_mean(coupled);
  const auto b = estimate_mean(run_replicas(s, ModelKind::internal(), kGU, kGV, 1000, 82));
  CHECK(std::fabs(a.mean - b.mean) <= 3.0 * std::hypot(a.se, b.se));
}

TEST_CASE("zero margin lets queues escape the majorant") {
  const NetworkSpec s = reference(300.0, 0.0);
  int flagged = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto run = coupled_run_low(s, kGU, kGV, seed);
    if (!run.majorant_violated) continue;
    ++flagged;
    CHECK_FALSE(sandwich_holds(run, 1.0));
  }
  CHECK(flagged > 0);
}

TEST_CASE("sandwich statistics") {
  const NetworkSpec s = reference(1000.0, 0.05);
  const auto st = sandwich_stats(s, kGU, kGV, 200, 5);
  CHECK(st.n == 200);
  CHECK(st.runs.size() == 200);
  CHECK(st.gap == doctest::Approx(10.0 / 1e6));
  CHECK(st.probability >= 0.97);
  CHECK(st.ci.lo <= st.probability);
  CHECK(st.ci.hi >= st.probability);
  CHECK(st.violated_low_runs == 0);
  CHECK(st.violated_upp_runs == 0);
}

TEST_CASE("sandwich predicate") {
  CoupledRun run;
  run.has_low = run.has_upp = true;
  run.tau_low = 1.0;
  run.tau_int = 2.0;
  run.tau_upp = 1.95;
  run.horizon_upp = 10.0;
  CHECK(sandwich_holds(run, 0.1));
  CHECK_FALSE(sandwich_holds(run, 0.01));
  run.tau_upp.reset();
  CHECK(sandwich_holds(run, 0.0));
  run.tau_int = 11.0;
  CHECK_FALSE(sandwich_holds(run, 0.0));
  run.tau_int = 0.5;
  CHECK_FALSE(sandwich_holds(run, 0.0));
}

TEST_CASE("Wilson interval") {
  const auto a = wilson_interval(5, 10);
  CHECK(a.lo == doctest::Approx(0.2366).epsilon(1e-3));
  CHECK(a.hi == doctest::Approx(0.7634).epsilon(1e-3));
  const auto b = wilson_interval(0, 10);
  CHECK(b.lo == 0.0);
  CHECK(b.hi == doctest::Approx(0.2775).epsilon(1e-3));
  const auto c = wilson_interval(1000, 1000);
  CHECK(c.hi == 1.0);
  CHECK(c.lo == doctest::Approx(0.99617).epsilon(1e-4));
}
