#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "qcsma/coupling.hpp"
#include "qcsma/harness.hpp"
#include "qcsma/model.hpp"
#include "qcsma/theory.hpp"

using namespace qcsma;

namespace {

RateFunction smooth_rate(gen::Gen& g) {
  for (;;) {
    RateFunction f = g.rate();
    if (!std::holds_alternative<Tabulated>(f)) return f;
  }
}

double table_end(const RateFunction& f) {
  if (const auto* t = std::get_if<Tabulated>(&f)) return t->points.back().first;
  return 1e6;
}

}  // namespace

TEST_CASE("rate functions are non-decreasing and vanish below zero") {
  for (std::uint64_t k = 0; k < 200; ++k) {
    gen::Gen g(k);
    const RateFunction f = g.rate();
    CAPTURE(k);
    CHECK_NOTHROW(check_rate_function(f));
    CHECK(rate_eval(f, -1.0) == 0.0);
    const double end = table_end(f);
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double v = rate_eval(f, std::min(end, end * i / 200.0));
      CHECK(v >= prev - 1e-12 * std::max(1.0, prev));
      prev = v;
    }
  }
}

TEST_CASE("limit laws are non-increasing and right-continuous") {
  for (std::uint64_t k = 0; k < 100; ++k) {
    gen::Gen g(k);
    TheoryReport th;
    th.regime = static_cast<Regime>(g.integer(0, 2));
    if (th.regime == Regime::Critical) th.C = g.uniform(0.02, 0.98);
    if (th.regime == Regime::Supercritical) th.C = 1.0;
    CAPTURE(k);
    CHECK(limit_law_P(th, 0.0) == 1.0);
    double prev = 1.0;
    for (double x = 0.0; x < 12.0; x += 0.01) {
      const double p = limit_law_P(th, x);
      CHECK(p <= prev);
      CHECK(p >= 0.0);
      prev = p;
      const double y = g.uniform(0.0, 12.0);
      CHECK(std::fabs(limit_law_P(th, y + 1e-12) - limit_law_P(th, y)) <= 1e-9);
    }
  }
}

TEST_CASE("deterministic activation rates are ordered lower, external, upper") {
  for (std::uint64_t k = 0; k < 100; ++k) {
    gen::Gen g(k);
    const NetworkSpec s = g.spec();
    const RateFunction gU = smooth_rate(g), gV = smooth_rate(g);
    const double T_U = validate(s).T_U;
    CAPTURE(k);
    for (int i = 0; i < 20; ++i) {
      const double t = g.uniform(0.0, T_U);
      const double lu = activation_rate(ModelKind::lower(), Side::U, t, 0.0, s, gU, gV);
      const double eu = activation_rate(ModelKind::external(), Side::U, t, 0.0, s, gU, gV);
      const double uu = activation_rate(ModelKind::upper(), Side::U, t, 0.0, s, gU, gV);
      CHECK(lu <= eu);
      CHECK(eu <= uu);
      const double lv = activation_rate(ModelKind::lower(), Side::V, t, 0.0, s, gU, gV);
      const double ev = activation_rate(ModelKind::external(), Side::V, t, 0.0, s, gU, gV);
      const double uv = activation_rate(ModelKind::upper(), Side::V, t, 0.0, s, gU, gV);
      CHECK(lv >= ev);
      CHECK(ev >= uv);
    }
  }
}

TEST_CASE("K_delta increases in delta") {
  for (std::uint64_t k = 0; k < 200; ++k) {
    gen::Gen g(k);
    const double lambda = g.uniform(0.1, 5.0), mu = g.uniform(0.1, 5.0);
    const double d1 = g.uniform(0.001, 3.0), d2 = d1 + g.uniform(0.001, 3.0);
    CAPTURE(k);
    CHECK(k_delta(lambda, mu, d1) > 0.0);
    CHECK(k_delta(lambda, mu, d1) < k_delta(lambda, mu, d2));
  }
}

TEST_CASE("random internal paths keep their invariants") {
  SimOptions o;
  o.record_snapshots = true;
  for (std::uint64_t k = 0; k < 40; ++k) {
    gen::Gen g(k);
    const NetworkSpec s = g.spec();
    const RateFunction gU = smooth_rate(g), gV = smooth_rate(g);
    CAPTURE(k);
    const auto t = simulate_run(s, ModelKind::internal(), gU, gV, k, o);
    for (const auto& snap : t.snapshots) {
      bool anyU = false, anyV = false;
      for (int i = 0; i < s.nodes(); ++i) {
        CHECK(snap.queue[i] >= 0.0);
        if (snap.active[i]) (s.side_of(i) == Side::U ? anyU : anyV) = true;
      }
      CHECK_FALSE((anyU && anyV));
    }
    for (const auto& n : t.final_state.nodes) {
      CHECK(n.active_time + n.inactive_time == doctest::Approx(t.final_state.t));
      CHECK(n.drained <= n.input + s.gamma(n.side) * s.r + 1e-9 * (1.0 + n.input));
    }
    if (t.report.tau) {
      REQUIRE(t.report.tau_bar);
      CHECK(*t.report.tau_bar <= *t.report.tau);
    }
    const auto again = simulate_run(s, ModelKind::internal(), gU, gV, k, o);
    CHECK(again.report.tau == t.report.tau);
    CHECK(again.report.tau_bar == t.report.tau_bar);
    CHECK(again.snapshots.size() == t.snapshots.size());
  }
}

TEST_CASE("frozen chains match the exact hitting time") {
  for (std::uint64_t k = 0; k < 8; ++k) {
    gen::Gen g(100 + k);
    NetworkSpec s;
    s.sizeU = g.integer(1, 4);
    s.sizeV = g.integer(1, 4);
    s.r = 1e6;
    const double rU = g.uniform(0.2, 2.0), rV = g.uniform(0.2, 2.0);
    const double exact = exact_mean_hitting_time(FrozenChain(s.sizeU, s.sizeV, rU, rV));
    const auto m = estimate_mean(run_replicas(s, ModelKind::frozen_rates(rU, rV), PowerLaw{}, PowerLaw{}, 4000,
                                              replica_seed(55, k)));
    CAPTURE(k);
    CAPTURE(exact);
    CHECK(std::fabs(m.mean - exact) <= 3.0 * m.se);
  }
}

TEST_CASE("shared ticks accept nested copy sets") {
  for (std::uint64_t k = 0; k < 500; ++k) {
    gen::Gen g(k);
    const int n = g.integer(1, 5);
    std::vector<double> p(n);
    std::vector<bool> eligible(n);
    for (int i = 0; i < n; ++i) {
      p[i] = g.uniform(0.0, 1.0);
      eligible[i] = g.coin();
    }
    const double u1 = g.uniform(0.0, 1.0), u2 = g.uniform(0.0, u1);
    const auto a = accept_tick(u1, p, eligible), b = accept_tick(u2, p, eligible);
    for (int i = 0; i < n; ++i) {
      if (a[i]) CHECK(b[i]);
      for (int j = 0; j < n; ++j)
        if (a[i] && eligible[j] && p[j] >= p[i]) CHECK(a[j]);
    }
  }
}
