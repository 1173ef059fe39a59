#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "qcsma/error.hpp"
#include "qcsma/harness.hpp"
#include "qcsma/rng.hpp"

using namespace qcsma;

namespace {

NetworkSpec reference(double r) {
  NetworkSpec s;
  s.r = r;
  s.delta = 0.05;
  return s;
}

const RateFunction kGU = PowerLaw{1.0, 1.0};
const RateFunction kGV = PowerLaw{1.0, 2.0};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::ParseError;
}

std::vector<double> exp_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::exponential_distribution<double> d(1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(g);
  return v;
}

bool same_entries(const ReplicaBatch& a, const ReplicaBatch& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const auto& x = a.entries[i].report;
    const auto& y = b.entries[i].report;
    if (a.entries[i].index != b.entries[i].index || x.seed != y.seed || x.tau != y.tau || x.tau_bar != y.tau_bar ||
        x.good_behavior != y.good_behavior)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("a batch of one reproduces a direct run") {
  const NetworkSpec s = reference(500.0);
  const auto batch = run_replicas(s, ModelKind::internal(), kGU, kGV, 1, 9);
  const auto direct = simulate_run(s, ModelKind::internal(), kGU, kGV, replica_seed(9, 0));
  REQUIRE(batch.entries.size() == 1);
  CHECK(batch.entries[0].report.tau == direct.report.tau);
  CHECK(batch.entries[0].report.tau_bar == direct.report.tau_bar);
}

TEST_CASE("batches are reproducible and thread-count independent") {
  const NetworkSpec s = reference(300.0);
  const auto a = run_replicas(s, ModelKind::external(), kGU, kGV, 64, 3, {}, 1);
  const auto b = run_replicas(s, ModelKind::external(), kGU, kGV, 64, 3, {}, 4);
  const auto c = run_replicas(s, ModelKind::external(), kGU, kGV, 64, 3, {}, 1);
  CHECK(same_entries(a, b));
  CHECK(same_entries(a, c));
  CHECK_FALSE(same_entries(a, run_replicas(s, ModelKind::external(), kGU, kGV, 64, 4, {}, 1)));
}

TEST_CASE("merge is order independent") {
  const NetworkSpec s = reference(300.0);
  const auto a = run_replicas(s, ModelKind::internal(), kGU, kGV, 20, 1);
  const auto b = run_replicas(s, ModelKind::internal(), kGU, kGV, 20, 2);
  const auto ab = merge(a, b), ba = merge(b, a);
  CHECK(ab.entries.size() == 40);
  CHECK(same_entries(ab, ba));
}

TEST_CASE("longer horizons never censor more") {
  const NetworkSpec s = reference(400.0);
  std::uint64_t prev = 0;
  for (double m : {0.2, 0.5, 1.0, 3.0}) {
    SimOptions o;
    o.horizon_mult = m;
    const auto batch = run_replicas(s, ModelKind::internal(), kGU, kGV, 200, 6, o);
    CHECK(batch.uncensored() >= prev);
    prev = batch.uncensored();
  }
  CHECK(prev == 200);
}

TEST_CASE("mean estimates") {
  const std::vector<double> flat = {2.0, 2.0, 2.0};
  const auto m = estimate_mean(flat);
  CHECK(m.mean == 2.0);
  CHECK(m.se == 0.0);
  CHECK(m.ci_lo == 2.0);
  CHECK(m.ci_hi == 2.0);

  const auto e = estimate_mean(exp_sample(100000, 1), 25);
  CHECK(std::fabs(e.mean - 1.0) <= 0.01);
  CHECK(e.se == doctest::Approx(1.0 / std::sqrt(1e5)).epsilon(0.05));
  CHECK(e.censored_fraction == doctest::Approx(25.0 / 100025.0));

  CHECK(code_of([] { estimate_mean(std::vector<double>{}, 4); }) == ErrorCode::AllCensored);
  CHECK(code_of([] { estimate_mean(std::vector<double>{1.0}); }) == ErrorCode::TooFewSamples);
}

TEST_CASE("survival comparisons against the three limit laws") {
  TheoryReport sub;
  sub.regime = Regime::Subcritical;
  CHECK(survival_compare(exp_sample(20000, 2), sub).sup_distance <= 0.02);

  TheoryReport sup;
  sup.regime = Regime::Supercritical;
  sup.C = 1.0;
  CHECK(survival_compare(std::vector<double>(500, 3.0), sup).sup_distance == 0.0);

  TheoryReport crit;
  crit.regime = Regime::Critical;
  crit.C = 0.5;
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = u(g);
  const auto cmp = survival_compare(xs, crit);
  CHECK(cmp.sup_distance <= 0.02);
  CHECK(cmp.n == 20000);
  CHECK(std::is_sorted(cmp.sorted.begin(), cmp.sorted.end()));

  CHECK(code_of([&] { survival_compare(std::vector<double>(99, 1.0), sub); }) == ErrorCode::TooFewSamples);
}

TEST_CASE("empirical survival counts strict exceedances") {
  DistributionComparison d;
  d.sorted = {0.5, 1.0, 1.0, 2.0};
  CHECK(d.empirical_survival(0.0) == 1.0);
  CHECK(d.empirical_survival(1.0) == 0.25);
  CHECK(d.empirical_survival(2.0) == 0.0);
}

TEST_CASE("sup distance sees both sides of every jump") {
  const std::vector<double> pts = {1.0, 2.0};
  const double d = sup_distance_sorted(std::span<const double>(pts), [](double x) { return std::exp(-x); });
  // S_n is 1, then 1/2, then 0; the worst gap sits just before x = 1.
  CHECK(d == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(sup_distance_sorted(std::span<const double>(pts), [](double x) { return x < 1.0 ? 1.0 : x < 2.0 ? 0.5 : 0.0; }) ==
        doctest::Approx(0.0));
}

TEST_CASE("exponent fit recovers exact power laws") {
  for (double k : {0.5, 1.0, 2.0}) {
    std::vector<std::pair<double, double>> pts;
    for (double r : {100.0, 300.0, 1000.0, 3000.0}) pts.emplace_back(r, 7.0 * std::pow(r, k));
    const auto fit = exponent_fit(pts);
    CHECK(fit.slope == doctest::Approx(k).epsilon(1e-9));
    CHECK(std::exp(fit.intercept) == doctest::Approx(7.0).epsilon(1e-9));
    CHECK(fit.r2 == doctest::Approx(1.0));
  }
  const std::vector<std::pair<double, double>> narrow = {{100, 1}, {200, 2}, {300, 3}, {400, 4}};
  CHECK(code_of([&] { exponent_fit(narrow); }) == ErrorCode::DegenerateSpan);
  const std::vector<std::pair<double, double>> few = {{10, 1}, {1000, 2}, {1000, 3}, {10, 4}};
  CHECK(code_of([&] { exponent_fit(few); }) == ErrorCode::DegenerateSpan);
  const std::vector<std::pair<double, double>> bad = {{10, 1}, {100, 0}, {1000, 3}, {10000, 4}};
  CHECK(code_of([&] { exponent_fit(bad); }) == ErrorCode::DegenerateSpan);
}

TEST_CASE("quantiles interpolate linearly") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 0.5) == 3.0);
  CHECK(quantile_sorted(v, 0.75) == 4.0);
  CHECK(quantile_sorted(v, 0.625) == doctest::Approx(3.5));
  CHECK(quantile_sorted(v, 1.0) == 5.0);
}

TEST_CASE("one V node leaves no gap") {
  NetworkSpec s = reference(300.0);
  s.sizeV = 1;
  const auto g = gap_statistic(run_replicas(s, ModelKind::internal(), kGU, kGV, 200, 8), kGV, s);
  CHECK(g.n == 200);
  CHECK(g.raw_median == 0.0);
  CHECK(g.median == 0.0);
  CHECK(g.upper_quartile == 0.0);
}

TEST_CASE("parallel_for visits every index once and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 3, [&](std::uint64_t i) { ++hits[i]; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS(parallel_for(10, 2, [](std::uint64_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }));
}
