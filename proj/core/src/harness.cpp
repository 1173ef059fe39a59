#include "qcsma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

#include "qcsma/error.hpp"
#include "qcsma/rng.hpp"

namespace qcsma {

std::uint64_t ReplicaBatch::uncensored() const {
  std::uint64_t k = 0;
  for (const auto& e : entries) k += !e.error && !e.report.censored();
  return k;
}

std::vector<double> ReplicaBatch::taus() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries)
    if (!e.error && e.report.tau) out.push_back(*e.report.tau);
  return out;
}

void parallel_for(std::uint64_t n, unsigned threads, const std::function<void(std::uint64_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ReplicaBatch run_replicas(const NetworkSpec& spec, const ModelKind& model, const RateFunction& gU,
                          const RateFunction& gV, std::uint64_t n, std::uint64_t seedbase, const SimOptions& opts,
                          unsigned threads) {
  if (n < 1) throw Error(ErrorCode::InvalidSpec, "replica count must be at least 1");
  ReplicaBatch batch;
  batch.spec = spec;
  batch.model = model;
  batch.n = n;
  batch.base_seed = seedbase;
  batch.entries.resize(n);
  SimOptions run_opts = opts;
  run_opts.record_snapshots = false;
  run_opts.record_events = false;
  const auto start = std::chrono::steady_clock::now();
  parallel_for(n, threads, [&](std::uint64_t i) {
    ReplicaEntry& e = batch.entries[i];
    e.index = i;
    const std::uint64_t seed = replica_seed(seedbase, i);
    try {
      e.report = simulate_run(spec, model, gU, gV, seed, run_opts).report;
    } catch (const std::exception& ex) {
      e.report.seed = seed;
      e.report.model = model;
      e.error = ex.what();
    }
  });
  batch.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return batch;
}

ReplicaBatch merge(const ReplicaBatch& a, const ReplicaBatch& b) {
  const ReplicaBatch& first = a.base_seed <= b.base_seed ? a : b;
  const ReplicaBatch& second = &first == &a ? b : a;
  ReplicaBatch out;
  out.spec = first.spec;
  out.model = first.model;
  out.base_seed = first.base_seed;
  out.n = a.n + b.n;
  out.wall_seconds = a.wall_seconds + b.wall_seconds;
  std::vector<std::pair<std::uint64_t, const ReplicaEntry*>> keyed;
  for (const auto& e : first.entries) keyed.push_back({first.base_seed, &e});
  for (const auto& e : second.entries) keyed.push_back({second.base_seed, &e});
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first < y.first : x.second->index < y.second->index;
  });
  for (const auto& [seed, e] : keyed) out.entries.push_back(*e);
  return out;
}

MeanEstimate estimate_mean(std::span<const double> values, std::uint64_t censored) {
  const std::uint64_t n = values.size();
  if (n == 0) throw Error(ErrorCode::AllCensored, "no uncensored replicas");
  if (n < 2) throw Error(ErrorCode::TooFewSamples, "need at least 2 uncensored replicas");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  MeanEstimate m;
  m.mean = mean;
  m.se = sd / std::sqrt(static_cast<double>(n));
  m.ci_lo = mean - 1.96 * m.se;
  m.ci_hi = mean + 1.96 * m.se;
  m.used = n;
  m.censored_fraction = static_cast<double>(censored) / static_cast<double>(n + censored);
  return m;
}

MeanEstimate estimate_mean(const ReplicaBatch& batch) {
  const auto taus = batch.taus();
  return estimate_mean(taus, batch.entries.size() - taus.size());
}

double DistributionComparison::empirical_survival(double x) const {
  if (sorted.empty()) return 0.0;
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

DistributionComparison survival_compare(std::span<const double> taus, const TheoryReport& report) {
  if (taus.size() < 100) throw Error(ErrorCode::TooFewSamples, "need at least 100 uncensored replicas");
  double mean = 0.0;
  for (double t : taus) mean += t;
  mean /= static_cast<double>(taus.size());
  if (!(mean > 0.0)) throw Error(ErrorCode::TooFewSamples, "sample mean is zero");
  DistributionComparison cmp;
  cmp.reference = report;
  cmp.n = taus.size();
  cmp.sorted.reserve(taus.size());
  for (double t : taus) cmp.sorted.push_back(t / mean);
  std::sort(cmp.sorted.begin(), cmp.sorted.end());
  cmp.sup_distance = sup_distance_sorted(std::span<const double>(cmp.sorted),
                                         [&](double x) { return limit_law_P(report, x); });
  return cmp;
}

DistributionComparison survival_compare(const ReplicaBatch& batch, const TheoryReport& report) {
  const auto taus = batch.taus();
  return survival_compare(taus, report);
}

ExponentFit exponent_fit(std::span<const std::pair<double, double>> sweep) {
  std::set<double> distinct;
  for (const auto& [r, m] : sweep) {
    if (!(r > 0.0) || !(m > 0.0)) throw Error(ErrorCode::DegenerateSpan, "r and mean must be positive");
    distinct.insert(r);
  }
  if (distinct.size() < 4) throw Error(ErrorCode::DegenerateSpan, "need at least 4 distinct r values");
  if (*distinct.rbegin() < 10.0 * *distinct.begin())
    throw Error(ErrorCode::DegenerateSpan, "r values must span at least one decade");
  const double n = static_cast<double>(sweep.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [r, m] : sweep) {
    const double x = std::log(r), y = std::log(m);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  ExponentFit f;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = vy > 0.0 ? std::min(1.0, cxy * cxy / (vx * vy)) : 1.0;
  return f;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::TooFewSamples, "empty sample");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

GapStatistic gap_statistic(const ReplicaBatch& batch, const RateFunction& gV, const NetworkSpec& spec) {
  std::vector<double> gaps;
  for (const auto& e : batch.entries)
    if (!e.error && e.report.tau && e.report.tau_bar) gaps.push_back(*e.report.tau - *e.report.tau_bar);
  if (gaps.size() < 100) throw Error(ErrorCode::TooFewSamples, "need at least 100 runs with both times");
  std::sort(gaps.begin(), gaps.end());
  const double scale = rate_eval(gV, spec.gammaV * spec.r);
  GapStatistic g;
  g.n = gaps.size();
  g.raw_median = quantile_sorted(gaps, 0.5);
  g.median = g.raw_median * scale;
  g.upper_quartile = quantile_sorted(gaps, 0.75) * scale;
  return g;
}

}  // namespace qcsma
