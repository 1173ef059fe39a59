#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcsma/engine.hpp"
#include "qcsma/theory.hpp"

namespace qcsma {

struct ReplicaEntry {
  std::uint64_t index = 0;
  TransitionReport report;
  std::optional<std::string> error;
};

struct ReplicaBatch {
  NetworkSpec spec;
  ModelKind model;
  std::uint64_t n = 0;
  std::uint64_t base_seed = 0;
  std::vector<ReplicaEntry> entries;  // sorted by (base seed, index)
  double wall_seconds = 0.0;          // never serialized

  std::uint64_t uncensored() const;
  std::vector<double> taus() const;
};

// Replica i uses seed replica_seed(seedbase, i). Results do not depend on the
// thread count; threads = 0 picks hardware concurrency.
ReplicaBatch run_replicas(const NetworkSpec& spec, const ModelKind& model, const RateFunction& gU,
                          const RateFunction& gV, std::uint64_t n, std::uint64_t seedbase,
                          const SimOptions& opts = {}, unsigned threads = 0);

ReplicaBatch merge(const ReplicaBatch& a, const ReplicaBatch& b);

// Deterministic parallel for over [0, n): each index is computed exactly once.
void parallel_for(std::uint64_t n, unsigned threads, const std::function<void(std::uint64_t)>& body);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t used = 0;
  double censored_fraction = 0.0;
};

MeanEstimate estimate_mean(std::span<const double> values, std::uint64_t censored = 0);
MeanEstimate estimate_mean(const ReplicaBatch& batch);

struct DistributionComparison {
  std::vector<double> sorted;  // τ / mean(τ), ascending
  TheoryReport reference;
  double sup_distance = 0.0;
  std::uint64_t n = 0;

  // Fraction of samples strictly greater than x.
  double empirical_survival(double x) const;
};

DistributionComparison survival_compare(std::span<const double> taus, const TheoryReport& report);
DistributionComparison survival_compare(const ReplicaBatch& batch, const TheoryReport& report);

// Sup over x ≥ 0 of |S_n(x) − S(x)| for a non-increasing right-continuous S.
template <class Survival>
double sup_distance_sorted(std::span<const double> sorted, Survival&& S);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

ExponentFit exponent_fit(std::span<const std::pair<double, double>> sweep);

struct GapStatistic {
  double median = 0.0;
  double upper_quartile = 0.0;
  double raw_median = 0.0;
  std::uint64_t n = 0;
};

GapStatistic gap_statistic(const ReplicaBatch& batch, const RateFunction& gV, const NetworkSpec& spec);

// Linear-interpolation quantile of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace qcsma

#include "qcsma/detail/sup_distance.hpp"
