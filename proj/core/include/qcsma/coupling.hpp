#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qcsma/model.hpp"
#include "qcsma/rate_function.hpp"
#include "qcsma/spec.hpp"

namespace qcsma {

// h(t) = max(a_U − b_U t, a_V + b_V t) + margin, both pieces affine.
struct Majorant {
  double aU = 0.0, bU = 0.0, aV = 0.0, bV = 0.0, margin = 0.0;

  double operator()(double t) const {
    const double u = aU - bU * t;
    const double v = aV + bV * t;
    return (u > v ? u : v) + margin;
  }
  // Time where the decreasing and increasing pieces cross.
  double kink() const { return bU + bV > 0.0 ? (aU - aV) / (bU + bV) : 0.0; }
};

Majorant majorant_for(const NetworkSpec& spec);

struct CopyOutcome {
  ModelTag model = ModelTag::Internal;
  std::optional<double> tau_bar;
  std::optional<double> tau;
  double horizon = 0.0;
  bool good = false;  // tube held on [0, min(T_U, end)]; queue-driven copies only
};

// Copies a and b are ordered when X^a ≤ X^b on U and X^b ≤ X^a on V.
struct OrderingPair {
  int a = 0;
  int b = 1;
  long violations = 0;
  double checked_until = 0.0;
};

struct CouplingOptions {
  double horizon_mult = 3.0;
  double delta_prime = 0.05;
};

struct CoupledSystemResult {
  std::uint64_t seed = 0;
  Majorant majorant;
  std::vector<CopyOutcome> copies;
  std::vector<OrderingPair> pairs;
  bool majorant_violated = false;
  double end_time = 0.0;
};

// Runs any set of model copies on shared per-node clocks. `pairs` lists the
// orderings to monitor; pair windows close at T_U, or at the pre-transition
// time of copy a when that copy is Isolated.
CoupledSystemResult run_coupled_system(const NetworkSpec& spec, const RateFunction& gU,
                                       const RateFunction& gV, std::uint64_t seed,
                                       const std::vector<ModelTag>& copies,
                                       std::vector<OrderingPair> pairs,
                                       const CouplingOptions& opts = {});

// Monotone acceptance within one shared activation tick: copy k activates iff
// it is eligible and u < p[k]. Exposed for tick-level tests.
std::vector<bool> accept_tick(double u, const std::vector<double>& p,
                              const std::vector<bool>& eligible);

struct CoupledRun {
  std::uint64_t seed = 0;
  Majorant majorant;
  std::optional<double> tau_low, tau_int, tau_bar_int;
  std::optional<double> tau_bar_iso, tau_bar_upp, tau_upp;
  double horizon_upp = 0.0;
  bool has_low = false, has_upp = false;
  long violations_low = 0, violations_upp = 0;
  bool good_int = false, good_iso = false;
  bool censored_low = false, censored_int = false, censored_iso = false, censored_upp = false;
  bool majorant_violated = false;
  bool coupling_undefined = false;

  long ordering_violations() const { return violations_low + violations_upp; }
  bool on_good_event() const;
};

CoupledRun coupled_run_low(const NetworkSpec& spec, const RateFunction& gU, const RateFunction& gV,
                           std::uint64_t seed, const CouplingOptions& opts = {});
CoupledRun coupled_run_upp(const NetworkSpec& spec, const RateFunction& gU, const RateFunction& gV,
                           std::uint64_t seed, const CouplingOptions& opts = {});
// Low, internal, isolated and upper copies on one set of clocks.
CoupledRun coupled_triple(const NetworkSpec& spec, const RateFunction& gU, const RateFunction& gV,
                          std::uint64_t seed, const CouplingOptions& opts = {});

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.96);

struct SandwichSummary {
  std::uint64_t n = 0;
  std::uint64_t successes = 0;
  double probability = 0.0;
  WilsonInterval ci;
  double gap = 0.0;
  // Good-event, uncensored runs and how many of them carried a violation.
  std::uint64_t ordered_low_runs = 0, violated_low_runs = 0;
  std::uint64_t ordered_upp_runs = 0, violated_upp_runs = 0;
  std::vector<CoupledRun> runs;
};

bool sandwich_holds(const CoupledRun& run, double gap);

SandwichSummary sandwich_stats(const NetworkSpec& spec, const RateFunction& gU, const RateFunction& gV,
                               std::uint64_t n, std::uint64_t seedbase,
                               const CouplingOptions& opts = {});

}  // namespace qcsma
