#pragma once

// Hand-rolled generators for the property suites. Every draw is a pure
// function of the case index, so failures replay from the printed seed.

#include <algorithm>
#include <cstdint>

#include "qcsma/rate_function.hpp"
#include "qcsma/rng.hpp"
#include "qcsma/spec.hpp"

namespace gen {

struct Gen {
  qcsma::SplitMix64 g;
  explicit Gen(std::uint64_t seed) : g(qcsma::mix_key({0x9e57, seed})) {}

  double uniform(double a, double b) { return a + (b - a) * qcsma::uniform01(g); }
  int integer(int lo, int hi) { return lo + static_cast<int>(g() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin() { return (g() & 1u) != 0; }

  // Admissible spec: γ_U ≥ γ_V, c above both loads, δα well below γ_U.
  qcsma::NetworkSpec spec(int max_side = 3, double r_lo = 20.0, double r_hi = 200.0) {
    qcsma::NetworkSpec s;
    s.sizeU = integer(1, max_side);
    s.sizeV = integer(1, max_side);
    s.gammaV = uniform(0.5, 1.5);
    s.gammaU = s.gammaV * uniform(1.0, 2.0);
    s.mu = uniform(1.0, 3.0);
    s.lambdaU = uniform(0.2, 1.5);
    s.lambdaV = uniform(0.2, 1.5);
    s.c = std::max(s.rho(qcsma::Side::U), s.rho(qcsma::Side::V)) + uniform(0.3, 1.5);
    s.r = uniform(r_lo, r_hi);
    const double alpha = s.gammaU / (s.c - s.rho(qcsma::Side::U));
    s.delta = uniform(0.01, 0.2) * s.gammaU / alpha;
    return s;
  }

  qcsma::SlowlyVarying modulation() {
    if (coin()) return qcsma::LogPower{uniform(0.2, 2.0)};
    return qcsma::ConstantModulation{uniform(0.5, 3.0)};
  }

  qcsma::RateFunction rate() {
    switch (integer(0, 3)) {
      case 0: return qcsma::PowerLaw{uniform(0.1, 5.0), uniform(0.1, 3.0)};
      case 1: return qcsma::PowerSlowlyVarying{uniform(0.1, 3.0), modulation()};
      case 2: return qcsma::SlowlyVaryingOnly{modulation()};
      default: {
        qcsma::Tabulated t;
        t.points.emplace_back(0.0, 0.0);
        double x = 0.0, y = 0.0;
        const int k = integer(1, 6);
        for (int i = 0; i < k; ++i) {
          x += uniform(0.5, 50.0);
          y += uniform(0.0, 10.0);
          t.points.emplace_back(x, y);
        }
        return t;
      }
    }
  }
};

}  // namespace gen
