#pragma once

#include <cmath>
#include <limits>

#include "qcsma/rng.hpp"

namespace qcsma {

enum class Monotonicity { Increasing, Decreasing };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// First point after t0 of a Poisson process with monotone intensity `rate`,
// by thinning. Returns +inf when the rate has vanished for good or no point
// falls before t_max. The candidate stream does not depend on t_max, so a
// larger t_max never changes a point that the smaller one would return.
template <class RateFn>
double next_inhomogeneous_arrival(RateFn&& rate, double t0, Monotonicity mono,
                                  SplitMix64& rng, double t_max = kInf) {
  if (mono == Monotonicity::Decreasing) {
    // rate(s) dominates everything after s; refresh it at every rejection.
    double s = t0;
    for (;;) {
      const double lam = rate(s);
      if (!(lam > 0.0)) return kInf;
      const double t = s + exponential(rng, lam);
      if (t > t_max) return kInf;
      if (uniform01(rng) * lam <= rate(t)) return t;
      s = t;
    }
  }

  // Increasing: majorant is the rate at the segment end. Segments are sized so
  // that end/start ≤ 1.1 where the start rate is positive.
  constexpr double kRatio = 1.1;
  constexpr int kMaxSteps = 200;
  double s = t0;
  double len = 0.0;
  for (;;) {
    if (s > t_max) return kInf;
    const double lo = rate(s);
    double e;
    if (!(lo > 0.0)) {
      double step = len > 0.0 ? len : 1.0;
      int k = 0;
      while (!(rate(s + step) > 0.0)) {
        if (s + step > t_max || ++k > 2000 || !std::isfinite(s + 2.0 * step)) return kInf;
        step *= 2.0;
      }
      e = s + step;
      len = step;
    } else {
      if (!(len > 0.0)) len = 1.0 / lo;
      int k = 0;
      while (rate(s + len) > kRatio * lo && ++k < kMaxSteps) len *= 0.5;
      k = 0;
      while (rate(s + 2.0 * len) <= kRatio * lo && ++k < 60 && std::isfinite(s + 4.0 * len)) len *= 2.0;
      e = s + len;
    }
    const double maj = rate(e);
    double t = s;
    for (;;) {
      t += exponential(rng, maj);
      if (t > e) break;
      if (t > t_max) return kInf;
      if (uniform01(rng) * maj <= rate(t)) return t;
    }
    s = e;
  }
}

}  // namespace qcsma
