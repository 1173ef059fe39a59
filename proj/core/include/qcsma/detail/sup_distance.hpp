#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace qcsma {

template <class Survival>
double sup_distance_sorted(std::span<const double> sorted, Survival&& S) {
  const std::size_t n = sorted.size();
  if (n == 0) return 1.0;
  // S_n is constant on [x_(k), x_(k+1)); S is monotone, so the sup on each
  // piece is attained at its left end or approached at its right end.
  auto left_limit = [&](double x) { return x > 0.0 ? S(std::nextafter(x, 0.0)) : 1.0; };
  double d = 0.0;
  auto upd = [&](double v) { d = v > d ? v : d; };
  double prev = 0.0;
  double level = 1.0;
  std::size_t i = 0;
  while (i <= n) {
    const double next = i < n ? sorted[i] : HUGE_VAL;
    if (next > prev || i == n) {
      upd(std::fabs(level - S(prev)));
      if (i < n) upd(std::fabs(level - left_limit(next)));
    }
    if (i == n) break;
    std::size_t j = i;
    while (j < n && sorted[j] == next) ++j;
    level = static_cast<double>(n - j) / static_cast<double>(n);
    prev = next;
    i = j;
  }
  return d;
}

}  // namespace qcsma
