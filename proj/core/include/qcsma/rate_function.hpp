#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace qcsma {

struct LogPower {
  double exponent = 1.0;  // L̂(x) = log(1 + x)^exponent
  bool operator==(const LogPower&) const = default;
};

struct ConstantModulation {
  double value = 1.0;
  bool operator==(const ConstantModulation&) const = default;
};

using SlowlyVarying = std::variant<LogPower, ConstantModulation>;

double slowly_varying_eval(const SlowlyVarying& l, double x);

struct PowerLaw {
  double G = 1.0;
  double beta = 1.0;
  bool operator==(const PowerLaw&) const = default;
};

struct PowerSlowlyVarying {
  double beta = 1.0;
  SlowlyVarying modulation = LogPower{};
  bool operator==(const PowerSlowlyVarying&) const = default;
};

struct SlowlyVaryingOnly {
  SlowlyVarying modulation = LogPower{};
  bool operator==(const SlowlyVaryingOnly&) const = default;
};

// Piecewise-linear between breakpoints; must start at (0, 0).
struct Tabulated {
  std::vector<std::pair<double, double>> points;
  bool operator==(const Tabulated&) const = default;
};

using RateFunction = std::variant<PowerLaw, PowerSlowlyVarying, SlowlyVaryingOnly, Tabulated>;

// Throws InvalidSpec if parameters leave the admissible class
// (non-positive exponents, unsorted or decreasing tables).
void check_rate_function(const RateFunction& g);

// g(x); zero for x ≤ 0. Throws TabulatedOutOfRange past the last breakpoint.
double rate_eval(const RateFunction& g, double x);

const char* kind_name(const RateFunction& g);

}  // namespace qcsma
