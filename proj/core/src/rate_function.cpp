#include "qcsma/rate_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcsma/error.hpp"

namespace qcsma {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double x, const char* what) {
  if (!(std::isfinite(x) && x > 0.0)) throw Error(ErrorCode::InvalidSpec, std::string(what) + " must be positive");
}

void check_modulation(const SlowlyVarying& l) {
  std::visit(overloaded{[](const LogPower& p) { require_positive(p.exponent, "log-power exponent"); },
                        [](const ConstantModulation& c) { require_positive(c.value, "constant modulation"); }},
             l);
}
}  // namespace

double slowly_varying_eval(const SlowlyVarying& l, double x) {
  return std::visit(overloaded{[x](const LogPower& p) { return std::pow(std::log1p(x), p.exponent); },
                               [](const ConstantModulation& c) { return c.value; }},
                    l);
}

void check_rate_function(const RateFunction& g) {
  std::visit(overloaded{
                 [](const PowerLaw& p) {
                   require_positive(p.G, "power-law G");
                   require_positive(p.beta, "power-law beta");
                 },
                 [](const PowerSlowlyVarying& p) {
                   require_positive(p.beta, "beta");
                   check_modulation(p.modulation);
                 },
                 [](const SlowlyVaryingOnly& p) { check_modulation(p.modulation); },
                 [](const Tabulated& t) {
                   if (t.points.size() < 2) throw Error(ErrorCode::InvalidSpec, "table needs at least two breakpoints");
                   if (t.points.front() != std::pair<double, double>{0.0, 0.0})
                     throw Error(ErrorCode::InvalidSpec, "table must start at (0, 0)");
                   for (std::size_t i = 1; i < t.points.size(); ++i) {
                     if (!(t.points[i].first > t.points[i - 1].first))
                       throw Error(ErrorCode::InvalidSpec, "table abscissae must be strictly increasing");
                     if (t.points[i].second < t.points[i - 1].second || !std::isfinite(t.points[i].second))
                       throw Error(ErrorCode::InvalidSpec, "table values must be finite and non-decreasing");
                   }
                 }},
             g);
}

double rate_eval(const RateFunction& g, double x) {
  if (!(x > 0.0)) return 0.0;
  return std::visit(
      overloaded{[x](const PowerLaw& p) { return p.G * std::pow(x, p.beta); },
                 [x](const PowerSlowlyVarying& p) { return std::pow(x, p.beta) * slowly_varying_eval(p.modulation, x); },
                 [x](const SlowlyVaryingOnly& p) { return slowly_varying_eval(p.modulation, x); },
                 [x](const Tabulated& t) {
                   const auto& pts = t.points;
                   if (x > pts.back().first) {
                     std::ostringstream os;
                     os << "x=" << x << " beyond last breakpoint " << pts.back().first;
                     throw Error(ErrorCode::TabulatedOutOfRange, os.str());
                   }
                   auto it = std::upper_bound(pts.begin(), pts.end(), x,
                                              [](double v, const auto& p) { return v < p.first; });
                   if (it == pts.end()) return pts.back().second;
                   const auto& hi = *it;
                   const auto& lo = *(it - 1);
                   const double w = (x - lo.first) / (hi.first - lo.first);
                   return lo.second + w * (hi.second - lo.second);
                 }},
      g);
}

const char* kind_name(const RateFunction& g) {
  return std::visit(overloaded{[](const PowerLaw&) { return "power"; },
                               [](const PowerSlowlyVarying&) { return "power_slowly_varying"; },
                               [](const SlowlyVaryingOnly&) { return "slowly_varying"; },
                               [](const Tabulated&) { return "tabulated"; }},
                    g);
}

}  // namespace qcsma
