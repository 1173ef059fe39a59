#include "qcsma/theory.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "qcsma/error.hpp"
#include "qcsma/model.hpp"

namespace qcsma {

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
    case Regime::SlowlyVarying: return "slowly_varying";
  }
  return "subcritical";
}

double mean_tau_frozen_asymptotic(const NetworkSpec& spec, double rU) {
  return std::pow(rU, spec.sizeU - 1) / spec.sizeU;
}

namespace {

double T_U_of(const NetworkSpec& spec) { return spec.gammaU / (spec.c - spec.rho(Side::U)) * spec.r; }

// ν without the zero check: +inf where r_U vanishes.
double nu_or_inf(const NetworkSpec& spec, const RateFunction& gU, double s) {
  if (spec.sizeU == 1) return 1.0;
  const double rU = frozen_rate(spec, gU, Side::U, s);
  if (!(rU > 0.0)) return std::numeric_limits<double>::infinity();
  return spec.sizeU * std::pow(rU, 1 - spec.sizeU);
}

// First time at which r_U(t) = 0; r_U is non-increasing so bisection applies.
double rate_vanish_time(const NetworkSpec& spec, const RateFunction& gU) {
  const double T = T_U_of(spec);
  if (frozen_rate(spec, gU, Side::U, 0.0) <= 0.0) return 0.0;
  double lo = 0.0, hi = T;
  if (frozen_rate(spec, gU, Side::U, std::nextafter(T, 0.0)) > 0.0) return T;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * T; ++i) {
    const double mid = 0.5 * (lo + hi);
    (frozen_rate(spec, gU, Side::U, mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) <= 15.0 * tol || !std::isfinite(diff)) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 20);
}

struct PowerParams {
  double beta;
  double G;
};

}  // namespace

double nu(const NetworkSpec& spec, const RateFunction& gU, double s) {
  const double rU = frozen_rate(spec, gU, Side::U, s);
  if (!(rU > 0.0)) throw Error(ErrorCode::FrozenRateZero, "r_U(s) = 0");
  if (spec.sizeU == 1) return 1.0;
  return spec.sizeU * std::pow(rU, 1 - spec.sizeU);
}

double solve_Mc_numeric(const NetworkSpec& spec, const RateFunction& gU) {
  auto f = [&](double M) { return M * nu_or_inf(spec, gU, M) - 1.0; };
  const double T = T_U_of(spec);
  double lo = std::pow(spec.r, 0.01);
  double hi = T * (1.0 - 1e-6);
  if (lo >= hi) lo = 0.5 * hi;
  // The nominal lower end r^0.01 can sit above the root (|U| = 1 gives M = 1).
  for (int i = 0; i < 1100 && f(lo) >= 0.0; ++i) lo *= 0.5;
  if (!(f(lo) < 0.0) || !(f(hi) > 0.0)) throw Error(ErrorCode::NoBracket, "M*nu(M) - 1 has no sign change on (0, T_U)");
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 400; ++i) {
    mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (std::fabs(v) <= 1e-10) break;
    (v < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return mid;
}

TheoryReport closed_form_Mc(const NetworkSpec& spec, const RateFunction& gU) {
  TheoryReport rep;
  const double net = spec.c - spec.rho(Side::U);
  rep.alpha = spec.gammaU / net;
  const int k = spec.sizeU - 1;
  const double x0 = spec.gammaU * spec.r;

  PowerParams p{};
  if (auto* pl = std::get_if<PowerLaw>(&gU)) {
    p = {pl->beta, pl->G};
  } else if (auto* ps = std::get_if<PowerSlowlyVarying>(&gU)) {
    // Modulation frozen at the initial queue level γ_U r.
    p = {ps->beta, slowly_varying_eval(ps->modulation, x0)};
  } else if (auto* sv = std::get_if<SlowlyVaryingOnly>(&gU)) {
    rep.regime = Regime::SlowlyVarying;
    rep.exponent = 0.0;
    rep.Fc = std::pow(slowly_varying_eval(sv->modulation, x0), k) / spec.sizeU;
    rep.Mc = rep.Fc;
    return rep;
  } else {
    throw Error(ErrorCode::UnsupportedRateKind, "closed form needs a power-law type rate function, got tabulated");
  }

  if (k == 0) {
    rep.regime = Regime::Subcritical;
    rep.Fc = 1.0;
    rep.exponent = 0.0;
    rep.Mc = 1.0;
    return rep;
  }
  const double crit = 1.0 / k;
  const double bk = p.beta * k;
  if (std::fabs(p.beta - crit) <= 1e-12 * crit) {
    rep.regime = Regime::Critical;
    rep.Fc = spec.gammaU / (spec.sizeU * std::pow(p.G, -k) + net);
    rep.C = rep.Fc * net / spec.gammaU;
    rep.exponent = 1.0;
    rep.Mc = rep.Fc * spec.r;
  } else if (p.beta < crit) {
    rep.regime = Regime::Subcritical;
    rep.Fc = std::pow(spec.gammaU, bk) * std::pow(p.G, k) / spec.sizeU;
    rep.exponent = bk;
    rep.Mc = rep.Fc * std::pow(spec.r, bk);
  } else {
    rep.regime = Regime::Supercritical;
    rep.Fc = rep.alpha;
    rep.C = 1.0;
    rep.exponent = 1.0;
    rep.Mc = rep.alpha * spec.r;
    const double D = std::pow(rep.alpha * spec.sizeU * std::pow(p.G, -k), 1.0 / bk) / net;
    rep.Mc_window = rep.Mc - D * std::pow(spec.r, 1.0 / bk);
  }
  return rep;
}

double limit_law_P(const TheoryReport& report, double x) {
  if (x <= 0.0) return 1.0;
  switch (report.regime) {
    case Regime::Subcritical:
    case Regime::SlowlyVarying:
      return std::exp(-x);
    case Regime::Critical: {
      const double C = report.C.value_or(0.5);
      if (x >= 1.0 / C) return 0.0;
      return std::pow(1.0 - C * x, (1.0 - C) / C);
    }
    case Regime::Supercritical:
      return x < 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double survival_external_numeric(const NetworkSpec& spec, const RateFunction& gU, double M, double x) {
  if (x <= 0.0) return 1.0;
  const double s_zero = rate_vanish_time(spec, gU) / M;
  if (x >= s_zero) return 0.0;
  auto integrand = [&](double s) { return M * nu_or_inf(spec, gU, M * s); };
  const double I = adaptive_simpson(integrand, 0.0, x, 1e-8);
  return std::exp(-I);
}

}  // namespace qcsma
