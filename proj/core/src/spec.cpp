#include "qcsma/spec.hpp"

#include <cmath>
#include <sstream>

#include "qcsma/error.hpp"

namespace qcsma {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::TabulatedOutOfRange: return "TabulatedOutOfRange";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::FrozenRateZero: return "FrozenRateZero";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::UnsupportedRateKind: return "UnsupportedRateKind";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonpositiveConstant: return "NonpositiveConstant";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::MajorantViolated: return "MajorantViolated";
    case ErrorCode::CouplingUndefined: return "CouplingUndefined";
    case ErrorCode::AllCensored: return "AllCensored";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateSpan: return "DegenerateSpan";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

double k_delta(double lambda, double mu, double delta) {
  const double a = lambda + delta * mu;
  // (√a − √λ)², written so that δ = 0 gives exactly zero.
  const double d = std::sqrt(a) - std::sqrt(lambda);
  return d * d;
}

double default_eps2(const NetworkSpec& spec) {
  const double eps = 0.3 * spec.c * spec.delta;
  return eps / (3.0 * spec.c);
}

DerivedConstants validate(const NetworkSpec& s) {
  if (s.sizeU < 1) invalid("size_U must be a positive integer");
  if (s.sizeV < 1) invalid("size_V must be a positive integer");
  if (s.sizeU > 30 || s.sizeV > 30) invalid("network sides are limited to 30 nodes");
  if (!positive(s.gammaU)) invalid("gamma_U must be positive");
  if (!positive(s.gammaV)) invalid("gamma_V must be positive");
  if (s.gammaV > s.gammaU) invalid("gamma_V > gamma_U (initial queues must satisfy gamma_U >= gamma_V)");
  if (!positive(s.lambdaU)) invalid("lambda_U must be positive");
  if (!positive(s.lambdaV)) invalid("lambda_V must be positive");
  if (!positive(s.mu)) invalid("mu must be positive");
  if (!positive(s.c)) invalid("c must be positive");
  if (!positive(s.r)) invalid("r must be positive");
  if (!std::isfinite(s.delta) || s.delta < 0.0) invalid("delta must be nonnegative");

  DerivedConstants d;
  d.rhoU = s.rho(Side::U);
  d.rhoV = s.rho(Side::V);
  if (s.c <= d.rhoU) {
    std::ostringstream os;
    os << "stability violated: c <= rho_U (c=" << s.c << ", rho_U=" << d.rhoU << ")";
    invalid(os.str());
  }
  if (s.c <= d.rhoV) {
    std::ostringstream os;
    os << "stability violated: c <= rho_V (c=" << s.c << ", rho_V=" << d.rhoV << ")";
    invalid(os.str());
  }
  const double net = s.c - d.rhoU;
  d.alpha = s.gammaU / net;
  if (s.delta * d.alpha >= s.gammaU) invalid("delta*alpha >= gamma_U (T_U* would be nonpositive)");
  d.alpha_star = (s.gammaU - s.delta * d.alpha) / net;
  d.alpha_star2 = (s.gammaU - 2.0 * s.delta * d.alpha) / net;
  d.T_U = d.alpha * s.r;
  d.T_U_star = d.alpha_star * s.r;
  d.T_U_star2 = d.alpha_star2 * s.r;
  d.K_delta_U = k_delta(s.lambdaU, s.mu, s.delta);
  d.K_delta_V = k_delta(s.lambdaV, s.mu, s.delta);
  if (s.delta > 0.0) {
    try {
      d.deviation = deviation_constants(s, kDefaultEps1, default_eps2(s));
    } catch (const Error&) {
      d.deviation.reset();
    }
  }
  return d;
}

DeviationConstants deviation_constants(const NetworkSpec& s, double eps1, double eps2) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw Error(ErrorCode::NonpositiveConstant, "eps1 and eps2 must be positive");
  const double net = s.c - s.rho(Side::U);
  const double alpha = s.gammaU / net;
  const double a2 = (s.gammaU - 2.0 * s.delta * alpha) / net;
  DeviationConstants k;
  k.eps1 = eps1;
  k.eps2 = eps2;
  k.K1 = a2 * (eps1 - std::log1p(eps1)) / (1.0 + eps1);
  k.K4 = a2 * (1.0 + eps1);
  k.K2 = k.K4 * (-1.0 - std::log(eps2 / k.K4));
  k.K3 = eps2;
  if (!(k.K1 > 0.0)) throw Error(ErrorCode::NonpositiveConstant, "K1 <= 0 (alpha'' must be positive)");
  if (!(k.K2 > 0.0)) throw Error(ErrorCode::NonpositiveConstant, "K2 <= 0 (eps2 must be below alpha''(1+eps1)/e)");
  if (!(k.K4 > 0.0)) throw Error(ErrorCode::NonpositiveConstant, "K4 <= 0");
  return k;
}

Tube tube_for(const NetworkSpec& s, Side side) {
  const double dr = s.delta * s.r;
  if (side == Side::U) {
    const double a = s.gammaU * s.r;
    const double b = -(s.c - s.rho(Side::U));
    return {a - dr, b, a + 2.0 * dr, b};
  }
  const double a = s.gammaV * s.r;
  const double b = s.rho(Side::V);
  return {a - dr, b, a + dr, b};
}

}  // namespace qcsma
