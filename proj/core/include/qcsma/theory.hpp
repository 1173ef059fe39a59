#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "qcsma/rate_function.hpp"
#include "qcsma/spec.hpp"

namespace qcsma {

enum class Regime { Subcritical, Critical, Supercritical, SlowlyVarying };

std::string_view to_string(Regime regime);

struct TheoryReport {
  Regime regime = Regime::Subcritical;
  double Mc = 0.0;
  double Fc = 0.0;
  std::optional<double> C;  // Critical and Supercritical only
  double exponent = 0.0;    // power of r in M_c
  double alpha = 0.0;
  // Second-order supercritical location αr − D·r^{1/(β(|U|−1))}, when available.
  std::optional<double> Mc_window;
};

// (1/|U|)·rU^{|U|−1}
double mean_tau_frozen_asymptotic(const NetworkSpec& spec, double rU);

// Inverse frozen mean transition time |U|·r_U(s)^{1−|U|}.
double nu(const NetworkSpec& spec, const RateFunction& gU, double s);

// Root of M·ν(M) = 1 on (0, T_U).
double solve_Mc_numeric(const NetworkSpec& spec, const RateFunction& gU);

TheoryReport closed_form_Mc(const NetworkSpec& spec, const RateFunction& gU);

// Limit survival law of τ/E[τ]. Right-continuous in x.
double limit_law_P(const TheoryReport& report, double x);

// exp(−∫₀ˣ M·ν(M·s) ds); zero from the point where r_U(M·s) vanishes.
double survival_external_numeric(const NetworkSpec& spec, const RateFunction& gU, double M, double x);

// Hard-core chain with frozen rates. State 0 is the empty configuration,
// states 1..2^|U|−1 carry a nonempty U bitmask, the rest a nonempty V bitmask.
class FrozenChain {
 public:
  FrozenChain(int sizeU, int sizeV, double rU, double rV);

  int states() const { return n_; }
  int index_u(unsigned mask) const;
  int index_v(unsigned mask) const;
  int state_u() const { return index_u(full_u()); }
  int state_v() const { return index_v(full_v()); }
  unsigned full_u() const { return (1u << sizeU_) - 1u; }
  unsigned full_v() const { return (1u << sizeV_) - 1u; }

  // Dense row-major generator; row sums are zero.
  const std::vector<double>& generator() const { return q_; }
  double rate(int from, int to) const { return q_[static_cast<std::size_t>(from) * n_ + to]; }

  int sizeU() const { return sizeU_; }
  int sizeV() const { return sizeV_; }

 private:
  int sizeU_, sizeV_;
  int n_;
  std::vector<double> q_;
};

// E_u[τ_v] from (−Q restricted off v)·h = 1. Throws SingularSystem.
double exact_mean_hitting_time(const FrozenChain& chain);

}  // namespace qcsma
