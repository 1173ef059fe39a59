#pragma once

#include <optional>

namespace qcsma {

enum class Side { U, V };

inline const char* to_string(Side s) { return s == Side::U ? "U" : "V"; }

// Scalar parameters of the complete bipartite network U ∪ V.
struct NetworkSpec {
  int sizeU = 2;
  int sizeV = 2;
  double gammaU = 1.0;
  double gammaV = 1.0;
  double lambdaU = 1.0;
  double lambdaV = 1.0;
  double mu = 2.0;
  double c = 1.0;
  double r = 1000.0;
  double delta = 0.1;

  int size(Side s) const { return s == Side::U ? sizeU : sizeV; }
  int nodes() const { return sizeU + sizeV; }
  double gamma(Side s) const { return s == Side::U ? gammaU : gammaV; }
  double lambda(Side s) const { return s == Side::U ? lambdaU : lambdaV; }
  double rho(Side s) const { return lambda(s) / mu; }
  Side side_of(int node) const { return node < sizeU ? Side::U : Side::V; }

  bool operator==(const NetworkSpec&) const = default;
};

struct DeviationConstants {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double K3 = 0.0;
  double K4 = 0.0;
};

struct DerivedConstants {
  double rhoU = 0.0;
  double rhoV = 0.0;
  double alpha = 0.0;        // γ_U / (c − ρ_U)
  double alpha_star = 0.0;   // (γ_U − δα) / (c − ρ_U)
  double alpha_star2 = 0.0;  // (γ_U − 2δα) / (c − ρ_U)
  double T_U = 0.0;
  double T_U_star = 0.0;
  double T_U_star2 = 0.0;
  double K_delta_U = 0.0;
  double K_delta_V = 0.0;
  // Absent when the default ε-parameters do not give positive constants.
  std::optional<DeviationConstants> deviation;
};

// Checks every NetworkSpec invariant and returns the derived constants.
// δ = 0 is accepted as a degenerate (zero-width tube) case.
DerivedConstants validate(const NetworkSpec& spec);

// Exponential decay rate of the input-tube exit probability for one node.
double k_delta(double lambda, double mu, double delta);

// Default ε₂ = ε/(3c) with ε = 0.3·c·δ.
double default_eps2(const NetworkSpec& spec);
inline constexpr double kDefaultEps1 = 0.1;

// K1..K4 for the output lower bound; throws NonpositiveConstant.
DeviationConstants deviation_constants(const NetworkSpec& spec, double eps1, double eps2);

// Affine queue tube around the mean drift, shared by the checker and couplings.
struct Tube {
  double lower_offset, lower_slope, upper_offset, upper_slope;
  double lower(double t) const { return lower_offset + lower_slope * t; }
  double upper(double t) const { return upper_offset + upper_slope * t; }
  bool contains(double t, double q) const { return lower(t) <= q && q <= upper(t); }
};

Tube tube_for(const NetworkSpec& spec, Side side);

}  // namespace qcsma
