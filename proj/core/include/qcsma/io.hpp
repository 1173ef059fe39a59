#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qcsma/coupling.hpp"
#include "qcsma/engine.hpp"
#include "qcsma/harness.hpp"
#include "qcsma/theory.hpp"

namespace qcsma {

// Shortest decimal string that parses back to the same double.
std::string format_number(double x);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const NetworkSpec& spec);

std::string report_json(const TransitionReport& report);
std::string coupled_run_json(const CoupledRun& run);
std::string theory_json(const TheoryReport& report, const DerivedConstants& constants, double Mc_numeric);

struct SweepRow {
  double r = 0.0;
  std::uint64_t n = 0;
  std::uint64_t censored = 0;
  double mean_tau = 0.0;
  double se = 0.0;
  double slope_target = 0.0;
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Rows x, empirical survival, reference survival on the grid [0, x_max] step dx.
void write_comparison_csv(std::ostream& os, const DistributionComparison& cmp, double x_max, double dx);

}  // namespace qcsma
