#pragma once

#include <cstdint>
#include <vector>

#include "qcsma/engine.hpp"
#include "qcsma/spec.hpp"

namespace qcsma {

struct GoodBehavior {
  std::vector<bool> per_node;
  bool all = false;
};

// Checks the U and V tubes jointly on sampled snapshots in [0, T_U].
// Throws InsufficientSamples when the grid is coarser than δr/(4c).
GoodBehavior check_good_behavior(const Trajectory& traj, const NetworkSpec& spec);

// Fraction of n compound-Poisson input paths for one node of `side` that
// leave the open tube (λ/μ)s ± δS somewhere on [0, S].
double input_tube_exit_frequency(const NetworkSpec& spec, Side side, double S, std::uint64_t n,
                                 std::uint64_t seedbase);

}  // namespace qcsma
