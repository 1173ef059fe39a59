#include "qcsma/tube.hpp"

#include <sstream>

#include "qcsma/error.hpp"
#include "qcsma/harness.hpp"
#include "qcsma/rng.hpp"

namespace qcsma {

GoodBehavior check_good_behavior(const Trajectory& traj, const NetworkSpec& spec) {
  const double limit = spec.delta * spec.r / (4.0 * spec.c);
  if (!(traj.sample_dt > 0.0) || traj.sample_dt > limit) {
    std::ostringstream os;
    os << "sample_dt=" << traj.sample_dt << " exceeds delta*r/(4c)=" << limit;
    throw Error(ErrorCode::InsufficientSamples, os.str());
  }
  const double T_U = spec.gammaU / (spec.c - spec.rho(Side::U)) * spec.r;
  const Tube tubes[2] = {tube_for(spec, Side::U), tube_for(spec, Side::V)};
  GoodBehavior gb;
  gb.per_node.assign(spec.nodes(), true);
  for (const auto& snap : traj.snapshots) {
    if (snap.t > T_U) break;
    for (int i = 0; i < spec.nodes() && i < static_cast<int>(snap.queue.size()); ++i) {
      const Tube& tube = tubes[spec.side_of(i) == Side::U ? 0 : 1];
      if (!tube.contains(snap.t, snap.queue[i])) gb.per_node[i] = false;
    }
  }
  gb.all = true;
  for (bool b : gb.per_node) gb.all = gb.all && b;
  return gb;
}

namespace {

// Q⁺(s) − ρs falls linearly between jumps, so its extremes on [0, S] sit
// just before or just after a jump, or at S.
bool input_path_exits(SplitMix64& rng, double lambda, double mu, double half_width, double S) {
  const double rho = lambda / mu;
  if (!(half_width > 0.0)) return true;
  double s = 0.0, q = 0.0;
  for (;;) {
    const double next = s + exponential(rng, lambda);
    if (next > S) return q - rho * S <= -half_width;
    if (q - rho * next <= -half_width) return true;
    q += exponential(rng, mu);
    if (q - rho * next >= half_width) return true;
    s = next;
  }
}

}  // namespace

double input_tube_exit_frequency(const NetworkSpec& spec, Side side, double S, std::uint64_t n,
                                 std::uint64_t seedbase) {
  if (n == 0) return 0.0;
  std::vector<char> exits(n, 0);
  const double lambda = spec.lambda(side);
  const double w = spec.delta * S;
  parallel_for(n, 0, [&](std::uint64_t k) {
    SplitMix64 rng = make_stream(replica_seed(seedbase, k), side == Side::U ? 0 : 1, StreamPurpose::TubeInput);
    exits[k] = input_path_exits(rng, lambda, spec.mu, w, S) ? 1 : 0;
  });
  std::uint64_t count = 0;
  for (char e : exits) count += static_cast<std::uint64_t>(e);
  return static_cast<double>(count) / static_cast<double>(n);
}

}  // namespace qcsma
