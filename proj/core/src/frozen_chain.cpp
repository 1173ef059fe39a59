#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "qcsma/error.hpp"
#include "qcsma/theory.hpp"

namespace qcsma {

FrozenChain::FrozenChain(int sizeU, int sizeV, double rU, double rV) : sizeU_(sizeU), sizeV_(sizeV) {
  if (sizeU < 1 || sizeV < 1 || sizeU > 12 || sizeV > 12)
    throw Error(ErrorCode::InvalidSpec, "frozen chain supports 1..12 nodes per side");
  if (!(rU >= 0.0) || !(rV >= 0.0)) throw Error(ErrorCode::InvalidSpec, "frozen rates must be nonnegative");
  n_ = (1 << sizeU) + (1 << sizeV) - 1;
  q_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
  auto add = [&](int from, int to, double rate) {
    if (rate <= 0.0) return;
    q_[static_cast<std::size_t>(from) * n_ + to] += rate;
    q_[static_cast<std::size_t>(from) * n_ + from] -= rate;
  };
  for (int i = 0; i < sizeU; ++i) add(0, index_u(1u << i), rU);
  for (int j = 0; j < sizeV; ++j) add(0, index_v(1u << j), rV);
  for (unsigned m = 1; m <= full_u(); ++m) {
    for (int i = 0; i < sizeU; ++i) {
      const unsigned bit = 1u << i;
      if (m & bit) add(index_u(m), (m ^ bit) ? index_u(m ^ bit) : 0, 1.0);
      else add(index_u(m), index_u(m | bit), rU);
    }
  }
  for (unsigned m = 1; m <= full_v(); ++m) {
    for (int j = 0; j < sizeV; ++j) {
      const unsigned bit = 1u << j;
      if (m & bit) add(index_v(m), (m ^ bit) ? index_v(m ^ bit) : 0, 1.0);
      else add(index_v(m), index_v(m | bit), rV);
    }
  }
}

int FrozenChain::index_u(unsigned mask) const { return mask == 0 ? 0 : static_cast<int>(mask); }

int FrozenChain::index_v(unsigned mask) const {
  return mask == 0 ? 0 : static_cast<int>(full_u()) + static_cast<int>(mask);
}

namespace {

// Depth-first search from u over positive rates.
bool v_reachable(const FrozenChain& chain) {
  const int n = chain.states();
  std::vector<char> seen(n, 0);
  std::vector<int> stack{chain.state_u()};
  seen[chain.state_u()] = 1;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int t = 0; t < n; ++t) {
      if (t != s && chain.rate(s, t) > 0.0 && !seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
    }
  }
  return seen[chain.state_v()] != 0;
}

}  // namespace

double exact_mean_hitting_time(const FrozenChain& chain) {
  if (!v_reachable(chain))
    throw Error(ErrorCode::SingularSystem, "configuration v is unreachable from u");
  const int n = chain.states();
  const int v = chain.state_v();
  // Unknowns: h on every state except v.
  std::vector<int> map(n, -1);
  int m = 0;
  for (int s = 0; s < n; ++s)
    if (s != v) map[s] = m++;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (int s = 0; s < n; ++s) {
    if (s == v) continue;
    for (int t = 0; t < n; ++t) {
      if (t == v) continue;
      A(map[s], map[t]) = -chain.rate(s, t);
    }
  }
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(m);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularSystem, "restricted generator is singular");
  Eigen::VectorXd h = lu.solve(b);
  // One round of iterative refinement; the rate spread can reach 10^9.
  h += lu.solve(b - A * h);
  const double value = h(map[chain.state_u()]);
  if (!std::isfinite(value) || value <= 0.0) throw Error(ErrorCode::SingularSystem, "non-finite hitting time");
  return value;
}

}  // namespace qcsma
