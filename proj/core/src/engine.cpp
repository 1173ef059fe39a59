#include "qcsma/engine.hpp"

#include <cmath>
#include <limits>

#include "qcsma/error.hpp"
#include "qcsma/rng.hpp"
#include "qcsma/thinning.hpp"

namespace qcsma {

double default_sample_dt(const NetworkSpec& spec) {
  return spec.gammaU / (spec.c - spec.rho(Side::U)) * spec.r / 2048.0;
}

namespace {

// Fixed processing order for float-equal event times.
enum Prio : int { kArrival = 0, kZero = 1, kDeact = 2, kAct = 3 };

struct Node {
  Side side = Side::U;
  bool serves = true;
  bool active = false;
  bool draining = false;
  bool eligible = false;
  double q_init = 0.0;
  double q0 = 0.0;  // queue at anchor time t0
  double t0 = 0.0;
  double act_since = 0.0;
  double T_acc = 0.0;
  long periods = 0;
  double input = 0.0;
  double next[4] = {kInf, kInf, kInf, kInf};
  SplitMix64 arr, deact, act;
};

class Engine {
 public:
  Engine(const NetworkSpec& spec, const ModelKind& model, const RateFunction& gU, const RateFunction& gV,
         std::uint64_t seed, const SimOptions& opts)
      : spec_(spec), model_(model), gU_(gU), gV_(gV), opts_(opts), seed_(seed) {
    c_ = spec.c;
    T_U_ = spec.gammaU / (spec.c - spec.rho(Side::U)) * spec.r;
    horizon_ = opts.horizon_mult * T_U_;
    if (model.tag == ModelTag::UpperExternal) horizon_ = std::min(horizon_, T_U_ * (1.0 + opts.upper_slack));
    qdriven_ = queue_driven(model.tag);
    isolated_ = model.tag == ModelTag::Isolated;
    if (!qdriven_) {
      if (model.tag == ModelTag::Frozen && !model.rates && (model.freeze_time < 0.0 || model.freeze_time >= T_U_))
        throw Error(ErrorCode::InvalidSpec, "freeze time must lie in [0, T_U)");
      sched_[0] = schedule_for(model, Side::U, spec);
      sched_[1] = schedule_for(model, Side::V, spec);
    }
    tube_[0] = tube_for(spec, Side::U);
    tube_[1] = tube_for(spec, Side::V);
    dt_ = opts.sample_dt > 0.0 ? opts.sample_dt : default_sample_dt(spec);
    traj_.sample_dt = dt_;
  }

  Trajectory run() {
    init();
    for (;;) {
      int node = -1, prio = 0;
      double te = kInf;
      for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        for (int p = 0; p < 4; ++p) {
          const double t = nodes_[i].next[p];
          if (t < te || (t == te && t < kInf && (p < prio || (p == prio && i < node)))) {
            te = t;
            node = i;
            prio = p;
          }
        }
      }
      if (!(te <= horizon_)) break;
      sample_until(te, false);
      if (!tube_closed_ && te > T_U_) close_tube(T_U_);
      dispatch(node, prio, te);
      refresh_eligibility(te);
      detect(te);
      if (traj_.report.tau && opts_.stop_at_transition) break;
    }
    const double end = traj_.report.tau && opts_.stop_at_transition ? *traj_.report.tau : horizon_;
    sample_until(end, true);
    if (!tube_closed_) close_tube(std::min(T_U_, end));
    finish(end);
    return std::move(traj_);
  }

 private:
  const RateFunction& g(Side s) const { return s == Side::U ? gU_ : gV_; }
  int sidx(Side s) const { return s == Side::U ? 0 : 1; }

  double queue(const Node& n, double t) const { return n.draining ? n.q0 - c_ * (t - n.t0) : n.q0; }

  void anchor(Node& n, double t) {
    n.q0 = queue(n, t);
    if (n.q0 < 0.0) n.q0 = 0.0;
    n.t0 = t;
  }

  void init() {
    const int N = spec_.nodes();
    nodes_.resize(N);
    for (int i = 0; i < N; ++i) {
      Node& n = nodes_[i];
      n.side = spec_.side_of(i);
      n.serves = !(isolated_ && n.side == Side::V);
      n.q_init = n.q0 = spec_.gamma(n.side) * spec_.r;
      n.arr = make_stream(seed_, i, StreamPurpose::Arrival);
      n.deact = make_stream(seed_, i, StreamPurpose::Deactivation);
      n.act = make_stream(seed_, i, StreamPurpose::Activation);
      n.next[kArrival] = exponential(n.arr, spec_.lambda(n.side));
      if (n.side == Side::U) activate(i, 0.0);
    }
    refresh_eligibility(0.0);
    traj_.report.seed = seed_;
    traj_.report.model = model_;
    traj_.report.horizon = horizon_;
  }

  void record(double t, int i, EventKind kind, double size = 0.0) {
    if (opts_.record_events) traj_.events.push_back({t, i, kind, size, true});
  }

  void activate(int i, double t) {
    Node& n = nodes_[i];
    n.active = true;
    n.act_since = t;
    n.t0 = t;
    n.draining = n.serves && n.q0 > 0.0;
    n.next[kZero] = n.draining ? t + n.q0 / c_ : kInf;
    n.next[kDeact] = t + exponential(n.deact);
    n.next[kAct] = kInf;
    n.eligible = false;
    ++active_[sidx(n.side)];
  }

  void deactivate(int i, double t) {
    Node& n = nodes_[i];
    anchor(n, t);
    n.active = false;
    n.draining = false;
    n.T_acc += t - n.act_since;
    ++n.periods;
    n.next[kDeact] = kInf;
    n.next[kZero] = kInf;
    --active_[sidx(n.side)];
  }

  void dispatch(int i, int prio, double t) {
    Node& n = nodes_[i];
    check_tube(n, t);
    switch (prio) {
      case kArrival: {
        anchor(n, t);
        const double size = exponential(n.arr, spec_.mu);
        n.q0 += size;
        n.input += size;
        record(t, i, EventKind::Arrival, size);
        if (n.active && n.serves && !n.draining) n.draining = true;
        if (n.draining) n.next[kZero] = t + n.q0 / c_;
        n.next[kArrival] = t + exponential(n.arr, spec_.lambda(n.side));
        if (qdriven_ && n.eligible) draw_activation(n, t);
        break;
      }
      case kZero:
        n.q0 = 0.0;
        n.t0 = t;
        record(t, i, EventKind::QueueHitZero);
        if (qdriven_) {
          deactivate(i, t);
        } else {
          // Deterministic-rate models keep the node on; the server idles.
          n.draining = false;
          n.next[kZero] = kInf;
        }
        break;
      case kDeact:
        record(t, i, EventKind::Deactivation);
        deactivate(i, t);
        break;
      case kAct:
        record(t, i, EventKind::ActivationAttempt);
        activate(i, t);
        break;
    }
    check_tube(n, t);
  }

  bool unblocked(const Node& n) const {
    if (n.side == Side::U) return isolated_ || active_[1] == 0;
    return active_[0] == 0;
  }

  void draw_activation(Node& n, double t) {
    if (qdriven_) {
      const double h = rate_eval(g(n.side), n.q0);
      n.next[kAct] = h > 0.0 ? t + exponential(n.act, h) : kInf;
      return;
    }
    const RateSchedule& s = sched_[sidx(n.side)];
    if (s.constant) {
      n.next[kAct] = *s.constant > 0.0 ? t + exponential(n.act, *s.constant) : kInf;
      return;
    }
    const RateFunction& gf = g(n.side);
    auto rate = [&](double u) { return rate_eval(gf, s.offset + s.slope * u); };
    const auto mono = s.slope > 0.0 ? Monotonicity::Increasing : Monotonicity::Decreasing;
    n.next[kAct] = next_inhomogeneous_arrival(rate, t, mono, n.act, horizon_);
  }

  void refresh_eligibility(double t) {
    for (auto& n : nodes_) {
      const bool e = !n.active && unblocked(n);
      if (e && !n.eligible) draw_activation(n, t);
      if (!e) n.next[kAct] = kInf;
      n.eligible = e;
    }
  }

  void detect(double t) {
    auto& rep = traj_.report;
    if (!rep.tau_bar && active_[1] > 0) rep.tau_bar = t;
    if (!rep.tau && active_[0] == 0 && active_[1] == spec_.sizeV) rep.tau = t;
  }

  void check_tube(const Node& n, double t) {
    if (tube_closed_ || t > T_U_) return;
    if (!tube_[sidx(n.side)].contains(t, queue(n, t))) good_ = false;
  }

  void close_tube(double t) {
    for (const auto& n : nodes_) check_tube(n, t);
    tube_closed_ = true;
  }

  void snapshot(double t) {
    Snapshot s;
    s.t = t;
    s.queue.reserve(nodes_.size());
    s.active.reserve(nodes_.size());
    for (const auto& n : nodes_) {
      s.queue.push_back(std::max(0.0, queue(n, t)));
      s.active.push_back(n.active ? 1 : 0);
    }
    traj_.snapshots.push_back(std::move(s));
  }

  // Emits grid snapshots strictly before te (or up to and including it).
  void sample_until(double te, bool inclusive) {
    if (!opts_.record_snapshots) return;
    for (;;) {
      const double ts = static_cast<double>(sample_k_) * dt_;
      if (inclusive ? ts > te : ts >= te) break;
      snapshot(ts);
      ++sample_k_;
    }
  }

  void finish(double end) {
    traj_.report.good_behavior = good_;
    auto& fs = traj_.final_state;
    fs.t = end;
    fs.nodes.clear();
    for (const auto& n : nodes_) {
      NodeState s;
      s.side = n.side;
      s.active = n.active;
      s.queue = std::max(0.0, queue(n, end));
      s.active_time = n.T_acc + (n.active ? end - n.act_since : 0.0);
      s.inactive_time = end - s.active_time;
      s.periods = n.periods;
      s.input = n.input;
      s.drained = n.q_init + n.input - s.queue;
      fs.nodes.push_back(s);
    }
  }

  const NetworkSpec& spec_;
  ModelKind model_;
  const RateFunction& gU_;
  const RateFunction& gV_;
  SimOptions opts_;
  std::uint64_t seed_;
  double c_ = 1.0, T_U_ = 0.0, horizon_ = 0.0, dt_ = 1.0;
  bool qdriven_ = true, isolated_ = false;
  RateSchedule sched_[2];
  Tube tube_[2];
  std::vector<Node> nodes_;
  int active_[2] = {0, 0};
  bool good_ = true, tube_closed_ = false;
  std::uint64_t sample_k_ = 0;
  Trajectory traj_;
};

}  // namespace

Trajectory simulate_run(const NetworkSpec& spec, const ModelKind& model, const RateFunction& gU,
                        const RateFunction& gV, std::uint64_t seed, const SimOptions& opts) {
  Engine engine(spec, model, gU, gV, seed, opts);
  return engine.run();
}

}  // namespace qcsma
