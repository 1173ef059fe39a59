#include "qcsma/coupling.hpp"

#include <cmath>

#include "qcsma/error.hpp"
#include "qcsma/harness.hpp"
#include "qcsma/rng.hpp"
#include "qcsma/thinning.hpp"

namespace qcsma {

Majorant majorant_for(const NetworkSpec& spec) {
  const double dr = spec.delta * spec.r;
  Majorant h;
  h.aU = spec.gammaU * spec.r + 2.0 * dr;
  h.bU = spec.c - spec.rho(Side::U);
  h.aV = spec.gammaV * spec.r + dr;
  h.bV = spec.rho(Side::V);
  h.margin = dr;
  return h;
}

std::vector<bool> accept_tick(double u, const std::vector<double>& p, const std::vector<bool>& eligible) {
  std::vector<bool> out(p.size(), false);
  for (std::size_t k = 0; k < p.size(); ++k) out[k] = eligible[k] && u < p[k];
  return out;
}

namespace {

enum Prio : int { kArrival = 0, kZero = 1, kDeact = 2, kTick = 3 };

struct Copy {
  ModelTag tag = ModelTag::Internal;
  bool qdriven = true;
  bool isolated = false;
  RateSchedule sched[2];
  std::vector<char> active;
  int nact[2] = {0, 0};
  std::vector<double> q0, t0, next_zero;
  std::vector<char> draining, serves;
  std::optional<double> tau_bar, tau;
  double horizon = 0.0;
  bool good = true;
  bool tube_closed = false;
  bool finished = false;
};

class CoupledEngine {
 public:
  CoupledEngine(const NetworkSpec& spec, const RateFunction& gU, const RateFunction& gV, std::uint64_t seed,
                const std::vector<ModelTag>& tags, std::vector<OrderingPair> pairs, const CouplingOptions& opts)
      : spec_(spec), gU_(gU), gV_(gV), seed_(seed), opts_(opts) {
    c_ = spec.c;
    T_U_ = spec.gammaU / (spec.c - spec.rho(Side::U)) * spec.r;
    h_ = majorant_for(spec);
    tube_[0] = tube_for(spec, Side::U);
    tube_[1] = tube_for(spec, Side::V);
    const int N = spec.nodes();
    for (auto tag : tags) {
      if (tag == ModelTag::Frozen) throw Error(ErrorCode::InvalidSpec, "frozen copies cannot be coupled");
      Copy c;
      c.tag = tag;
      c.qdriven = queue_driven(tag);
      c.isolated = tag == ModelTag::Isolated;
      if (!c.qdriven) {
        c.sched[0] = schedule_for(ModelKind{tag, 0.0, std::nullopt}, Side::U, spec);
        c.sched[1] = schedule_for(ModelKind{tag, 0.0, std::nullopt}, Side::V, spec);
      }
      c.active.assign(N, 0);
      c.q0.assign(N, 0.0);
      c.t0.assign(N, 0.0);
      c.next_zero.assign(N, kInf);
      c.draining.assign(N, 0);
      c.serves.assign(N, 1);
      for (int i = 0; i < N; ++i) {
        c.q0[i] = spec.gamma(spec.side_of(i)) * spec.r;
        if (c.isolated && spec.side_of(i) == Side::V) c.serves[i] = 0;
      }
      c.horizon = tag == ModelTag::UpperExternal ? T_U_ * (1.0 + opts.delta_prime) : opts.horizon_mult * T_U_;
      horizon_ = std::max(horizon_, c.horizon);
      copies_.push_back(std::move(c));
    }
    pairs_ = std::move(pairs);
    pair_open_.assign(pairs_.size(), true);
  }

  CoupledSystemResult run() {
    init();
    double end = horizon_;
    for (;;) {
      int node = -1, prio = 0, copy = -1;
      double te = kInf;
      auto consider = [&](double t, int p, int i, int k) {
        if (t < te || (t == te && t < kInf && (p < prio || (p == prio && (i < node || (i == node && k < copy)))))) {
          te = t;
          prio = p;
          node = i;
          copy = k;
        }
      };
      for (int i = 0; i < static_cast<int>(shared_.size()); ++i) {
        consider(shared_[i].next_arrival, kArrival, i, -1);
        consider(shared_[i].next_deact, kDeact, i, -1);
        consider(shared_[i].next_tick, kTick, i, -1);
        for (int k = 0; k < static_cast<int>(copies_.size()); ++k) consider(copies_[k].next_zero[i], kZero, i, k);
      }
      if (!(te <= horizon_)) break;
      if (te > T_U_) close_tubes_at(T_U_);
      if (!handle(node, prio, copy, te)) {
        end = te;
        break;
      }
      refresh_eligibility(te);
      detect(te);
      check_pairs(te);
      bool all = true;
      for (const auto& c : copies_) all = all && c.finished;
      if (all) {
        end = te;
        break;
      }
    }
    close_tubes_at(std::min(T_U_, end));
    return result(end);
  }

 private:
  struct Shared {
    Side side = Side::U;
    double next_arrival = kInf, next_deact = kInf, next_tick = kInf;
    bool eligible_any = false;
    SplitMix64 arr, deact, tick;
  };

  const RateFunction& g(Side s) const { return s == Side::U ? gU_ : gV_; }
  static int sidx(Side s) { return s == Side::U ? 0 : 1; }

  double queue(const Copy& c, int i, double t) const {
    return c.draining[i] ? c.q0[i] - c_ * (t - c.t0[i]) : c.q0[i];
  }

  void init() {
    const int N = spec_.nodes();
    shared_.resize(N);
    for (int i = 0; i < N; ++i) {
      Shared& s = shared_[i];
      s.side = spec_.side_of(i);
      s.arr = make_stream(seed_, i, StreamPurpose::Arrival);
      s.deact = make_stream(seed_, i, StreamPurpose::Deactivation);
      s.tick = make_stream(seed_, i, StreamPurpose::Tick);
      s.next_arrival = exponential(s.arr, spec_.lambda(s.side));
      s.next_deact = exponential(s.deact);
      if (s.side == Side::U)
        for (int k = 0; k < static_cast<int>(copies_.size()); ++k) activate(k, i, 0.0);
    }
    refresh_eligibility(0.0);
  }

  void activate(int k, int i, double t) {
    Copy& c = copies_[k];
    c.active[i] = 1;
    ++c.nact[sidx(spec_.side_of(i))];
    if (!c.qdriven) return;
    c.t0[i] = t;
    c.draining[i] = c.serves[i] && c.q0[i] > 0.0;
    c.next_zero[i] = c.draining[i] ? t + c.q0[i] / c_ : kInf;
  }

  void deactivate(int k, int i, double t) {
    Copy& c = copies_[k];
    c.active[i] = 0;
    --c.nact[sidx(spec_.side_of(i))];
    if (!c.qdriven) return;
    c.q0[i] = std::max(0.0, queue(c, i, t));
    c.t0[i] = t;
    c.draining[i] = 0;
    c.next_zero[i] = kInf;
  }

  bool unblocked(const Copy& c, Side side) const {
    if (side == Side::U) return c.isolated || c.nact[1] == 0;
    return c.nact[0] == 0;
  }

  bool eligible(const Copy& c, int i) const { return !c.active[i] && unblocked(c, spec_.side_of(i)); }

  double copy_rate(const Copy& c, int i, double t) const {
    const Side side = spec_.side_of(i);
    if (c.qdriven) return rate_eval(g(side), c.q0[i]);
    const RateSchedule& s = c.sched[sidx(side)];
    return rate_eval(g(side), s.offset + s.slope * t);
  }

  double tick_rate(Side side, double t) const { return rate_eval(g(side), h_(t)); }

  double draw_tick(Shared& s, double t) {
    const double kink = h_.kink();
    auto rate = [&](double u) { return tick_rate(s.side, u); };
    if (t < kink) {
      const double x = next_inhomogeneous_arrival(rate, t, Monotonicity::Decreasing, s.tick, std::min(kink, horizon_));
      if (x < kInf || kink >= horizon_) return x;
      t = kink;
    }
    return next_inhomogeneous_arrival(rate, t, Monotonicity::Increasing, s.tick, horizon_);
  }

  void refresh_eligibility(double t) {
    for (int i = 0; i < static_cast<int>(shared_.size()); ++i) {
      bool any = false;
      for (const auto& c : copies_) any = any || eligible(c, i);
      Shared& s = shared_[i];
      if (any && !s.eligible_any) s.next_tick = draw_tick(s, t);
      if (!any) s.next_tick = kInf;
      s.eligible_any = any;
    }
  }

  void check_tube(Copy& c, int i, double t) {
    if (!c.qdriven || c.tube_closed || t > T_U_) return;
    if (!tube_[sidx(spec_.side_of(i))].contains(t, queue(c, i, t))) c.good = false;
  }

  void close_tube(Copy& c, double t) {
    if (c.tube_closed) return;
    for (int i = 0; i < static_cast<int>(shared_.size()); ++i) check_tube(c, i, std::min(t, T_U_));
    c.tube_closed = true;
  }

  void close_tubes_at(double t) {
    for (auto& c : copies_) close_tube(c, t);
  }

  // Returns false when the run must be aborted.
  bool handle(int i, int prio, int k, double t) {
    Shared& s = shared_[i];
    switch (prio) {
      case kArrival: {
        const double size = exponential(s.arr, spec_.mu);
        for (auto& c : copies_) {
          if (!c.qdriven) continue;
          check_tube(c, i, t);
          c.q0[i] = std::max(0.0, queue(c, i, t)) + size;
          c.t0[i] = t;
          if (c.active[i] && c.serves[i]) {
            c.draining[i] = 1;
            c.next_zero[i] = t + c.q0[i] / c_;
          }
          check_tube(c, i, t);
        }
        s.next_arrival = t + exponential(s.arr, spec_.lambda(s.side));
        break;
      }
      case kZero: {
        Copy& c = copies_[k];
        check_tube(c, i, t);
        c.q0[i] = 0.0;
        c.t0[i] = t;
        deactivate(k, i, t);
        check_tube(c, i, t);
        break;
      }
      case kDeact:
        for (int j = 0; j < static_cast<int>(copies_.size()); ++j) {
          if (!copies_[j].active[i]) continue;
          check_tube(copies_[j], i, t);
          deactivate(j, i, t);
        }
        s.next_deact = t + exponential(s.deact);
        break;
      case kTick: {
        const double u = uniform01(s.tick);
        const double top = tick_rate(s.side, t);
        const std::size_t K = copies_.size();
        std::vector<double> p(K, 0.0);
        std::vector<bool> elig(K, false);
        for (std::size_t j = 0; j < K; ++j) {
          elig[j] = eligible(copies_[j], i);
          if (!elig[j]) continue;
          p[j] = top > 0.0 ? copy_rate(copies_[j], i, t) / top : 0.0;
          if (p[j] > 1.0 + 1e-12) {
            majorant_violated_ = true;
            return false;
          }
        }
        const auto fire = accept_tick(u, p, elig);
        for (std::size_t j = 0; j < K; ++j) {
          if (!fire[j]) continue;
          check_tube(copies_[j], i, t);
          activate(static_cast<int>(j), i, t);
        }
        s.next_tick = kInf;
        s.eligible_any = false;  // forces a fresh draw if still eligible
        break;
      }
    }
    return true;
  }

  void detect(double t) {
    for (auto& c : copies_) {
      if (!c.tau_bar && c.nact[1] > 0 && t <= c.horizon) c.tau_bar = t;
      if (!c.tau && c.nact[0] == 0 && c.nact[1] == spec_.sizeV && t <= c.horizon) c.tau = t;
      const bool done = c.isolated ? c.tau_bar.has_value() : c.tau.has_value();
      if (done && !c.finished) {
        c.finished = true;
        close_tube(c, t);
      }
      if (!c.finished && t > c.horizon) c.finished = true;
    }
  }

  void check_pairs(double t) {
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      if (!pair_open_[p]) continue;
      OrderingPair& pr = pairs_[p];
      const Copy& a = copies_[pr.a];
      const Copy& b = copies_[pr.b];
      const bool iso_window = a.isolated;
      if (!iso_window && t > T_U_) {
        pair_open_[p] = false;
        continue;
      }
      bool ok = true;
      for (int i = 0; i < static_cast<int>(shared_.size()); ++i) {
        if (spec_.side_of(i) == Side::U) ok = ok && a.active[i] <= b.active[i];
        else ok = ok && b.active[i] <= a.active[i];
      }
      if (!ok) ++pr.violations;
      pr.checked_until = t;
      if (iso_window && a.tau_bar) pair_open_[p] = false;
    }
  }

  CoupledSystemResult result(double end) {
    CoupledSystemResult r;
    r.seed = seed_;
    r.majorant = h_;
    r.majorant_violated = majorant_violated_;
    r.end_time = end;
    for (const auto& c : copies_) {
      CopyOutcome o;
      o.model = c.tag;
      o.tau_bar = c.tau_bar;
      o.tau = c.tau;
      o.horizon = c.horizon;
      o.good = c.qdriven && c.good;
      r.copies.push_back(o);
    }
    r.pairs = pairs_;
    return r;
  }

  const NetworkSpec& spec_;
  const RateFunction& gU_;
  const RateFunction& gV_;
  std::uint64_t seed_;
  CouplingOptions opts_;
  double c_ = 1.0, T_U_ = 0.0, horizon_ = 0.0;
  Majorant h_;
  Tube tube_[2];
  std::vector<Copy> copies_;
  std::vector<Shared> shared_;
  std::vector<OrderingPair> pairs_;
  std::vector<char> pair_open_;
  bool majorant_violated_ = false;
};

CoupledRun assemble(const NetworkSpec& spec, const CoupledSystemResult& r, int low, int in, int iso, int upp) {
  const double T_U = spec.gammaU / (spec.c - spec.rho(Side::U)) * spec.r;
  CoupledRun run;
  run.seed = r.seed;
  run.majorant = r.majorant;
  run.majorant_violated = r.majorant_violated;
  if (low >= 0) {
    run.has_low = true;
    run.tau_low = r.copies[low].tau;
    run.tau_int = r.copies[in].tau;
    run.tau_bar_int = r.copies[in].tau_bar;
    run.good_int = r.copies[in].good;
    run.censored_low = !run.tau_low;
    run.censored_int = !run.tau_int;
    run.violations_low = r.pairs[0].violations;
  }
  if (iso >= 0) {
    run.has_upp = true;
    run.tau_bar_iso = r.copies[iso].tau_bar;
    run.tau_bar_upp = r.copies[upp].tau_bar;
    run.tau_upp = r.copies[upp].tau;
    run.horizon_upp = r.copies[upp].horizon;
    run.good_iso = r.copies[iso].good;
    run.censored_iso = !run.tau_bar_iso;
    run.censored_upp = !run.tau_upp;
    run.violations_upp = r.pairs[low >= 0 ? 1 : 0].violations;
    run.coupling_undefined = !run.tau_bar_iso || *run.tau_bar_iso > T_U;
  }
  return run;
}

}  // namespace

bool CoupledRun::on_good_event() const { return (!has_low || good_int) && (!has_upp || good_iso); }

CoupledSystemResult run_coupled_system(const NetworkSpec& spec, const RateFunction& gU, const RateFunction& gV,
                                       std::uint64_t seed, const std::vector<ModelTag>& copies,
                                       std::vector<OrderingPair> pairs, const CouplingOptions& opts) {
  CoupledEngine engine(spec, gU, gV, seed, copies, std::move(pairs), opts);
  return engine.run();
}

CoupledRun coupled_run_low(const NetworkSpec& spec, const RateFunction& gU, const RateFunction& gV,
                           std::uint64_t seed, const CouplingOptions& opts) {
  auto r = run_coupled_system(spec, gU, gV, seed, {ModelTag::LowerExternal, ModelTag::Internal}, {{0, 1}}, opts);
  return assemble(spec, r, 0, 1, -1, -1);
}

CoupledRun coupled_run_upp(const NetworkSpec& spec, const RateFunction& gU, const RateFunction& gV,
                           std::uint64_t seed, const CouplingOptions& opts) {
  auto r = run_coupled_system(spec, gU, gV, seed, {ModelTag::Isolated, ModelTag::UpperExternal}, {{0, 1}}, opts);
  return assemble(spec, r, -1, -1, 0, 1);
}

CoupledRun coupled_triple(const NetworkSpec& spec, const RateFunction& gU, const RateFunction& gV,
                          std::uint64_t seed, const CouplingOptions& opts) {
  auto r = run_coupled_system(
      spec, gU, gV, seed,
      {ModelTag::LowerExternal, ModelTag::Internal, ModelTag::Isolated, ModelTag::UpperExternal}, {{0, 1}, {2, 3}},
      opts);
  return assemble(spec, r, 0, 1, 2, 3);
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

bool sandwich_holds(const CoupledRun& run, double gap) {
  if (run.majorant_violated || !run.tau_low || !run.tau_int) return false;
  if (*run.tau_low > *run.tau_int) return false;
  if (run.tau_upp) return *run.tau_int <= *run.tau_upp + gap;
  // A censored upper copy transitions after its horizon.
  return run.has_upp && *run.tau_int <= run.horizon_upp;
}

SandwichSummary sandwich_stats(const NetworkSpec& spec, const RateFunction& gU, const RateFunction& gV,
                               std::uint64_t n, std::uint64_t seedbase, const CouplingOptions& opts) {
  SandwichSummary s;
  s.n = n;
  s.gap = 10.0 / rate_eval(gV, spec.gammaV * spec.r);
  s.runs.resize(n);
  parallel_for(n, 0, [&](std::uint64_t k) { s.runs[k] = coupled_triple(spec, gU, gV, replica_seed(seedbase, k), opts); });
  const double T_U = spec.gammaU / (spec.c - spec.rho(Side::U)) * spec.r;
  for (const auto& run : s.runs) {
    if (sandwich_holds(run, s.gap)) ++s.successes;
    if (run.good_int && run.tau_low && *run.tau_low <= T_U && run.tau_int && !run.majorant_violated) {
      ++s.ordered_low_runs;
      if (run.violations_low > 0) ++s.violated_low_runs;
    }
    if (run.good_iso && !run.coupling_undefined && !run.majorant_violated) {
      ++s.ordered_upp_runs;
      if (run.violations_upp > 0) ++s.violated_upp_runs;
    }
  }
  s.probability = n ? static_cast<double>(s.successes) / static_cast<double>(n) : 0.0;
  s.ci = wilson_interval(s.successes, n);
  return s;
}

}  // namespace qcsma
