#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qcsma/model.hpp"
#include "qcsma/rate_function.hpp"
#include "qcsma/spec.hpp"

namespace qcsma {

struct NodeState {
  Side side = Side::U;
  bool active = false;
  double queue = 0.0;
  double active_time = 0.0;    // T_i(t)
  double inactive_time = 0.0;  // W_i(t)
  long periods = 0;            // completed activity periods M_i(t)
  double input = 0.0;          // cumulative arrived work
  double drained = 0.0;        // cumulative served work
};

struct SystemState {
  double t = 0.0;
  std::vector<NodeState> nodes;
};

enum class EventKind { Arrival, ActivationAttempt, Deactivation, QueueHitZero };

struct EventRecord {
  double t = 0.0;
  int node = 0;
  EventKind kind = EventKind::Arrival;
  double size = 0.0;     // Arrival only
  bool success = true;   // ActivationAttempt only
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> queue;
  std::vector<std::uint8_t> active;
};

struct TransitionReport {
  std::optional<double> tau_bar;
  std::optional<double> tau;
  bool good_behavior = false;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  ModelKind model;

  bool censored() const { return !tau.has_value(); }
};

struct Trajectory {
  double sample_dt = 0.0;
  std::vector<Snapshot> snapshots;
  std::vector<EventRecord> events;
  SystemState final_state;
  TransitionReport report;
};

struct SimOptions {
  double horizon_mult = 3.0;
  double sample_dt = 0.0;        // 0 selects T_U/2048
  bool record_snapshots = false;
  bool record_events = false;
  bool stop_at_transition = true;
  double upper_slack = 0.0;      // UpperExternal runs until (1 + slack)·T_U
};

double default_sample_dt(const NetworkSpec& spec);

// One exact sample path from X(0) = u with queues γ_U r on U and γ_V r on V.
Trajectory simulate_run(const NetworkSpec& spec, const ModelKind& model, const RateFunction& gU,
                        const RateFunction& gV, std::uint64_t seed, const SimOptions& opts = {});

}  // namespace qcsma
