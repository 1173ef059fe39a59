#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qcsma/rate_function.hpp"
#include "qcsma/spec.hpp"

namespace qcsma {

enum class ModelTag { Internal, External, LowerExternal, UpperExternal, Isolated, Frozen };

struct FrozenRates {
  double rU = 1.0;
  double rV = 1.0;
  bool operator==(const FrozenRates&) const = default;
};

struct ModelKind {
  ModelTag tag = ModelTag::Internal;
  double freeze_time = 0.0;               // Frozen only
  std::optional<FrozenRates> rates;       // Frozen only: explicit constant rates

  static ModelKind internal() { return {ModelTag::Internal, 0.0, std::nullopt}; }
  static ModelKind external() { return {ModelTag::External, 0.0, std::nullopt}; }
  static ModelKind lower() { return {ModelTag::LowerExternal, 0.0, std::nullopt}; }
  static ModelKind upper() { return {ModelTag::UpperExternal, 0.0, std::nullopt}; }
  static ModelKind isolated() { return {ModelTag::Isolated, 0.0, std::nullopt}; }
  static ModelKind frozen_at(double s) { return {ModelTag::Frozen, s, std::nullopt}; }
  static ModelKind frozen_rates(double rU, double rV) {
    return {ModelTag::Frozen, 0.0, FrozenRates{rU, rV}};
  }

  bool operator==(const ModelKind&) const = default;
};

std::string_view to_string(ModelTag tag);
std::optional<ModelTag> parse_model_tag(std::string_view name);

// Queue-driven models: rates depend on the node's own queue and a queue
// reaching zero switches the node off.
inline bool queue_driven(ModelTag tag) {
  return tag == ModelTag::Internal || tag == ModelTag::Isolated;
}

// Activation rate argument a + b·t for the deterministic-rate models.
struct RateSchedule {
  double offset = 0.0;
  double slope = 0.0;
  std::optional<double> constant;  // explicit frozen rate, bypasses g
};

RateSchedule schedule_for(const ModelKind& model, Side side, const NetworkSpec& spec);

// Hazard of one inactive node of `side` at time t with own queue q.
// `upper_slack` extends the UpperExternal horizon to (1 + slack)·T_U.
double activation_rate(const ModelKind& model, Side side, double t, double q,
                       const NetworkSpec& spec, const RateFunction& gU,
                       const RateFunction& gV, double upper_slack = 0.0);

// r_U(s), r_V(s): frozen rates at freeze time s.
double frozen_rate(const NetworkSpec& spec, const RateFunction& g, Side side, double s);

}  // namespace qcsma
