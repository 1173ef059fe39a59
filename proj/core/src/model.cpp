#include "qcsma/model.hpp"

#include <sstream>

#include "qcsma/error.hpp"

namespace qcsma {

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::Internal: return "internal";
    case ModelTag::External: return "external";
    case ModelTag::LowerExternal: return "lower_external";
    case ModelTag::UpperExternal: return "upper_external";
    case ModelTag::Isolated: return "isolated";
    case ModelTag::Frozen: return "frozen";
  }
  return "internal";
}

std::optional<ModelTag> parse_model_tag(std::string_view name) {
  for (auto tag : {ModelTag::Internal, ModelTag::External, ModelTag::LowerExternal, ModelTag::UpperExternal,
                   ModelTag::Isolated, ModelTag::Frozen}) {
    if (to_string(tag) == name) return tag;
  }
  if (name == "lower") return ModelTag::LowerExternal;
  if (name == "upper") return ModelTag::UpperExternal;
  return std::nullopt;
}

RateSchedule schedule_for(const ModelKind& model, Side side, const NetworkSpec& spec) {
  const double dr = spec.delta * spec.r;
  const double a = spec.gamma(side) * spec.r;
  const double b = side == Side::U ? -(spec.c - spec.rho(Side::U)) : spec.rho(Side::V);
  RateSchedule s;
  switch (model.tag) {
    case ModelTag::External:
      s = {a, b, std::nullopt};
      break;
    case ModelTag::LowerExternal:
      s = {side == Side::U ? a - dr : a + dr, b, std::nullopt};
      break;
    case ModelTag::UpperExternal:
      s = {side == Side::U ? a + 2.0 * dr : a - dr, b, std::nullopt};
      break;
    case ModelTag::Frozen:
      if (model.rates) {
        s.constant = side == Side::U ? model.rates->rU : model.rates->rV;
      } else {
        s = {a + b * model.freeze_time, 0.0, std::nullopt};
      }
      break;
    case ModelTag::Internal:
    case ModelTag::Isolated:
      throw Error(ErrorCode::InvalidSpec, "queue-driven models have no deterministic rate schedule");
  }
  return s;
}

double frozen_rate(const NetworkSpec& spec, const RateFunction& g, Side side, double s) {
  const double b = side == Side::U ? -(spec.c - spec.rho(Side::U)) : spec.rho(Side::V);
  return rate_eval(g, spec.gamma(side) * spec.r + b * s);
}

double activation_rate(const ModelKind& model, Side side, double t, double q, const NetworkSpec& spec,
                       const RateFunction& gU, const RateFunction& gV, double upper_slack) {
  const RateFunction& g = side == Side::U ? gU : gV;
  if (queue_driven(model.tag)) return rate_eval(g, q);
  const double T_U = spec.gammaU / (spec.c - spec.rho(Side::U)) * spec.r;
  if (model.tag == ModelTag::UpperExternal && t > T_U * (1.0 + upper_slack)) {
    std::ostringstream os;
    os << "upper external model is defined up to " << T_U * (1.0 + upper_slack) << ", got t=" << t;
    throw Error(ErrorCode::HorizonExceeded, os.str());
  }
  if (model.tag == ModelTag::Frozen && !model.rates && (model.freeze_time < 0.0 || model.freeze_time >= T_U))
    throw Error(ErrorCode::InvalidSpec, "freeze time must lie in [0, T_U)");
  const RateSchedule s = schedule_for(model, side, spec);
  if (s.constant) return *s.constant;
  return rate_eval(g, s.offset + s.slope * t);
}

}  // namespace qcsma
