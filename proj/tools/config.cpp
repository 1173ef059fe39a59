#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qcsma/error.hpp"
#include "qcsma/io.hpp"

namespace qcsma::cli {

namespace {

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.is_null() ? std::string("config") : "line " + std::to_string(m.line + 1);
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) {
  throw Error(ErrorCode::ParseError, where(n) + ": " + msg);
}

void require_map(const YAML::Node& n, std::string_view section) {
  if (!n.IsMap()) fail(n, "section '" + std::string(section) + "' must be a mapping");
}

void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed, std::string_view section) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(kv.first, "unknown key '" + key + "' in " + std::string(section));
  }
}

template <class T>
void read(const YAML::Node& map, const char* key, T& out) {
  const YAML::Node n = map[key];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, std::string("bad value for key '") + key + "'");
  }
}

template <class T>
T need(const YAML::Node& map, const char* key, std::string_view section) {
  if (!map[key]) fail(map, std::string("missing key '") + key + "' in " + std::string(section));
  T v{};
  read(map, key, v);
  return v;
}

SlowlyVarying parse_modulation(const YAML::Node& n) {
  require_map(n, "modulation");
  const auto kind = need<std::string>(n, "kind", "modulation");
  if (kind == "log_power") {
    check_keys(n, {"kind", "exponent"}, "modulation");
    LogPower l;
    read(n, "exponent", l.exponent);
    return l;
  }
  if (kind == "constant") {
    check_keys(n, {"kind", "value"}, "modulation");
    ConstantModulation m;
    read(n, "value", m.value);
    return m;
  }
  fail(n["kind"], "unknown modulation kind '" + kind + "'");
}

RateFunction parse_rate(const YAML::Node& n, std::string_view section) {
  require_map(n, section);
  const auto kind = need<std::string>(n, "kind", section);
  if (kind == "power") {
    check_keys(n, {"kind", "G", "beta"}, section);
    PowerLaw p;
    read(n, "G", p.G);
    read(n, "beta", p.beta);
    return p;
  }
  if (kind == "power_slowly_varying") {
    check_keys(n, {"kind", "beta", "modulation"}, section);
    PowerSlowlyVarying p;
    read(n, "beta", p.beta);
    if (n["modulation"]) p.modulation = parse_modulation(n["modulation"]);
    return p;
  }
  if (kind == "slowly_varying") {
    check_keys(n, {"kind", "modulation"}, section);
    SlowlyVaryingOnly s;
    if (n["modulation"]) s.modulation = parse_modulation(n["modulation"]);
    return s;
  }
  if (kind == "tabulated") {
    check_keys(n, {"kind", "points"}, section);
    Tabulated t;
    const YAML::Node pts = n["points"];
    if (!pts || !pts.IsSequence()) fail(n, "tabulated rate needs a 'points' sequence");
    for (const auto& p : pts) {
      if (!p.IsSequence() || p.size() != 2) fail(p, "each point must be [x, g]");
      try {
        t.points.emplace_back(p[0].as<double>(), p[1].as<double>());
      } catch (const YAML::Exception&) {
        fail(p, "non-numeric tabulated point");
      }
    }
    return t;
  }
  fail(n["kind"], "unknown rate kind '" + kind + "'");
}

void emit_num(YAML::Emitter& e, const char* key, double v) { e << YAML::Key << key << YAML::Value << format_number(v); }

void emit_modulation(YAML::Emitter& e, const SlowlyVarying& m) {
  e << YAML::Key << "modulation" << YAML::Value << YAML::BeginMap;
  if (const auto* l = std::get_if<LogPower>(&m)) {
    e << YAML::Key << "kind" << YAML::Value << "log_power";
    emit_num(e, "exponent", l->exponent);
  } else {
    e << YAML::Key << "kind" << YAML::Value << "constant";
    emit_num(e, "value", std::get<ConstantModulation>(m).value);
  }
  e << YAML::EndMap;
}

void emit_rate(YAML::Emitter& e, const char* key, const RateFunction& g) {
  e << YAML::Key << key << YAML::Value << YAML::BeginMap;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          e << YAML::Key << "kind" << YAML::Value << "power";
          emit_num(e, "G", f.G);
          emit_num(e, "beta", f.beta);
        } else if constexpr (std::is_same_v<T, PowerSlowlyVarying>) {
          e << YAML::Key << "kind" << YAML::Value << "power_slowly_varying";
          emit_num(e, "beta", f.beta);
          emit_modulation(e, f.modulation);
        } else if constexpr (std::is_same_v<T, SlowlyVaryingOnly>) {
          e << YAML::Key << "kind" << YAML::Value << "slowly_varying";
          emit_modulation(e, f.modulation);
        } else {
          e << YAML::Key << "kind" << YAML::Value << "tabulated";
          e << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
          for (const auto& [x, y] : f.points)
            e << YAML::Flow << YAML::BeginSeq << format_number(x) << format_number(y) << YAML::EndSeq;
          e << YAML::EndSeq;
        }
      },
      g);
  e << YAML::EndMap;
}

}  // namespace

RunConfig parse_config_text(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& ex) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(ex.mark.line + 1) + ": " + ex.msg);
  }
  RunConfig cfg;
  if (root.IsNull()) return cfg;
  require_map(root, "top level");
  check_keys(root, {"network", "g_U", "g_V", "run", "sweep", "coupling", "tube"}, "top level");

  if (const YAML::Node n = root["network"]) {
    require_map(n, "network");
    check_keys(n, {"size_U", "size_V", "gamma_U", "gamma_V", "lambda_U", "lambda_V", "mu", "c", "r", "delta"},
               "network");
    auto& s = cfg.network;
    read(n, "size_U", s.sizeU);
    read(n, "size_V", s.sizeV);
    read(n, "gamma_U", s.gammaU);
    read(n, "gamma_V", s.gammaV);
    read(n, "lambda_U", s.lambdaU);
    read(n, "lambda_V", s.lambdaV);
    read(n, "mu", s.mu);
    read(n, "c", s.c);
    read(n, "r", s.r);
    read(n, "delta", s.delta);
  }
  if (root["g_U"]) cfg.gU = parse_rate(root["g_U"], "g_U");
  if (root["g_V"]) cfg.gV = parse_rate(root["g_V"], "g_V");

  if (const YAML::Node n = root["run"]) {
    require_map(n, "run");
    check_keys(n,
               {"model", "freeze_time", "frozen_rates", "replicas", "seed", "horizon_mult", "sample_dt",
                "output_dir", "trajectories"},
               "run");
    if (n["model"]) {
      const auto name = need<std::string>(n, "model", "run");
      const auto tag = parse_model_tag(name);
      if (!tag) fail(n["model"], "unknown model '" + name + "'");
      cfg.model = ModelKind{*tag, 0.0, std::nullopt};
    }
    read(n, "freeze_time", cfg.model.freeze_time);
    if (const YAML::Node fr = n["frozen_rates"]) {
      require_map(fr, "frozen_rates");
      check_keys(fr, {"r_U", "r_V"}, "frozen_rates");
      FrozenRates rates;
      read(fr, "r_U", rates.rU);
      read(fr, "r_V", rates.rV);
      cfg.model.rates = rates;
    }
    if ((n["freeze_time"] || n["frozen_rates"]) && cfg.model.tag != ModelTag::Frozen)
      fail(n, "freeze_time and frozen_rates apply to the frozen model only");
    read(n, "replicas", cfg.replicas);
    read(n, "seed", cfg.seed);
    read(n, "horizon_mult", cfg.horizon_mult);
    read(n, "sample_dt", cfg.sample_dt);
    read(n, "output_dir", cfg.output_dir);
    read(n, "trajectories", cfg.trajectories);
  }
  if (const YAML::Node n = root["sweep"]) {
    require_map(n, "sweep");
    check_keys(n, {"r_values", "replicas"}, "sweep");
    read(n, "r_values", cfg.sweep_r);
    read(n, "replicas", cfg.sweep_replicas);
  }
  if (const YAML::Node n = root["coupling"]) {
    require_map(n, "coupling");
    check_keys(n, {"delta_prime"}, "coupling");
    read(n, "delta_prime", cfg.delta_prime);
  }
  if (const YAML::Node n = root["tube"]) {
    require_map(n, "tube");
    check_keys(n, {"eps1", "eps2"}, "tube");
    if (n["eps1"]) cfg.eps1 = need<double>(n, "eps1", "tube");
    if (n["eps2"]) cfg.eps2 = need<double>(n, "eps2", "tube");
  }

  validate(cfg.network);
  check_rate_function(cfg.gU);
  check_rate_function(cfg.gV);
  if (cfg.replicas < 1) throw Error(ErrorCode::InvalidSpec, "replicas must be at least 1");
  if (!(cfg.horizon_mult >= 1.0)) throw Error(ErrorCode::InvalidSpec, "horizon_mult must be at least 1");
  if (!(cfg.sample_dt >= 0.0)) throw Error(ErrorCode::InvalidSpec, "sample_dt must be nonnegative");
  if (!(cfg.delta_prime >= 0.0)) throw Error(ErrorCode::InvalidSpec, "delta_prime must be nonnegative");
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  const auto& s = cfg.network;
  e << YAML::Key << "network" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "size_U" << YAML::Value << s.sizeU;
  e << YAML::Key << "size_V" << YAML::Value << s.sizeV;
  emit_num(e, "gamma_U", s.gammaU);
  emit_num(e, "gamma_V", s.gammaV);
  emit_num(e, "lambda_U", s.lambdaU);
  emit_num(e, "lambda_V", s.lambdaV);
  emit_num(e, "mu", s.mu);
  emit_num(e, "c", s.c);
  emit_num(e, "r", s.r);
  emit_num(e, "delta", s.delta);
  e << YAML::EndMap;
  emit_rate(e, "g_U", cfg.gU);
  emit_rate(e, "g_V", cfg.gV);

  e << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "model" << YAML::Value << std::string(to_string(cfg.model.tag));
  if (cfg.model.tag == ModelTag::Frozen) {
    if (cfg.model.rates) {
      e << YAML::Key << "frozen_rates" << YAML::Value << YAML::BeginMap;
      emit_num(e, "r_U", cfg.model.rates->rU);
      emit_num(e, "r_V", cfg.model.rates->rV);
      e << YAML::EndMap;
    }
    emit_num(e, "freeze_time", cfg.model.freeze_time);
  }
  e << YAML::Key << "replicas" << YAML::Value << cfg.replicas;
  e << YAML::Key << "seed" << YAML::Value << cfg.seed;
  emit_num(e, "horizon_mult", cfg.horizon_mult);
  emit_num(e, "sample_dt", cfg.sample_dt);
  e << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted << cfg.output_dir;
  e << YAML::Key << "trajectories" << YAML::Value << cfg.trajectories;
  e << YAML::EndMap;

  e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "r_values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double r : cfg.sweep_r) e << format_number(r);
  e << YAML::EndSeq;
  e << YAML::Key << "replicas" << YAML::Value << cfg.sweep_replicas;
  e << YAML::EndMap;

  e << YAML::Key << "coupling" << YAML::Value << YAML::BeginMap;
  emit_num(e, "delta_prime", cfg.delta_prime);
  e << YAML::EndMap;

  if (cfg.eps1 || cfg.eps2) {
    e << YAML::Key << "tube" << YAML::Value << YAML::BeginMap;
    if (cfg.eps1) emit_num(e, "eps1", *cfg.eps1);
    if (cfg.eps2) emit_num(e, "eps2", *cfg.eps2);
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace qcsma::cli
