#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcsma/model.hpp"
#include "qcsma/rate_function.hpp"
#include "qcsma/spec.hpp"

namespace qcsma::cli {

struct RunConfig {
  NetworkSpec network;
  RateFunction gU = PowerLaw{1.0, 1.0};
  RateFunction gV = PowerLaw{1.0, 2.0};

  ModelKind model = ModelKind::internal();
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 1;
  double horizon_mult = 3.0;
  double sample_dt = 0.0;  // 0 selects T_U/2048
  std::string output_dir = "qcsma-out";
  bool trajectories = false;

  std::vector<double> sweep_r = {500.0, 1000.0, 2000.0, 4000.0, 8000.0};
  std::uint64_t sweep_replicas = 500;

  double delta_prime = 0.05;
  std::optional<double> eps1;
  std::optional<double> eps2;

  bool operator==(const RunConfig&) const = default;
};

// Parses YAML (JSON is accepted as its subset). Unknown keys, malformed values
// and model invariant violations all raise qcsma::Error.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

// Canonical YAML rendering; parse_config_text(dump_config(c)) == c.
std::string dump_config(const RunConfig& cfg);

}  // namespace qcsma::cli
