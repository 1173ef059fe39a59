#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace qcsma::cli {

struct CommandLine {
  std::string subcommand;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicas;
  std::optional<std::string> model;
  std::optional<double> r;
  bool trajectories = false;
  bool color = false;
};

// Loads the config file (defaults when absent) and applies command-line overrides.
RunConfig resolve_config(const CommandLine& cmd);

// Exit status: 0 success, 1 hard error, 2 acceptance criteria failed.
int dispatch(const CommandLine& cmd, std::ostream& out, std::ostream& err);

}  // namespace qcsma::cli
