#include <cstdlib>
#include <iostream>

#include <unistd.h>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Queue-based CSMA transition-time simulator", "qcsma"};
  app.require_subcommand(1);
  qcsma::cli::CommandLine cmd;

  std::string config, out, model;
  std::uint64_t seed = 0, replicas = 0;
  double r = 0.0;

  const std::pair<const char*, const char*> subs[] = {
      {"theory", "Closed-form and numeric critical time scale, limit law curve"},
      {"simulate", "Replica batch of one model"},
      {"couple", "Coupled lower, internal, isolated and upper copies"},
      {"sweep", "Mean transition time over an r grid with a log-log fit"},
      {"validate", "Full acceptance suite with a byte-level determinism check"},
  };
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "YAML or JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--replicas", replicas, "Replica count");
    sub->add_option("--model", model, "internal, external, lower_external, upper_external, isolated or frozen");
    sub->add_option("--r", r, "Scale parameter r");
    sub->add_flag("--trajectories", cmd.trajectories, "Write trajectory CSVs for the first replicas");
  }
  CLI11_PARSE(app, argc, argv);

  for (auto* sub : app.get_subcommands()) {
    cmd.subcommand = sub->get_name();
    if (sub->count("--config")) cmd.config = config;
    if (sub->count("--out")) cmd.out = out;
    if (sub->count("--seed")) cmd.seed = seed;
    if (sub->count("--replicas")) cmd.replicas = replicas;
    if (sub->count("--model")) cmd.model = model;
    if (sub->count("--r")) cmd.r = r;
  }
  cmd.color = std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO);
  return qcsma::cli::dispatch(cmd, std::cout, std::cerr);
}
