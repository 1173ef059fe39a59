#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "acceptance.hpp"
#include "json.hpp"
#include "qcsma/coupling.hpp"
#include "qcsma/error.hpp"
#include "qcsma/harness.hpp"
#include "qcsma/io.hpp"
#include "qcsma/rng.hpp"
#include "qcsma/theory.hpp"

namespace qcsma::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kMaxTrajectoryFiles = 32;

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + p.string());
  out << text;
}

fs::path output_dir(const CommandLine& cmd, const RunConfig& cfg) {
  fs::path dir = cmd.out ? *cmd.out : fs::path(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

SimOptions sim_options(const RunConfig& cfg) {
  SimOptions o;
  o.horizon_mult = cfg.horizon_mult;
  o.sample_dt = cfg.sample_dt;
  return o;
}

ordered_json mean_json(const ReplicaBatch& batch) {
  ordered_json j;
  j["n"] = batch.n;
  j["uncensored"] = batch.uncensored();
  std::uint64_t failed = 0;
  for (const auto& e : batch.entries) failed += e.error.has_value();
  j["errors"] = failed;
  try {
    const auto m = estimate_mean(batch);
    j["mean_tau"] = m.mean;
    j["se"] = m.se;
    j["ci95"] = {m.ci_lo, m.ci_hi};
    j["censored_fraction"] = m.censored_fraction;
    j["censoring_flag"] = m.censored_fraction > 0.01;
  } catch (const Error& e) {
    j["mean_tau"] = nullptr;
    j["estimate_error"] = e.what();
  }
  return j;
}

int cmd_theory(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  DerivedConstants dc = validate(cfg.network);
  if (cfg.eps1 || cfg.eps2)
    dc.deviation = deviation_constants(cfg.network, cfg.eps1.value_or(kDefaultEps1),
                                       cfg.eps2.value_or(default_eps2(cfg.network)));
  const TheoryReport th = closed_form_Mc(cfg.network, cfg.gU);
  const double Mn = solve_Mc_numeric(cfg.network, cfg.gU);
  write_file(dir / "theory.json", theory_json(th, dc, Mn) + "\n");
  std::ostringstream csv;
  csv << "x,P\n";
  const double x_max = th.C ? 3.0 / *th.C : 5.0;
  const auto steps = static_cast<long>(std::floor(x_max * 100.0 + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    const double x = static_cast<double>(k) / 100.0;
    csv << format_number(x) << ',' << format_number(limit_law_P(th, x)) << '\n';
  }
  write_file(dir / "limit_law.csv", csv.str());
  out << "regime " << to_string(th.regime) << ", M_c " << format_number(th.Mc) << ", F_c "
      << format_number(th.Fc);
  if (th.C) out << ", C " << format_number(*th.C);
  out << ", numeric M_c " << format_number(Mn) << '\n';
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const SimOptions opts = sim_options(cfg);
  const auto batch = run_replicas(cfg.network, cfg.model, cfg.gU, cfg.gV, cfg.replicas, cfg.seed, opts);
  std::ostringstream jl;
  for (const auto& e : batch.entries) {
    if (e.error) {
      ordered_json j = ordered_json::parse(report_json(e.report));
      j["error"] = *e.error;
      jl << j.dump() << '\n';
    } else {
      jl << report_json(e.report) << '\n';
    }
  }
  write_file(dir / "reports.jsonl", jl.str());
  ordered_json summary = mean_json(batch);
  summary["model"] = std::string(to_string(cfg.model.tag));
  summary["seed"] = cfg.seed;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  if (cfg.trajectories) {
    SimOptions t = opts;
    t.record_snapshots = true;
    const std::uint64_t k_max = std::min<std::uint64_t>(kMaxTrajectoryFiles, cfg.replicas);
    for (std::uint64_t k = 0; k < k_max; ++k) {
      const auto traj = simulate_run(cfg.network, cfg.model, cfg.gU, cfg.gV, replica_seed(cfg.seed, k), t);
      std::ostringstream csv;
      write_trajectory_csv(csv, traj, cfg.network);
      char name[40];
      std::snprintf(name, sizeof name, "trajectory_%04llu.csv", static_cast<unsigned long long>(k));
      write_file(dir / name, csv.str());
    }
  }
  out << "replicas " << batch.n << ", uncensored " << batch.uncensored();
  if (!summary["mean_tau"].is_null())
    out << ", mean tau " << format_number(summary["mean_tau"].get<double>()) << " (se "
        << format_number(summary["se"].get<double>()) << ")";
  out << '\n';
  return 0;
}

int cmd_couple(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  CouplingOptions co;
  co.horizon_mult = cfg.horizon_mult;
  co.delta_prime = cfg.delta_prime;
  const auto st = sandwich_stats(cfg.network, cfg.gU, cfg.gV, cfg.replicas, cfg.seed, co);
  std::ostringstream jl;
  std::uint64_t good = 0, majorant = 0, undefined = 0;
  for (const auto& run : st.runs) {
    jl << coupled_run_json(run) << '\n';
    good += run.on_good_event();
    majorant += run.majorant_violated;
    undefined += run.coupling_undefined;
  }
  write_file(dir / "coupled.jsonl", jl.str());
  ordered_json j;
  j["n"] = st.n;
  j["successes"] = st.successes;
  j["probability"] = st.probability;
  j["wilson95"] = {st.ci.lo, st.ci.hi};
  j["gap_allowance"] = st.gap;
  j["good_runs"] = good;
  j["ordered_low_runs"] = st.ordered_low_runs;
  j["violated_low_runs"] = st.violated_low_runs;
  j["ordered_upp_runs"] = st.ordered_upp_runs;
  j["violated_upp_runs"] = st.violated_upp_runs;
  j["majorant_violated_runs"] = majorant;
  j["coupling_undefined_runs"] = undefined;
  write_file(dir / "sandwich.json", j.dump(2) + "\n");
  out << "sandwich probability " << format_number(st.probability) << " [" << format_number(st.ci.lo) << ", "
      << format_number(st.ci.hi) << "], ordering violations " << st.violated_low_runs << " low, "
      << st.violated_upp_runs << " upper\n";
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  std::vector<SweepRow> rows;
  std::vector<std::pair<double, double>> pts;
  double target = 0.0;
  for (std::size_t i = 0; i < cfg.sweep_r.size(); ++i) {
    NetworkSpec s = cfg.network;
    s.r = cfg.sweep_r[i];
    validate(s);
    try {
      target = closed_form_Mc(s, cfg.gU).exponent;
    } catch (const Error&) {
      target = std::nan("");
    }
    const auto batch = run_replicas(s, cfg.model, cfg.gU, cfg.gV, cfg.sweep_replicas, mix_key({cfg.seed, i}),
                                    sim_options(cfg));
    const auto m = estimate_mean(batch);
    rows.push_back({s.r, batch.n, batch.n - batch.uncensored(), m.mean, m.se, target});
    pts.emplace_back(s.r, m.mean);
  }
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  write_file(dir / "sweep.csv", csv.str());
  const auto fit = exponent_fit(pts);
  ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["target_exponent"] = std::isnan(target) ? ordered_json(nullptr) : ordered_json(target);
  write_file(dir / "exponent_fit.json", j.dump(2) + "\n");
  out << "slope " << format_number(fit.slope) << ", R^2 " << format_number(fit.r2) << '\n';
  return 0;
}

int cmd_validate(const CommandLine& cmd, std::ostream& out, std::ostream& err) {
  AcceptanceOptions opts;
  opts.progress = &err;
  if (cmd.seed) opts.seed = *cmd.seed;
  if (cmd.out) opts.out_dir = *cmd.out;
  fs::create_directories(opts.out_dir);
  const auto results = run_acceptance(opts);
  bool all = true;
  for (const auto& r : results) {
    out << format_result(r, cmd.color) << '\n';
    all = all && r.pass;
  }
  return all ? 0 : 2;
}

}  // namespace

RunConfig resolve_config(const CommandLine& cmd) {
  RunConfig cfg = cmd.config ? parse_config(*cmd.config) : RunConfig{};
  if (cmd.seed) cfg.seed = *cmd.seed;
  if (cmd.replicas) {
    cfg.replicas = *cmd.replicas;
    cfg.sweep_replicas = *cmd.replicas;
  }
  if (cmd.model) {
    const auto tag = parse_model_tag(*cmd.model);
    if (!tag) throw Error(ErrorCode::ParseError, "unknown model '" + *cmd.model + "'");
    if (*tag != cfg.model.tag) cfg.model = ModelKind{*tag, 0.0, std::nullopt};
  }
  if (cmd.r) cfg.network.r = *cmd.r;
  if (cmd.trajectories) cfg.trajectories = true;
  if (cfg.replicas < 1) throw Error(ErrorCode::InvalidSpec, "replicas must be at least 1");
  validate(cfg.network);
  return cfg;
}

int dispatch(const CommandLine& cmd, std::ostream& out, std::ostream& err) {
  try {
    if (cmd.subcommand == "validate") return cmd_validate(cmd, out, err);
    const RunConfig cfg = resolve_config(cmd);
    const fs::path dir = output_dir(cmd, cfg);
    if (cmd.subcommand == "theory") return cmd_theory(cfg, dir, out);
    if (cmd.subcommand == "simulate") return cmd_simulate(cfg, dir, out);
    if (cmd.subcommand == "couple") return cmd_couple(cfg, dir, out);
    if (cmd.subcommand == "sweep") return cmd_sweep(cfg, dir, out);
    err << "unknown subcommand '" << cmd.subcommand << "'\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace qcsma::cli
