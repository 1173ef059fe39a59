#include "qcsma/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "json.hpp"

namespace qcsma {

namespace {

using nlohmann::ordered_json;

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const NetworkSpec& spec) {
  os << "t,node,side,active,queue\n";
  for (const auto& s : traj.snapshots) {
    for (std::size_t i = 0; i < s.queue.size(); ++i) {
      os << format_number(s.t) << ',' << i << ',' << (spec.side_of(static_cast<int>(i)) == Side::U ? 'U' : 'V')
         << ',' << static_cast<int>(s.active[i]) << ',' << format_number(s.queue[i]) << '\n';
    }
  }
}

std::string report_json(const TransitionReport& report) {
  ordered_json j;
  j["tau_bar"] = opt(report.tau_bar);
  j["tau"] = opt(report.tau);
  j["censored"] = report.censored();
  j["good_behavior"] = report.good_behavior;
  j["seed"] = report.seed;
  j["model"] = std::string(to_string(report.model.tag));
  return j.dump();
}

std::string coupled_run_json(const CoupledRun& run) {
  ordered_json j;
  j["seed"] = run.seed;
  j["tau_low"] = opt(run.tau_low);
  j["tau_int"] = opt(run.tau_int);
  j["tau_bar_iso"] = opt(run.tau_bar_iso);
  j["tau_bar_upp"] = opt(run.tau_bar_upp);
  j["tau_upp"] = opt(run.tau_upp);
  j["ordered_low"] = run.has_low ? ordered_json(run.violations_low == 0) : ordered_json(nullptr);
  j["ordered_upp"] = run.has_upp ? ordered_json(run.violations_upp == 0) : ordered_json(nullptr);
  j["good"] = run.on_good_event();
  j["censored_flags"] = {{"low", run.censored_low},
                         {"int", run.censored_int},
                         {"iso", run.censored_iso},
                         {"upp", run.censored_upp},
                         {"majorant_violated", run.majorant_violated},
                         {"coupling_undefined", run.coupling_undefined}};
  return j.dump();
}

std::string theory_json(const TheoryReport& report, const DerivedConstants& constants, double Mc_numeric) {
  ordered_json j;
  j["regime"] = std::string(to_string(report.regime));
  j["Mc"] = report.Mc;
  j["Mc_numeric"] = Mc_numeric;
  j["Fc"] = report.Fc;
  j["C"] = opt(report.C);
  j["exponent"] = report.exponent;
  j["alpha"] = report.alpha;
  j["Mc_window"] = opt(report.Mc_window);
  ordered_json c;
  c["rho_U"] = constants.rhoU;
  c["rho_V"] = constants.rhoV;
  c["alpha"] = constants.alpha;
  c["alpha_star"] = constants.alpha_star;
  c["alpha_star2"] = constants.alpha_star2;
  c["T_U"] = constants.T_U;
  c["T_U_star"] = constants.T_U_star;
  c["T_U_star2"] = constants.T_U_star2;
  c["K_delta_U"] = constants.K_delta_U;
  c["K_delta_V"] = constants.K_delta_V;
  if (constants.deviation) {
    const auto& d = *constants.deviation;
    c["deviation"] = {{"eps1", d.eps1}, {"eps2", d.eps2}, {"K1", d.K1},
                      {"K2", d.K2},     {"K3", d.K3},     {"K4", d.K4}};
  } else {
    c["deviation"] = nullptr;
  }
  j["constants"] = c;
  return j.dump(2);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "r,n,censored,mean_tau,se,slope_target\n";
  for (const auto& r : rows) {
    os << format_number(r.r) << ',' << r.n << ',' << r.censored << ',' << format_number(r.mean_tau) << ','
       << format_number(r.se) << ',' << format_number(r.slope_target) << '\n';
  }
}

void write_comparison_csv(std::ostream& os, const DistributionComparison& cmp, double x_max, double dx) {
  os << "x,empirical_survival,theory_survival\n";
  const auto steps = static_cast<long>(std::floor(x_max / dx + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    const double x = static_cast<double>(k) * dx;
    os << format_number(x) << ',' << format_number(cmp.empirical_survival(x)) << ','
       << format_number(limit_law_P(cmp.reference, x)) << '\n';
  }
}

}  // namespace qcsma
