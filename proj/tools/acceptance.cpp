#include "acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qcsma/coupling.hpp"
#include "qcsma/error.hpp"
#include "qcsma/harness.hpp"
#include "qcsma/io.hpp"
#include "qcsma/rng.hpp"
#include "qcsma/theory.hpp"
#include "qcsma/tube.hpp"

namespace qcsma::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// |U|=|V|=2, γ=1, λ=1, μ=2, c=1: ρ=1/2, α=2, T_U=2r.
NetworkSpec reference(double r, double delta) {
  NetworkSpec s;
  s.sizeU = 2;
  s.sizeV = 2;
  s.gammaU = 1.0;
  s.gammaV = 1.0;
  s.lambdaU = 1.0;
  s.lambdaV = 1.0;
  s.mu = 2.0;
  s.c = 1.0;
  s.r = r;
  s.delta = delta;
  return s;
}

double T_U(const NetworkSpec& s) { return s.gammaU / (s.c - s.rho(Side::U)) * s.r; }

CriterionResult frozen_oracle(std::uint64_t seed, const fs::path& dir, unsigned threads) {
  CriterionResult res{1, "frozen-rate oracle equivalence", true, ""};
  const double unit = exact_mean_hitting_time(FrozenChain(1, 1, 1.0, 1.0));
  const bool unit_ok = std::fabs(unit - 3.0) <= 1e-12;
  SplitMix64 g(mix_key({seed, 1, 0}));
  std::ostringstream csv;
  csv << "set,size_U,size_V,r_U,r_V,exact,mc_mean,se,z,censored\n";
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    NetworkSpec s = reference(1e6, 0.1);
    s.sizeU = 1 + static_cast<int>(g() % 3);
    s.sizeV = 1 + static_cast<int>(g() % 3);
    const double rU = 0.5 + 2.0 * uniform01(g);
    const double rV = 0.5 + 2.0 * uniform01(g);
    const double exact = exact_mean_hitting_time(FrozenChain(s.sizeU, s.sizeV, rU, rV));
    const auto batch = run_replicas(s, ModelKind::frozen_rates(rU, rV), PowerLaw{}, PowerLaw{}, 100000,
                                    mix_key({seed, 1, static_cast<std::uint64_t>(k) + 1}), {}, threads);
    const auto est = estimate_mean(batch);
    const double z = std::fabs(est.mean - exact) / est.se;
    const std::uint64_t cens = batch.n - batch.uncensored();
    worst = std::max(worst, z);
    if (z > 3.0 || cens > 0) res.pass = false;
    csv << k << ',' << s.sizeU << ',' << s.sizeV << ',' << format_number(rU) << ',' << format_number(rV) << ','
        << format_number(exact) << ',' << format_number(est.mean) << ',' << format_number(est.se) << ','
        << format_number(z) << ',' << cens << '\n';
  }
  res.pass = res.pass && unit_ok;
  res.detail = "1x1 unit oracle " + format_number(unit) + ", worst |z| " + num(worst) + " over 10 sets (n=1e5)";
  write_file(dir / "c01_frozen_oracle.csv", csv.str());
  return res;
}

CriterionResult asymptotic_mean(const fs::path& dir) {
  CriterionResult res{2, "asymptotic frozen mean", false, ""};
  const double rU = 1e3;
  const NetworkSpec s = reference(1e3, 0.1);
  const double exact = exact_mean_hitting_time(FrozenChain(2, 2, rU, rU * rU * rU));
  const double approx = mean_tau_frozen_asymptotic(s, rU);
  const double ratio = exact / approx;
  res.pass = ratio >= 0.9 && ratio <= 1.1;
  res.detail = "exact " + num(exact) + " / asymptotic " + num(approx) + " = " + num(ratio);
  write_file(dir / "c02_asymptotic_mean.csv", "exact,asymptotic,ratio\n" + format_number(exact) + "," +
                                                  format_number(approx) + "," + format_number(ratio) + "\n");
  return res;
}

CriterionResult trichotomy(std::uint64_t seed, const fs::path& dir, unsigned threads) {
  CriterionResult res{3, "trichotomy of limit laws", true, ""};
  const double betas[3] = {0.4, 1.0, 2.0};
  const double tol[3] = {0.05, 0.07, 0.10};
  std::string detail;
  for (int k = 0; k < 3; ++k) {
    const NetworkSpec s = reference(5000.0, 0.05);
    const RateFunction gU = PowerLaw{1.0, betas[k]};
    const RateFunction gV = PowerLaw{1.0, betas[k] + 1.0};
    const TheoryReport th = closed_form_Mc(s, gU);
    const auto batch = run_replicas(s, ModelKind::external(), gU, gV, 2000,
                                    mix_key({seed, 3, static_cast<std::uint64_t>(k)}), {}, threads);
    const auto cmp = survival_compare(batch, th);
    const bool ok = cmp.sup_distance <= tol[k];
    res.pass = res.pass && ok;
    std::ostringstream csv;
    write_comparison_csv(csv, cmp, 3.0, 0.01);
    write_file(dir / ("c03_survival_" + std::string(to_string(th.regime)) + ".csv"), csv.str());
    if (!detail.empty()) detail += "; ";
    detail += std::string(to_string(th.regime)) + " sup " + num(cmp.sup_distance) + (ok ? " <= " : " > ") +
              num(tol[k]);
  }
  res.detail = detail;
  return res;
}

CriterionResult scaling_exponent(std::uint64_t seed, const fs::path& dir, unsigned threads) {
  CriterionResult res{4, "scaling exponent of the internal model", true, ""};
  const std::vector<double> rs = {500.0, 1000.0, 2000.0, 4000.0, 8000.0};
  std::string detail;
  for (double beta : {0.4, 2.0}) {
    const RateFunction gU = PowerLaw{1.0, beta};
    const RateFunction gV = PowerLaw{1.0, beta + 1.0};
    std::vector<SweepRow> rows;
    std::vector<std::pair<double, double>> pts;
    double min_ratio = HUGE_VAL, max_ratio = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const NetworkSpec s = reference(rs[i], 0.05);
      const auto batch = run_replicas(s, ModelKind::internal(), gU, gV, 500,
                                      mix_key({seed, 4, static_cast<std::uint64_t>(beta * 10), i}), {}, threads);
      const auto est = estimate_mean(batch);
      rows.push_back({rs[i], batch.n, batch.n - batch.uncensored(), est.mean, est.se, closed_form_Mc(s, gU).exponent});
      pts.emplace_back(rs[i], est.mean);
      const double ratio = est.mean / (2.0 * rs[i]);
      min_ratio = std::min(min_ratio, ratio);
      max_ratio = std::max(max_ratio, ratio);
    }
    const auto fit = exponent_fit(pts);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_file(dir / ("c04_sweep_beta" + num(beta) + ".csv"), csv.str());
    bool ok;
    if (beta < 1.0) {
      ok = std::fabs(fit.slope - 0.4) <= 0.1;
      detail += "beta 0.4 slope " + num(fit.slope);
    } else {
      ok = std::fabs(fit.slope - 1.0) <= 0.05 && min_ratio >= 0.85 && max_ratio <= 1.05;
      detail += "; beta 2 slope " + num(fit.slope) + ", mean/(alpha r) in [" + num(min_ratio) + ", " +
                num(max_ratio) + "]";
    }
    res.pass = res.pass && ok;
  }
  res.detail = detail;
  return res;
}

CriterionResult sandwich(std::uint64_t seed, const fs::path& dir, unsigned threads) {
  (void)threads;
  CriterionResult res{5, "sandwich of lower, internal and upper transition times", false, ""};
  const NetworkSpec s = reference(2000.0, 0.05);
  const auto st = sandwich_stats(s, PowerLaw{1.0, 1.0}, PowerLaw{1.0, 2.0}, 1000, mix_key({seed, 5}));
  std::ostringstream jl;
  for (const auto& run : st.runs) jl << coupled_run_json(run) << '\n';
  write_file(dir / "c05_coupled.jsonl", jl.str());
  res.pass = st.probability >= 0.99 && st.violated_low_runs == 0 && st.violated_upp_runs == 0;
  res.detail = "P(sandwich) " + num(st.probability) + " [" + num(st.ci.lo) + ", " + num(st.ci.hi) +
               "], ordering violations " + std::to_string(st.violated_low_runs) + "/" +
               std::to_string(st.ordered_low_runs) + " low, " + std::to_string(st.violated_upp_runs) + "/" +
               std::to_string(st.ordered_upp_runs) + " upper";
  return res;
}

CriterionResult good_behavior(std::uint64_t seed, const fs::path& dir, unsigned threads) {
  CriterionResult res{6, "good-behavior tube probability", false, ""};
  const NetworkSpec s = reference(2000.0, 0.1);
  const auto batch =
      run_replicas(s, ModelKind::internal(), PowerLaw{1.0, 1.0}, PowerLaw{1.0, 2.0}, 1000, mix_key({seed, 6}), {},
                   threads);
  std::uint64_t good = 0;
  std::ostringstream jl;
  for (const auto& e : batch.entries) {
    good += e.report.good_behavior;
    jl << report_json(e.report) << '\n';
  }
  write_file(dir / "c06_reports.jsonl", jl.str());
  const double p = static_cast<double>(good) / static_cast<double>(batch.n);
  res.pass = p >= 0.99;
  res.detail = "P(E_delta) " + num(p) + " over " + std::to_string(batch.n) + " runs";
  return res;
}

CriterionResult coincidence(std::uint64_t seed, const fs::path& dir, unsigned threads) {
  CriterionResult res{7, "internal and isolated pre-transition coincidence", false, ""};
  const NetworkSpec s = reference(2000.0, 0.05);
  const RateFunction gU = PowerLaw{1.0, 1.0};
  const RateFunction gV = PowerLaw{1.0, 2.0};
  const std::uint64_t base = mix_key({seed, 7});
  const auto in = run_replicas(s, ModelKind::internal(), gU, gV, 1000, base, {}, threads);
  const auto iso = run_replicas(s, ModelKind::isolated(), gU, gV, 1000, base, {}, threads);
  std::uint64_t compared = 0, mismatched = 0;
  std::ostringstream csv;
  csv << "index,tau_bar_internal,tau_bar_isolated\n";
  for (std::size_t i = 0; i < in.entries.size(); ++i) {
    const auto& a = in.entries[i].report.tau_bar;
    const auto& b = iso.entries[i].report.tau_bar;
    csv << i << ',' << (a ? format_number(*a) : "") << ',' << (b ? format_number(*b) : "") << '\n';
    if (!a || *a > T_U(s)) continue;
    ++compared;
    if (!b || *a != *b) ++mismatched;
  }
  write_file(dir / "c07_coincidence.csv", csv.str());
  res.pass = mismatched == 0 && compared > 0;
  res.detail = std::to_string(mismatched) + " mismatches over " + std::to_string(compared) + " runs with tau_bar <= T_U";
  return res;
}

CriterionResult negligible_gap(std::uint64_t seed, const fs::path& dir, unsigned threads) {
  CriterionResult res{8, "negligible gap between pre-transition and transition", false, ""};
  const RateFunction gU = PowerLaw{1.0, 1.0};
  const RateFunction gV = PowerLaw{1.0, 1.0};
  GapStatistic gs[2];
  std::ostringstream csv;
  csv << "r,n,median_normalized,upper_quartile_normalized,raw_median\n";
  for (int k = 0; k < 2; ++k) {
    const NetworkSpec s = reference(2000.0 * (k + 1), 0.05);
    const auto batch = run_replicas(s, ModelKind::internal(), gU, gV, 1000,
                                    mix_key({seed, 8, static_cast<std::uint64_t>(k)}), {}, threads);
    gs[k] = gap_statistic(batch, gV, s);
    csv << format_number(s.r) << ',' << gs[k].n << ',' << format_number(gs[k].median) << ','
        << format_number(gs[k].upper_quartile) << ',' << format_number(gs[k].raw_median) << '\n';
  }
  write_file(dir / "c08_gap.csv", csv.str());
  const double factor = gs[0].raw_median / gs[1].raw_median;
  res.pass = gs[0].median <= 10.0 && factor >= 1.3 && factor <= 3.0;
  res.detail = "normalized median " + num(gs[0].median) + " at r=2000, raw median ratio r->2r " + num(factor);
  return res;
}

CriterionResult input_tube(std::uint64_t seed, const fs::path& dir) {
  CriterionResult res{9, "input-tube large deviation", false, ""};
  NetworkSpec s = reference(1000.0, 0.5);
  s.lambdaU = s.lambdaV = 1.0;
  s.mu = 1.0;
  s.c = 2.0;
  const double S = 200.0;
  const double freq = input_tube_exit_frequency(s, Side::U, S, 10000, mix_key({seed, 9}));
  const double bound = std::exp(-k_delta(s.lambdaU, s.mu, s.delta) * S / 2.0);
  res.pass = freq <= bound;
  res.detail = "exit frequency " + num(freq) + " vs bound " + num(bound);
  write_file(dir / "c09_input_tube.csv",
             "S,n,exit_frequency,bound\n200,10000," + format_number(freq) + "," + format_number(bound) + "\n");
  return res;
}

CriterionResult numeric_closed_form(const fs::path& dir) {
  CriterionResult res{10, "numeric versus closed-form critical scale", true, ""};
  std::ostringstream csv;
  csv << "beta,regime,Mc_closed,Mc_numeric,rel_diff,survival_sup_diff\n";
  std::string detail;
  for (double beta : {0.4, 1.0, 2.0}) {
    const NetworkSpec s = reference(1e6, 0.05);
    const RateFunction gU = PowerLaw{1.0, beta};
    const TheoryReport th = closed_form_Mc(s, gU);
    const double Mn = solve_Mc_numeric(s, gU);
    const double rel = std::fabs(Mn - th.Mc) / th.Mc;
    const double x_max = th.C ? std::min(1.0 / *th.C + 0.5, 6.0) : 3.0;
    double sup = 0.0;
    for (long i = 0; i <= static_cast<long>(x_max * 1000.0); ++i) {
      const double x = static_cast<double>(i) * 1e-3;
      const double S = survival_external_numeric(s, gU, th.Mc, x);
      // The reference law may jump; its left limit at x is part of the sup.
      const double left = x > 0.0 ? limit_law_P(th, std::nextafter(x, 0.0)) : 1.0;
      sup = std::max({sup, std::fabs(S - limit_law_P(th, x)), std::fabs(S - left)});
    }
    const bool ok = rel <= 0.02 && sup <= 1e-2;
    res.pass = res.pass && ok;
    csv << format_number(beta) << ',' << to_string(th.regime) << ',' << format_number(th.Mc) << ','
        << format_number(Mn) << ',' << format_number(rel) << ',' << format_number(sup) << '\n';
    if (!detail.empty()) detail += "; ";
    detail += std::string(to_string(th.regime)) + " rel " + num(rel) + " sup " + num(sup);
  }
  write_file(dir / "c10_numeric_closed_form.csv", csv.str());
  res.detail = detail;
  return res;
}

void report(std::ostream* progress, const CriterionResult& r) {
  if (progress) *progress << format_result(r, false) << '\n' << std::flush;
}

}  // namespace

std::string format_result(const CriterionResult& r, bool color) {
  std::string tag = r.pass ? "PASS" : "FAIL";
  if (color) tag = (r.pass ? "\x1b[32m" : "\x1b[31m") + tag + "\x1b[0m";
  char id[8];
  std::snprintf(id, sizeof id, "%2d", r.id);
  return "[" + tag + "] " + id + " " + r.title + ": " + r.detail;
}

std::vector<CriterionResult> run_statistical_criteria(std::uint64_t seed, const fs::path& dir, unsigned threads,
                                                      std::ostream* progress) {
  fs::create_directories(dir);
  std::vector<CriterionResult> out;
  auto add = [&](CriterionResult r) {
    report(progress, r);
    out.push_back(std::move(r));
  };
  add(frozen_oracle(seed, dir, threads));
  add(asymptotic_mean(dir));
  add(trichotomy(seed, dir, threads));
  add(scaling_exponent(seed, dir, threads));
  add(sandwich(seed, dir, threads));
  add(good_behavior(seed, dir, threads));
  add(coincidence(seed, dir, threads));
  add(negligible_gap(seed, dir, threads));
  add(input_tube(seed, dir));
  add(numeric_closed_form(dir));
  std::ostringstream rep;
  for (const auto& r : out) rep << format_result(r, false) << '\n';
  write_file(dir / "validate_report.txt", rep.str());
  return out;
}

std::vector<std::string> diff_trees(const fs::path& a, const fs::path& b) {
  auto listing = [](const fs::path& root) {
    std::vector<std::string> names;
    if (fs::exists(root))
      for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) names.push_back(fs::relative(e.path(), root).generic_string());
    std::sort(names.begin(), names.end());
    return names;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto la = listing(a), lb = listing(b);
  std::vector<std::string> all;
  std::set_union(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(all));
  std::vector<std::string> diff;
  for (const auto& name : all) {
    const bool ina = std::binary_search(la.begin(), la.end(), name);
    const bool inb = std::binary_search(lb.begin(), lb.end(), name);
    if (!ina || !inb || slurp(a / name) != slurp(b / name)) diff.push_back(name);
  }
  return diff;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  const fs::path a = opts.out_dir / "run-a";
  const fs::path b = opts.out_dir / "run-b";
  fs::remove_all(a);
  fs::remove_all(b);
  auto results = run_statistical_criteria(opts.seed, a, opts.threads, opts.progress);
  run_statistical_criteria(opts.seed, b, opts.threads, nullptr);
  const auto diff = diff_trees(a, b);
  CriterionResult det{11, "byte-identical repeated validation", diff.empty(), ""};
  det.detail = diff.empty() ? "run-a and run-b identical" : std::to_string(diff.size()) + " files differ, first " + diff.front();
  report(opts.progress, det);
  results.push_back(det);
  std::ostringstream rep;
  for (const auto& r : results) rep << format_result(r, false) << '\n';
  write_file(opts.out_dir / "validate_report.txt", rep.str());
  return results;
}

}  // namespace qcsma::cli
