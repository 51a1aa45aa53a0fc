#pragma once

// Subcommand execution: build coefficient objects from a parsed config,
// dispatch to the library, and emit the documented artifacts into the output
// directory. Headers and column orders here are the contract; tests compare
// bytes across runs.

#include "acceptance.hpp"
#include "config.hpp"
#include "criteria.hpp"
#include "critical.hpp"
#include "csv.hpp"
#include "gaps.hpp"
#include "profile.hpp"
#include "runner_json.hpp"
#include "solver.hpp"
#include "spectral.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

namespace oscilla {

namespace detail {

inline void ensure_dir(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw error("cannot create output directory " + out + ": " + ec.message());
}

inline double positive_number(const Config& cfg, const std::string& sec,
                              const std::string& key, double def) {
  const double x = cfg.number_or(sec, key, def);
  if (!(x > 0))
    throw config_error((cfg.has(sec, key) ? cfg.where_key(sec, key) : cfg.name() + ": ") +
                       "key '" + key + "' must be positive");
  return x;
}

inline SolveOptions solve_options(const Config& cfg, const std::string& sec) {
  SolveOptions o;
  o.rel_tol = positive_number(cfg, sec, "rel_tol", o.rel_tol);
  o.eps_floor = positive_number(cfg, sec, "eps_floor", o.eps_floor);
  o.cauchy_tol_scale = positive_number(cfg, sec, "cauchy_tol", o.cauchy_tol_scale);
  o.residual_tol_scale = positive_number(cfg, sec, "residual_tol", o.residual_tol_scale);
  o.zero_refine_tol = positive_number(cfg, sec, "zero_refine_tol", o.zero_refine_tol);
  return o;
}

inline std::optional<GrowthEnvelope> envelope_for(const Config& cfg,
                                                  const CoefficientProfile& v) {
  if (cfg.has_section("envelope")) return envelope_from_config(cfg, "envelope");
  return v.natural_envelope();
}

}  // namespace detail

// track CSV (t, z, flux, y, is_near_zero) + zeros CSV (index, location,
// bracket_width, ratio) where ratio divides consecutive zero locations.
inline void run_solve(const Config& cfg, const std::string& out) {
  detail::ensure_dir(out);
  const auto v = profile_from_config(cfg, "volume");
  const auto A = profile_from_config(cfg, "potential");
  const double z0 = detail::positive_number(cfg, "solve", "z0", 1.0);
  const double horizon = detail::positive_number(cfg, "solve", "horizon", 0.0);
  const auto track =
      riccati_track(Solver::solve_auto(v, A, z0, horizon, detail::solve_options(cfg, "solve")));
  CsvWriter tcsv(out + "/solve_track.csv", {"t", "z", "flux", "y", "is_near_zero"});
  const auto& T = track.grid();
  for (size_t i = 0; i < T.size(); ++i)
    tcsv.row({T[i], track.z_values()[i], track.flux_values()[i], track.riccati_values()[i],
              double(track.near_zero_flags()[i])});
  CsvWriter zcsv(out + "/solve_zeros.csv", {"index", "location", "bracket_width", "ratio"});
  const auto& zs = track.zeros();
  for (size_t k = 0; k < zs.size(); ++k)
    zcsv.row({double(zs[k].index), zs[k].location, zs[k].bracket_hi - zs[k].bracket_lo,
              k > 0 ? zs[k].location / zs[k - 1].location : qnan});
  std::cout << "solve: " << T.size() << " nodes, " << zs.size() << " zero(s), residual "
            << format_number(track.max_residual()) << ", " << track.eps_history().size()
            << " ladder rung(s)\n";
}

// critical CSV (t, chi, chi_f, chi_tilde_f, tail_integral); envelope columns
// are NaN when no envelope applies.
inline void run_critical(const Config& cfg, const std::string& out) {
  detail::ensure_dir(out);
  const auto v = profile_from_config(cfg, "volume");
  const double R = cfg.number_or("critical", "R", inf);
  const double t_min = detail::positive_number(cfg, "critical", "t_min", 1e-2);
  const double t_max = cfg.number_or("critical", "t_max",
                                     R == inf ? 100.0 : R * (1 - 1e-6));
  const int points = static_cast<int>(cfg.integer_or("critical", "points", 256));
  if (!(t_max > t_min))
    throw config_error(cfg.name() + ": [critical] needs t_min < t_max");
  CriticalCurve curve(v, R, {t_min / 2, t_max, 2048});
  const auto env = detail::envelope_for(cfg, v);
  CsvWriter csv(out + "/critical.csv", {"t", "chi", "chi_f", "chi_tilde_f", "tail_integral"});
  for (double t : geomspace(t_min, t_max, points)) {
    double cf = qnan, ctf = qnan;
    if (env && t > env->domain_start()) {
      cf = chi_f(*env, t);
      ctf = chi_tilde_f(*env, t);
    }
    csv.row({t, curve(t), cf, ctf, curve.tail(t)});
  }
  std::cout << "critical: " << points << " samples on [" << format_number(t_min) << ", "
            << format_number(t_max) << "]\n";
}

// criteria report (criteria.json) + running quantities CSV
// (t, sqrt_potential_integral, sqrt_critical_integral, excess, hille_nehari).
inline void run_criteria(const Config& cfg, const std::string& out) {
  detail::ensure_dir(out);
  const auto v = profile_from_config(cfg, "volume");
  const auto A = profile_from_config(cfg, "potential");
  const double horizon = detail::positive_number(cfg, "criteria", "horizon", 0.0);
  CriteriaOptions opt;
  opt.t0 = cfg.number_or("criteria", "t0", 0.0);
  std::vector<CriterionReport> reports;
  if (cfg.has("criteria", "T") && cfg.has("criteria", "t"))
    reports.push_back(first_zero_test(v, A, cfg.number("criteria", "T"),
                                      cfg.number("criteria", "t"), opt));
  else
    reports.push_back(first_zero_scan(v, A, horizon, opt));
  reports.push_back(oscillation_test(v, A, horizon, opt));
  const auto env = detail::envelope_for(cfg, v);
  for (auto& r : sufficient_conditions(v, A, env, horizon, opt)) reports.push_back(r);
  if (v.reciprocal_integrable_at_infinity()) reports.push_back(hille_nehari_gap(v, A, horizon, opt));
  write_criteria_json(out + "/criteria.json", reports);

  const double t0 = opt.t0 > 0 ? opt.t0 : std::max(horizon * 1e-3, 10 * chi_eval_floor);
  // Both running integrals are anchored at t0 so the excess column is their
  // plain difference.
  CumulativeTable SA([&](double s) { return std::sqrt(A.eval(s, Side::mid)); }, t0,
                     horizon, 512, A.breakpoints());
  std::optional<CriticalCurve> curve;
  if (v.reciprocal_integrable_at_infinity())
    curve.emplace(v, inf, CriticalCurve::CacheOptions{t0 / 2, horizon, 1024});
  CsvWriter csv(out + "/criteria_running.csv",
                {"t", "sqrt_potential_integral", "sqrt_critical_integral", "excess",
                 "hille_nehari"});
  for (double t : geomspace(t0, horizon, 256)) {
    const double sa = SA(t);
    double sc = qnan, hn = qnan;
    if (curve) {
      sc = curve->sqrt_chi_integral(t0, t);
      hn = std::sqrt(A.eval(t, Side::mid)) *
           std::exp(std::log(v.eval(t, Side::mid)) + std::log(curve->tail(t)));
    }
    csv.row({t, sa, sc, curve ? sa - sc : qnan, hn});
  }
  int held = 0;
  for (const auto& r : reports)
    if (r.verdict == Verdict::holds) ++held;
  std::cout << "criteria: " << reports.size() << " reports, " << held << " held\n";
}

// gaps CSV (tau, T1, T2, ratio, g3, g1, g2, g3p, g1p, g2p, bound).
inline void run_gaps(const Config& cfg, const std::string& out) {
  detail::ensure_dir(out);
  const auto v = profile_from_config(cfg, "volume");
  const auto A = profile_from_config(cfg, "potential");
  std::vector<double> taus;
  if (cfg.has("gaps", "tau")) {
    taus = cfg.number_list("gaps", "tau");
  } else {
    taus = geomspace(detail::positive_number(cfg, "gaps", "tau_min", 1.0),
                     detail::positive_number(cfg, "gaps", "tau_max", 100.0),
                     cfg.integer_or("gaps", "tau_count", 25));
  }
  if (!std::is_sorted(taus.begin(), taus.end()))
    throw config_error(cfg.name() + ": [gaps] tau grid must be sorted");
  GapOptions gopt;
  gopt.level = detail::positive_number(cfg, "gaps", "level", gopt.level);
  gopt.solve = detail::solve_options(cfg, "gaps");
  const auto records = gap_sweep(v, A, taus, gopt);
  double bound = qnan;
  if (cfg.has("gaps", "c") && cfg.has("gaps", "alpha"))
    bound = gap_bound(cfg.number("gaps", "c"), cfg.number("gaps", "alpha"));
  CsvWriter csv(out + "/gaps.csv",
                {"tau", "T1", "T2", "ratio", "g3", "g1", "g2", "g3p", "g1p", "g2p", "bound"});
  double limsup = 0;
  for (const auto& r : records) {
    csv.row({r.tau, r.T1, r.T2, r.ratio, r.g3, r.g1, r.g2, r.g3p, r.g1p, r.g2p, bound});
    if (r.tau >= taus.back() / 10) limsup = std::max(limsup, r.ratio);
  }
  std::cout << "gaps: " << records.size() << " tau points, last-decade ratio max "
            << format_number(limsup);
  if (std::isfinite(bound)) std::cout << " vs bound " << format_number(bound);
  std::cout << "\n";
}

// spectral CSV (R, lower, upper, fd, constant, c_star).
inline void run_spectral(const Config& cfg, const std::string& out) {
  detail::ensure_dir(out);
  const auto v = profile_from_config(cfg, "volume");
  auto env = detail::envelope_for(cfg, v);
  if (!env) throw config_error(cfg.name() + ": spectral needs an [envelope] section or an envelope-backed volume");
  const auto Rs = cfg.number_list("spectral", "R");
  const int m = static_cast<int>(cfg.integer_or("spectral", "m", 2));
  const bool with_fd = cfg.flag_or("spectral", "with_fd", true);
  SpectralOptions sopt;
  sopt.eps = detail::positive_number(cfg, "spectral", "eps", sopt.eps);
  CsvWriter csv(out + "/spectral.csv", {"R", "lower", "upper", "fd", "constant", "c_star"});
  for (double R : Rs) {
    const auto est = spectral_summary(v, *env, R, m, with_fd, sopt);
    csv.row({R, est.model_lower, est.upper_bound, est.fd_oracle, est.asymptotic_constant,
             est.c_star});
  }
  std::cout << "spectral: " << Rs.size() << " radii\n";
}

// Acceptance table to stdout plus verify.csv (id, name, pass); returns
// whether everything passed.
inline bool run_verify(std::uint64_t seed, const std::string& out) {
  detail::ensure_dir(out);
  const auto results = run_acceptance(seed);
  CsvWriter csv(out + "/verify.csv", {"id", "pass"});
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    csv.row({double(r.id), double(r.pass)});
    std::printf("%d. %-28s %s  (%.1f s)%s%s\n", r.id, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.seconds, r.detail.empty() ? "" : "  ",
                r.detail.c_str());
  }
  std::printf("%s\n", all ? "all criteria passed" : "FAILURES present");
  return all;
}

}  // namespace oscilla
