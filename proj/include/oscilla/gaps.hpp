#pragma once

// Consecutive-zero gaps after a base point tau and the Riccati level-set
// decomposition of [tau, T2). Between zeros y = -v z'/z increases from -inf
// to +inf, so each level set against the threshold (default 1) is a single
// interval and the six lengths partition [tau, T1) u (T1, T2).
//
// The bound ((c+1)/(c-1))^{2/alpha} is compared against the empirical
// limsup of T2(tau)/tau, taken as the max over the last decade of tau.

#include "common.hpp"
#include "profile.hpp"
#include "solver.hpp"

#include <optional>

namespace oscilla {

struct GapRecord {
  double tau = qnan;
  double T1 = qnan;
  double T2 = qnan;
  double ratio = qnan;  // T2 / tau
  // Level-set lengths on [tau, T1): type 2 (y < -level), type 3 (|y| <= level),
  // type 1 (y > level); primes are the same on (T1, T2).
  double g2 = 0, g3 = 0, g1 = 0;
  double g2p = 0, g3p = 0, g1p = 0;
  double c = qnan;
  double alpha = qnan;
};

struct GapOptions {
  double level = 1.0;             // Riccati threshold; the bound is threshold-free
  double crossing_tol = 1e-9;     // bisection width for level crossings
  double initial_horizon_factor = 4.0;   // first solve: factor * max tau
  double hard_cap_factor = 4096.0;       // give up beyond factor * max tau
  SolveOptions solve;
};

struct GapBoundReport {
  double c = qnan, alpha = qnan;
  double bound = qnan;
  double limsup_estimate = qnan;  // max ratio over the last decade of tau
  double slack = 0.05;
  bool pass = false;
  std::vector<GapRecord> records;
};

inline double gap_bound(double c, double alpha) {
  if (!(c > 1)) throw parameter_error("gap_bound: c must exceed 1");
  if (!(alpha > 0)) throw parameter_error("gap_bound: alpha must be positive");
  return std::pow((c + 1) / (c - 1), 2.0 / alpha);
}

namespace detail {

// First grid index at or after x.
inline size_t first_node_at(const std::vector<double>& t, double x) {
  return static_cast<size_t>(std::lower_bound(t.begin(), t.end(), x) - t.begin());
}

// Bisect the interpolated y for the crossing of `level` inside (lo, hi),
// assuming y is increasing there and y(lo) < level < y(hi).
inline double crossing(const SolutionTrack& tr, double lo, double hi, double level, double tol) {
  while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    const double ym = tr.eval_riccati(mid);
    if (std::isnan(ym)) {
      // Masked band: y has already blown past every finite level.
      hi = mid;
      continue;
    }
    (ym < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Lengths of {y < -level}, {|y| <= level}, {y > level} on the open interval
// (a, b) between consecutive blow-ups, using monotonicity of y.
struct LevelLengths {
  double type2, type3, type1;
};

inline LevelLengths decompose_interval(const SolutionTrack& tr, double a, double b, double level,
                                       double tol) {
  const auto& T = tr.grid();
  // Walk nodes to bracket the two crossings; y is increasing on (a, b).
  double c_lo = a, c_hi = a;
  double prev_t = a;
  double prev_y = tr.eval_riccati(std::min(a + 1e-3 * (b - a), 0.5 * (a + b)));
  bool found_lo = std::isfinite(prev_y) && prev_y >= -level;
  bool found_hi = std::isfinite(prev_y) && prev_y > level;
  if (found_hi) c_hi = a;
  for (size_t i = first_node_at(T, a); !(found_lo && found_hi) && i < T.size() && T[i] < b;
       ++i) {
    const double y = tr.eval_riccati(T[i]);
    if (std::isnan(y)) {
      if (T[i] - a < 0.05 * (b - a)) continue;  // still inside the left masked band
      break;  // entering the right masked band: y is beyond +level from here on
    }
    if (!found_lo && y >= -level) {
      c_lo = prev_y < -level ? crossing(tr, prev_t, T[i], -level, tol) : a;
      found_lo = true;
    }
    if (!found_hi && y > level) {
      c_hi = prev_y <= level && found_lo ? crossing(tr, std::max(prev_t, c_lo), T[i], level, tol)
                                         : std::max(a, c_lo);
      found_hi = true;
      break;
    }
    prev_t = T[i];
    prev_y = y;
  }
  if (!found_lo) {
    // y never reached -level before the right blow-up band: the whole
    // interval is type 2 except the masked sliver; treat crossings at b.
    c_lo = b;
    c_hi = b;
  } else if (!found_hi) {
    c_hi = b;
  }
  LevelLengths L;
  L.type2 = c_lo - a;
  L.type3 = c_hi - c_lo;
  L.type1 = b - c_hi;
  return L;
}

}  // namespace detail

// Decompose one gap from a solved track; tau must be covered by the track
// and followed by at least two zeros.
inline GapRecord gap_record(const SolutionTrack& track, double tau, const GapOptions& opt = {}) {
  const auto& zs = track.zeros();
  const SolutionTrack tr = track.riccati_values().empty() ? riccati_track(track) : track;
  GapRecord rec;
  rec.tau = tau;
  size_t k = 0;
  while (k < zs.size() && zs[k].location <= tau) ++k;
  if (k + 1 >= zs.size())
    throw horizon_error("gap_record: fewer than two zeros after tau on this track");
  rec.T1 = zs[k].location;
  rec.T2 = zs[k + 1].location;
  rec.ratio = rec.T2 / rec.tau;
  const auto first = detail::decompose_interval(tr, tau, rec.T1, opt.level, opt.crossing_tol);
  const auto second = detail::decompose_interval(tr, rec.T1, rec.T2, opt.level, opt.crossing_tol);
  rec.g2 = first.type2;
  rec.g3 = first.type3;
  rec.g1 = first.type1;
  rec.g2p = second.type2;
  rec.g3p = second.type3;
  rec.g1p = second.type1;
  return rec;
}

// Sweep over tau values sharing one long track, growing the horizon until
// every tau is followed by two zeros.
inline std::vector<GapRecord> gap_sweep(const CoefficientProfile& v, const CoefficientProfile& A,
                                        std::vector<double> taus, GapOptions opt = {}) {
  if (taus.empty()) throw parameter_error("gap_sweep: need at least one tau");
  std::sort(taus.begin(), taus.end());
  if (!(taus.front() > 0)) throw parameter_error("gap_sweep: tau values must be positive");
  const double tmax = taus.back();
  const double cap = opt.hard_cap_factor * tmax;
  SolutionTrack track =
      Solver::solve_auto(v, A, 1.0, std::min(opt.initial_horizon_factor * tmax, cap), opt.solve);
  auto enough = [&] {
    int after = 0;
    for (const auto& z : track.zeros())
      if (z.location > tmax) ++after;
    return after >= 2;
  };
  while (!enough()) {
    const double next = track.horizon() * 1.5;
    if (next > cap)
      throw horizon_error("gap_sweep: horizon cap reached before two zeros after the last tau");
    track = Solver::extend(track, next);
  }
  const SolutionTrack tr = riccati_track(track);
  std::vector<GapRecord> out(taus.size());
  parallel_for(taus.size(), [&](size_t i) { out[i] = gap_record(tr, taus[i], opt); });
  return out;
}

// Check the sweep against the bound under the growth hypothesis
//   sqrt A >= c (a alpha / 2) t^{alpha-1} log^beta t  and  v <= f.
inline GapBoundReport verify_gap_bound(const CoefficientProfile& v, const CoefficientProfile& A,
                                       const GrowthEnvelope& f, double c,
                                       const std::vector<double>& taus, GapOptions opt = {}) {
  if (!(c > 1)) throw parameter_error("verify_gap_bound: c must exceed 1");
  if (taus.empty()) throw parameter_error("verify_gap_bound: need tau values");
  const double lo = std::max(f.domain_start() + 1e-6,
                             *std::min_element(taus.begin(), taus.end()) / 4);
  const double hi = *std::max_element(taus.begin(), taus.end());
  for (double t : geomspace(lo, hi, 512)) {
    const double logpow = f.beta() > 0 ? std::pow(std::log(t), f.beta()) : 1.0;
    const double rhs = c * (f.a() * f.alpha() / 2) * std::pow(t, f.alpha() - 1) * logpow;
    if (std::sqrt(A.eval(t, Side::mid)) < rhs * (1 - 1e-9))
      throw precondition_error("verify_gap_bound: sqrt A fails the growth hypothesis at t = " +
                               std::to_string(t));
    if (v.eval(t, Side::mid) > f.value(t) * (1 + 1e-9))
      throw precondition_error("verify_gap_bound: v exceeds the envelope at t = " +
                               std::to_string(t));
  }
  GapBoundReport rep;
  rep.c = c;
  rep.alpha = f.alpha();
  rep.bound = gap_bound(c, f.alpha());
  rep.records = gap_sweep(v, A, taus, opt);
  for (auto& r : rep.records) {
    r.c = c;
    r.alpha = f.alpha();
  }
  double top = 0;
  for (const auto& r : rep.records) top = std::max(top, r.tau);
  rep.limsup_estimate = -inf;
  for (const auto& r : rep.records)
    if (r.tau >= top / 10) rep.limsup_estimate = std::max(rep.limsup_estimate, r.ratio);
  rep.pass = rep.limsup_estimate <= rep.bound * (1 + rep.slack);
  return rep;
}

}  // namespace oscilla
