#pragma once

// Spectral-radius and index estimates on model volumes.
//
// Upper bounds: Rayleigh quotient of the solution on its first nodal annulus
// past R, driven by the inf-window potential
//
//   A_eps(r) = { inf_{t > r} [ -1/2 log int_t^inf ds/f ] / (t - r) }^2 + eps,
//
// which is nondecreasing, so the quotient never exceeds A_eps(T2). Lower
// bounds and the asymptotic constant come from the closed-form model family.
// A finite-difference eigenvalue oracle cross-checks both; it shares no code
// with the collocation solver on purpose.

#include "common.hpp"
#include "envelope.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "solver.hpp"

#include <vector>

namespace oscilla {

struct SpectralEstimate {
  double R = qnan;
  double upper_bound = qnan;          // Rayleigh quotient on the nodal annulus
  double model_lower = qnan;          // closed-form model bound at R
  double asymptotic_constant = qnan;  // minimized growth constant
  double fd_oracle = qnan;            // finite-difference cross-check
  double a = qnan, alpha = qnan, beta = qnan;
  int m = 0;
  double b_tilde = qnan;              // optimal weight exponent of the model bound
  double c_star = qnan;               // minimizer behind the asymptotic constant
  double T1 = qnan, T2 = qnan;        // nodal annulus used by the upper bound
  double quotient_cap = qnan;         // A_eps at T2, the analytic ceiling
  bool zero_branch = false;           // divergent reciprocal tail + infinite volume
  bool alpha_below_one = false;       // constant degenerates to 0
};

struct SpectralOptions {
  double eps = 5e-3;              // additive lift of the inf-window potential
  double window_factor = 256;     // inf window reach, times the base point
  int inf_grid = 96;              // coarse grid before golden refinement
  int table_nodes = 512;          // sampled potential resolution
  SolveOptions solve;
};

// inf_{t > r} of -1/2 log(int_t^inf ds/f) / (t - r). Sampled values can only
// sit above the true inf, which is the safe direction for every consumer.
inline double lemma_infimum(const GrowthEnvelope& f, double r, double window_factor = 256,
                            int grid = 96) {
  if (!(r > f.domain_start()))
    throw domain_error("lemma_infimum: base point below envelope domain");
  if (!(window_factor > 1) || grid < 8)
    throw parameter_error("lemma_infimum: window must exceed 1, grid at least 8");
  auto g = [&](double u) { return -0.5 * log_reciprocal_tail(f, r + u) / u; };
  const std::vector<double> us = geomspace(1e-6 * r, (window_factor - 1) * r, grid);
  double best = inf;
  size_t bi = 0;
  for (size_t i = 0; i < us.size(); ++i) {
    const double gv = g(us[i]);
    if (gv < best) {
      best = gv;
      bi = i;
    }
  }
  // Golden-section refinement between the neighbors of the grid minimum.
  double lo = us[bi == 0 ? 0 : bi - 1];
  double hi = us[std::min(us.size() - 1, bi + 1)];
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 80 && (hi - lo) > 1e-12 * hi; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = g(x2);
    }
  }
  return std::min(best, std::min(f1, f2));
}

// Sampled inf-window potential on [r_lo, r_hi]. The exact function is
// nondecreasing (larger base points see pointwise larger quotients over a
// smaller window); a running max irons out sub-tolerance sampling wobble.
inline CoefficientProfile spectral_potential(const GrowthEnvelope& f, double eps, double r_lo,
                                             double r_hi, const SpectralOptions& opt = {}) {
  if (!(eps > 0)) throw parameter_error("spectral_potential: eps must be positive");
  if (!(r_lo > f.domain_start()) || !(r_hi > r_lo))
    throw parameter_error("spectral_potential: need domain_start < r_lo < r_hi");
  const std::vector<double> ts = geomspace(r_lo, r_hi, opt.table_nodes);
  std::vector<double> vals(ts.size());
  parallel_for(ts.size(), [&](size_t i) {
    vals[i] = sq(lemma_infimum(f, ts[i], opt.window_factor, opt.inf_grid)) + eps;
  });
  for (size_t i = 1; i < vals.size(); ++i) vals[i] = std::max(vals[i], vals[i - 1]);
  return CoefficientProfile::sampled(ts, vals);
}

namespace detail {

template <class F>
double track_panel_quad(const SolutionTrack& tr, double a, double b, F f) {
  const auto& T = tr.grid();
  const size_t i0 = panel_index(T, a), i1 = panel_index(T, b);
  double acc = 0;
  for (size_t i = i0; i <= i1 && i + 1 < T.size(); ++i) {
    const double lo = std::max(a, T[i]), hi = std::min(b, T[i + 1]);
    if (hi > lo) acc += gk15(f, lo, hi).kronrod;
  }
  return acc;
}

}  // namespace detail

// Rayleigh quotient int (z')^2 v / int z^2 v on the first nodal annulus of
// the solution started at (z, vz') = (1, 0) from R. The potential must be
// nondecreasing for the analytic cap to apply; the sampled table from
// spectral_potential is.
inline SpectralEstimate rayleigh_upper(const CoefficientProfile& v,
                                       const CoefficientProfile& A_eps, double R,
                                       SpectralOptions opt = {}) {
  if (!(R > 0)) throw parameter_error("rayleigh_upper: R must be positive");
  const double cap = std::min(v.domain_end(), A_eps.domain_end());
  if (!(cap > R))
    throw precondition_error("rayleigh_upper: potential window must extend past R");
  SolutionTrack track =
      Solver::solve_from(v, A_eps, 1.0, 0.0, R, std::min(cap, R + std::max(8.0, 0.1 * R)),
                         opt.solve);
  while (track.zeros().size() < 2) {
    if (track.horizon() >= cap * (1 - 1e-12))
      throw horizon_error("rayleigh_upper: no nodal annulus before the potential window ends");
    track = Solver::extend(track, std::min(cap, track.horizon() * 1.5));
  }
  SpectralEstimate est;
  est.R = R;
  est.T1 = track.zeros()[0].location;
  est.T2 = track.zeros()[1].location;
  auto num_f = [&](double x) { return sq(track.eval_flux(x)) / v.eval(x, Side::mid); };
  auto den_f = [&](double x) { return sq(track.eval_z(x)) * v.eval(x, Side::mid); };
  const double num = detail::track_panel_quad(track, est.T1, est.T2, num_f);
  const double den = detail::track_panel_quad(track, est.T1, est.T2, den_f);
  est.upper_bound = num / den;
  est.quotient_cap = A_eps.eval(est.T2, Side::left);
  if (!(est.upper_bound <= est.quotient_cap * (1 + 1e-6)))
    throw accuracy_error("rayleigh_upper: quotient exceeded its analytic ceiling");
  return est;
}

// Envelope front end: builds the inf-window potential over a window sized by
// the eps-level oscillation wavelength, then takes the quotient. Volumes with
// divergent reciprocal tail and infinite total volume short-circuit to an
// exact zero bound (the eps ladder collapses in the limit).
inline SpectralEstimate rayleigh_upper(const CoefficientProfile& v, const GrowthEnvelope& f,
                                       double R, SpectralOptions opt = {}) {
  SpectralEstimate est;
  est.R = R;
  est.a = f.a();
  est.alpha = f.alpha();
  est.beta = f.beta();
  if (!v.reciprocal_integrable_at_infinity() && !v.integrable_at_infinity()) {
    est.upper_bound = 0;
    est.zero_branch = true;
    return est;
  }
  if (!(R > f.domain_start()))
    throw parameter_error("rayleigh_upper: R below the envelope domain");
  const double slack = 3.5 * pi / std::sqrt(opt.eps) + 8.0;
  const double r_hi = (R + slack) * 1.05;
  double r_lo = R * (1 - 1e-3);
  if (!(r_lo > f.domain_start())) r_lo = 0.5 * (R + f.domain_start());
  const CoefficientProfile A_eps = spectral_potential(f, opt.eps, r_lo, r_hi, opt);
  SpectralEstimate core = rayleigh_upper(v, A_eps, R, opt);
  est.upper_bound = core.upper_bound;
  est.T1 = core.T1;
  est.T2 = core.T2;
  est.quotient_cap = core.quotient_cap;
  return est;
}

struct PrincipaleResult {
  double value;
  double c_star;
  bool alpha_below_one = false;  // decay regime, constant degenerates to 0
  bool boundary_minimum = false; // alpha = 1: infimum attained only as c -> 1+
};

// min over c > 1 of (a^2 alpha^2 / 4) c^2 ((c+1)/(c-1))^{4(alpha-1)/alpha}.
// The growth constant is independent of the log exponent; beta is accepted
// for interface symmetry with the envelope.
inline PrincipaleResult principale_constant(double a, double alpha, double beta = 0) {
  if (!(a > 0) || !(alpha > 0) || !(beta >= 0))
    throw parameter_error("principale_constant: need a > 0, alpha > 0, beta >= 0");
  PrincipaleResult res{qnan, qnan};
  if (alpha < 1) {
    res.value = 0;
    res.alpha_below_one = true;
    return res;
  }
  if (alpha == 1) {
    // The exponent vanishes and c^2 decreases toward 1: exact infimum.
    res.value = a * a / 4;
    res.c_star = 1;
    res.boundary_minimum = true;
    return res;
  }
  // Stationarity: alpha (c + 1)(c - 1) = 4 (alpha - 1) c. Safeguarded Newton
  // on phi(c) = alpha (c^2 - 1) - 4 (alpha - 1) c, bracketed by sign.
  const double kappa = 4 * (alpha - 1) / alpha;
  double lo = 1.0, hi = kappa + 2.0;
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double phi = alpha * (c * c - 1) - 4 * (alpha - 1) * c;
    if (phi > 0)
      hi = c;
    else
      lo = c;
    const double dphi = 2 * alpha * c - 4 * (alpha - 1);
    double next = c - phi / dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - c) < 1e-15 * c) {
      c = next;
      break;
    }
    c = next;
  }
  res.c_star = c;
  res.value = (a * a * alpha * alpha / 4) * c * c *
              std::pow((c + 1) / (c - 1), 4 * (alpha - 1) / alpha);
  return res;
}

// Model eigenvalue density along the radius for weight exponent b in (0, a).
inline double lambda_b(double a, double alpha, double b, double r) {
  return alpha * alpha * b * (a - b) * std::pow(r, 2 * (alpha - 1)) +
         alpha * (alpha - 1) * b * std::pow(r, alpha - 2);
}

// Closed-form lower bound at radius R with the optimal admissible exponent.
// The curvature term of lambda_b is dropped: it is nonnegative, so the
// leading part alone stays a valid lower bound.
inline SpectralEstimate model_lower_bound(double a, double alpha, double R, int m) {
  if (!(a > 0) || !(alpha >= 1))
    throw parameter_error("model_lower_bound: need a > 0, alpha >= 1");
  if (!(R > 0)) throw parameter_error("model_lower_bound: need R > 0");
  if (m < 2) throw parameter_error("model_lower_bound: need m >= 2");
  SpectralEstimate est;
  est.R = R;
  est.a = a;
  est.alpha = alpha;
  est.m = m;
  est.b_tilde = a / 2 + (alpha - 1) / (2 * alpha * std::pow(R, alpha));
  if (!(est.b_tilde > 0 && est.b_tilde < a))
    throw parameter_error(
        "model_lower_bound: optimal exponent escapes (0, a); R is too small for this growth");
  const double corr = sq(alpha - 1) / (4 * alpha * alpha) * std::pow(R, -2 * alpha);
  est.model_lower = alpha * alpha * (a * a / 4 - corr) * std::pow(R, 2 * (alpha - 1));
  return est;
}

struct IndexEstimate {
  double r;
  int annuli;             // disjoint nodal annuli inside the ball of radius r
  double rate;            // annuli / log r
  double predicted_rate;  // alpha / (2 log((c+1)/(c-1)))
  double c;
  bool exceeds;
};

// Count of disjoint nodal annuli of the comparison solution below r, against
// the predicted logarithmic growth rate.
inline IndexEstimate index_lower_bound(const CoefficientProfile& v, const GrowthEnvelope& f,
                                       double c, double r, SpectralOptions opt = {}) {
  if (!(c > 1)) throw parameter_error("index_lower_bound: need c > 1");
  if (!(r > 1)) throw parameter_error("index_lower_bound: need r > 1");
  const double lo = std::max({v.domain_start() + 1e-6, f.domain_start() + 1e-3, 1e-3});
  for (double t : geomspace(lo, r, 256))
    if (v.eval(t, Side::mid) > f.value(t) * (1 + 1e-9))
      throw precondition_error("index_lower_bound: volume exceeds its envelope at t = " +
                               std::to_string(t));
  const CoefficientProfile A = CoefficientProfile::growth_potential(f, c);
  const SolutionTrack track = Solver::solve_auto(v, A, 1.0, r, opt.solve);
  IndexEstimate est;
  est.r = r;
  est.c = c;
  est.annuli = std::max(0, static_cast<int>(track.zeros().size()) - 1);
  est.rate = est.annuli / std::log(r);
  est.predicted_rate = f.alpha() / (2 * std::log((c + 1) / (c - 1)));
  est.exceeds = est.rate > est.predicted_rate;
  return est;
}

// Smallest generalized eigenvalue of -(v z')' = lambda v z on [lo, hi] with
// Dirichlet ends: second-order finite differences on a uniform grid, reduced
// to a symmetric tridiagonal problem, Sturm-sequence bisection.
inline double fd_eigenvalue_single(const CoefficientProfile& v, double lo, double hi, int n) {
  if (!(hi > lo)) throw parameter_error("fd oracle: empty interval");
  if (n < 16) throw parameter_error("fd oracle: need n >= 16");
  const double h = (hi - lo) / n;
  const int k = n - 1;
  std::vector<double> d(k), e(k > 1 ? k - 1 : 0);
  for (int i = 0; i < k; ++i) {
    const double x = lo + (i + 1) * h;
    const double vm = v.eval(x - h / 2, Side::mid), vp = v.eval(x + h / 2, Side::mid);
    const double vi = v.eval(x, Side::mid);
    if (!std::isfinite(vm) || !std::isfinite(vp) || !(vi > 0))
      throw oracle_error("fd oracle: volume not finite and positive on the window");
    d[i] = (vm + vp) / (h * h * vi);
    if (i + 1 < k) {
      const double vnext = v.eval(x + h, Side::mid);
      e[i] = -vp / (h * h * std::sqrt(vi * vnext));
    }
  }
  // Negative pivots of T - lambda I count eigenvalues below lambda.
  auto negcount = [&](double lam) {
    int cnt = 0;
    double q = d[0] - lam;
    if (q < 0) ++cnt;
    for (int i = 1; i < k; ++i) {
      const double denom = q == 0 ? 1e-300 : q;
      q = d[i] - lam - e[i - 1] * e[i - 1] / denom;
      if (q < 0) ++cnt;
    }
    return cnt;
  };
  double a = 0, b = 0;
  for (int i = 0; i < k; ++i)
    b = std::max(b, d[i] + (i > 0 ? std::abs(e[i - 1]) : 0.0) +
                        (i + 1 < k ? std::abs(e[i]) : 0.0));
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, b); ++it) {
    const double mid = 0.5 * (a + b);
    if (negcount(mid) >= 1)
      b = mid;
    else
      a = mid;
  }
  return 0.5 * (a + b);
}

// Richardson extrapolation across n and 2n; refuses to report when the two
// grids disagree beyond plausibility.
inline double fd_eigenvalue_oracle(const CoefficientProfile& v, double lo, double hi,
                                   int n = 512) {
  const double c1 = fd_eigenvalue_single(v, lo, hi, n);
  const double c2 = fd_eigenvalue_single(v, lo, hi, 2 * n);
  if (!(std::abs(c2 - c1) < 0.2 * std::max(std::abs(c2), 1e-300)))
    throw oracle_error("fd oracle: grids n and 2n disagree beyond 20%");
  return (4 * c2 - c1) / 3;
}

// One-call assembly used by the command line: upper bound, model lower bound
// where admissible, asymptotic constant, optional cross-check on the nodal
// annulus the upper bound came from.
inline SpectralEstimate spectral_summary(const CoefficientProfile& v, const GrowthEnvelope& f,
                                         double R, int m, bool with_fd,
                                         SpectralOptions opt = {}) {
  SpectralEstimate est = rayleigh_upper(v, f, R, opt);
  est.m = m;
  if (f.alpha() >= 1) {
    try {
      const SpectralEstimate ml = model_lower_bound(f.a(), f.alpha(), R, m);
      est.model_lower = ml.model_lower;
      est.b_tilde = ml.b_tilde;
    } catch (const parameter_error&) {
      // R below the admissible range for the model bound: leave it unset.
    }
  }
  const PrincipaleResult pc = principale_constant(f.a(), f.alpha(), f.beta());
  est.asymptotic_constant = pc.value;
  est.c_star = pc.c_star;
  est.alpha_below_one = pc.alpha_below_one;
  if (with_fd && !est.zero_branch && std::isfinite(est.T1) && std::isfinite(est.T2))
    est.fd_oracle = fd_eigenvalue_oracle(v, est.T1, est.T2, 512);
  return est;
}

}  // namespace oscilla
