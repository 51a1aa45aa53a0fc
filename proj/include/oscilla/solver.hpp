#pragma once

// Singular Cauchy problem
//
//   (v z')' + A v z = 0 on (0, horizon),  z(0) = z0 > 0,  v z' -> 0 at 0,
//
// solved in flux form z' = w/v, w' = -A v z. The origin is degenerate
// (v -> 0), so stepping runs on the regularized volume
// v_eps = max(v(eps), v) with eps driven below a floor and an empirical
// Cauchy check between successive ladder values. Each accepted solution is
// verified against the integral equation
//
//   z(t) = z0 - int_0^t (1/v) int_0^s A v z   (true v, not v_eps)
//
// on a probe subgrid; failure is an error, never a silent degrade.
//
// Stepping: 3-stage collocation per step (values at both ends and the
// midpoint; quadratic interpolants of w/v and A v z integrated exactly).
// The problem is linear, so the stage equations solve in closed form: no
// iteration error. Local order 5, with step-doubling control. Grid nodes are
// forced at every coefficient breakpoint and jump so no step straddles one.

#include "common.hpp"
#include "profile.hpp"
#include "quadrature.hpp"

#include <memory>

namespace oscilla {

struct SolveOptions {
  double rel_tol = 1e-10;          // per-step relative error target
  double abs_tol_scale = 1e-12;    // absolute floor, times z0
  double eps_floor = 2.5e-4;       // regularization driven below this
  double cauchy_tol_scale = 2.5e-7;    // ladder stability bound, times z0
  double residual_tol_scale = 1e-6;    // integral-equation bound, times z0
  double zero_refine_tol = 1e-7;   // bisection bracket width for zeros
  double initial_step = 1e-4;
  double max_step = 0;             // 0: horizon / 64
  // Extra halvings if the Cauchy check fails. Near-plane volumes (v ~ t at
  // the origin) converge only linearly in the regularization parameter, so
  // the ladder needs room; the loop exits as soon as the check passes.
  int max_ladder = 18;
  bool check_residual = true;
  int residual_probes = 48;
};

struct ZeroRecord {
  int index;
  double location;      // bracket midpoint
  double bracket_lo;
  double bracket_hi;
  double z_lo, z_hi;    // interpolant values at the bracket ends (opposite signs)
};

struct SturmReport {
  double min_gap;       // min of z2 - z1 on [0, cutoff)
  double cutoff;        // first zero of z1, or the horizon
  bool pass;
};

namespace detail {

// Piecewise state of one accepted solve: nodes with (z, w) and the profiles
// needed to rebuild slopes for Hermite interpolation.
struct TrackData {
  CoefficientProfile v;
  CoefficientProfile A;
  double z0 = 1;
  double horizon = 0;
  std::vector<double> t, z, w;
  std::vector<double> y;           // -w/z, NaN where masked; empty until filled
  std::vector<char> near_zero;     // per-node flag
  std::vector<ZeroRecord> zeros;
  std::vector<double> eps_history;
  double max_residual = qnan;
  SolveOptions opts;
};

struct StepCoeffs {
  double qa, qm, qb;  // 1/v at a+, mid, b-
  double pa, pm, pb;  // A v at a+, mid, b-
};

// One collocation step of the linear system on [a, a+h] from (za, wa).
// Returns values at the midpoint and the right end.
struct StepResult {
  double zm, wm, zb, wb;
};

inline StepResult collocation_step(double za, double wa, double h, const StepCoeffs& c) {
  const double al = h / 24.0, be = h / 6.0;
  // Stage equations: Simpson / half-Simpson integrals of quadratic
  // interpolants through (a, m, b):
  //   wm = wa - al (5 pa za + 8 pm zm - pb zb)
  //   wb = wa - be (pa za + 4 pm zm + pb zb)
  //   zm = za + al (5 qa wa + 8 qm wm - qb wb)
  //   zb = za + be (qa wa + 4 qm wm + qb wb)
  // Substituting the w stages leaves a 2x2 system in (zm, zb).
  const double a11 = 1 + 64 * al * al * c.qm * c.pm - 4 * al * be * c.qb * c.pm;
  const double a12 = -8 * al * al * c.qm * c.pb - al * be * c.qb * c.pb;
  const double r1 = za * (1 - 40 * al * al * c.qm * c.pa + al * be * c.qb * c.pa) +
                    al * (5 * c.qa + 8 * c.qm - c.qb) * wa;
  const double a21 = 32 * al * be * c.qm * c.pm + 4 * be * be * c.qb * c.pm;
  const double a22 = 1 - 4 * al * be * c.qm * c.pb + be * be * c.qb * c.pb;
  const double r2 = za * (1 - 20 * al * be * c.qm * c.pa - be * be * c.qb * c.pa) +
                    be * (c.qa + 4 * c.qm + c.qb) * wa;
  const double det = a11 * a22 - a12 * a21;
  StepResult s;
  s.zm = (r1 * a22 - a12 * r2) / det;
  s.zb = (a11 * r2 - a21 * r1) / det;
  s.wm = wa - al * (5 * c.pa * za + 8 * c.pm * s.zm - c.pb * s.zb);
  s.wb = wa - be * (c.pa * za + 4 * c.pm * s.zm + c.pb * s.zb);
  return s;
}

class Stepper {
 public:
  Stepper(const CoefficientProfile& v, const CoefficientProfile& A, double eps,
          const SolveOptions& opts, double z0)
      : v_(v), A_(A), eps_(eps), opts_(opts), z0_(z0) {
    v_at_eps_ = eps > 0 ? v.eval(eps, Side::mid) : 0;
  }

  double vol(double t, Side side) const {
    const double raw = v_.eval(t, side);
    return (eps_ > 0 && t <= eps_) ? std::max(v_at_eps_, raw) : raw;
  }

  StepCoeffs coeffs(double a, double b) const {
    const double m = 0.5 * (a + b);
    StepCoeffs c;
    c.qa = 1.0 / vol(a, Side::right);
    c.qm = 1.0 / vol(m, Side::mid);
    c.qb = 1.0 / vol(b, Side::left);
    c.pa = A_.eval(a, Side::right) * vol(a, Side::right);
    c.pm = A_.eval(m, Side::mid) * vol(m, Side::mid);
    c.pb = A_.eval(b, Side::left) * vol(b, Side::left);
    return c;
  }

  // Integrate from (t0, z, w) to t1 appending nodes; forced nodes must be
  // hit exactly so coefficient kinks never sit inside a step.
  void run(double t0, double t1, double z, double w, const std::vector<double>& forced,
           std::vector<double>& T, std::vector<double>& Z, std::vector<double>& W) const {
    T.push_back(t0);
    Z.push_back(z);
    W.push_back(w);
    double t = t0;
    double h = std::min(opts_.initial_step, (t1 - t0) / 8);
    const double hmax = opts_.max_step > 0 ? opts_.max_step : (t1 - t0) / 64;
    size_t next_forced = 0;
    while (next_forced < forced.size() && forced[next_forced] <= t0) ++next_forced;
    int rejected_in_a_row = 0;
    while (t < t1) {
      double target = t1;
      if (next_forced < forced.size()) target = std::min(target, forced[next_forced]);
      h = std::min(h, hmax);
      if (t + h >= target - 1e-14 * std::max(1.0, target)) h = target - t;
      // Step doubling: one step of h against two of h/2.
      const StepCoeffs c1 = coeffs(t, t + h);
      const StepResult one = collocation_step(z, w, h, c1);
      const StepCoeffs cl = coeffs(t, t + h / 2), cr = coeffs(t + h / 2, t + h);
      const StepResult l = collocation_step(z, w, h / 2, cl);
      const StepResult r = collocation_step(l.zb, l.wb, h / 2, cr);
      // Error scale: local oscillation amplitude, |z| + |z'|/omega with
      // omega = sqrt(A). It stays O(amplitude) through zero crossings (no
      // step collapse) and tracks |z| itself in monotone decay, so relative
      // control preserves the sign of exponentially small solutions.
      const double vb = 1.0 / c1.qb;
      const double ab = c1.pb * c1.qb;
      const double zspan = ab > 0 ? std::abs(r.wb) / (vb * std::sqrt(ab))
                                  : std::abs(r.wb) * h / vb;
      const double sz = std::abs(r.zb) + zspan + 1e-14 * z0_;
      const double sw = std::abs(r.wb) +
                        (ab > 0 ? vb * std::sqrt(ab) : vb / std::max(h, 1e-300)) *
                            std::abs(r.zb) +
                        1e-300;
      double err = std::abs(r.zb - one.zb) / sz;
      err = std::max(err, std::abs(r.wb - one.wb) / sw);
      err /= 15.0;  // Richardson factor for order 4
      const double tol = std::max(opts_.rel_tol, opts_.abs_tol_scale);
      if (err <= tol || h <= 1e-13 * std::max(1.0, t)) {
        // Accept the fine result, recording the interior node too.
        T.push_back(t + h / 2);
        Z.push_back(l.zb);
        W.push_back(l.wb);
        T.push_back(t + h);
        Z.push_back(r.zb);
        W.push_back(r.wb);
        t += h;
        z = r.zb;
        w = r.wb;
        if (next_forced < forced.size() && t >= forced[next_forced] - 1e-14 * std::max(1.0, t)) {
          t = forced[next_forced];
          T.back() = t;
          ++next_forced;
        }
        rejected_in_a_row = 0;
        const double grow = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
      } else {
        if (++rejected_in_a_row > 60)
          throw accuracy_error("solver: step control failed to converge near t = " +
                               std::to_string(t));
        h *= std::clamp(0.9 * std::pow(tol / err, 0.2), 0.1, 0.7);
      }
    }
  }

 private:
  const CoefficientProfile& v_;
  const CoefficientProfile& A_;
  double eps_;
  double v_at_eps_;
  SolveOptions opts_;
  double z0_;
};

inline size_t panel_index(const std::vector<double>& t, double x) {
  auto it = std::upper_bound(t.begin(), t.end(), x);
  size_t i = (it == t.begin()) ? 0 : static_cast<size_t>(it - t.begin()) - 1;
  if (i + 1 >= t.size()) i = t.size() - 2;
  return i;
}

inline double hermite(double x0, double x1, double f0, double f1, double d0, double d1,
                      double x) {
  const double h = x1 - x0, u = (x - x0) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  return h00 * f0 + h * h10 * d0 + h01 * f1 + h * h11 * d1;
}

}  // namespace detail

class SolutionTrack {
 public:
  explicit SolutionTrack(std::shared_ptr<const detail::TrackData> d) : d_(std::move(d)) {}

  const CoefficientProfile& volume() const { return d_->v; }
  const CoefficientProfile& potential() const { return d_->A; }
  double z0() const { return d_->z0; }
  double horizon() const { return d_->horizon; }
  const std::vector<double>& grid() const { return d_->t; }
  const std::vector<double>& z_values() const { return d_->z; }
  const std::vector<double>& flux_values() const { return d_->w; }
  const std::vector<double>& riccati_values() const { return d_->y; }
  const std::vector<char>& near_zero_flags() const { return d_->near_zero; }
  const std::vector<ZeroRecord>& zeros() const { return d_->zeros; }
  const std::vector<double>& eps_history() const { return d_->eps_history; }
  double max_residual() const { return d_->max_residual; }
  const SolveOptions& options() const { return d_->opts; }

  // Cubic Hermite on the solve grid; slopes come from the flux (z' = w/v)
  // and the equation (w' = -A v z), so interpolation matches scheme order.
  double eval_z(double t) const {
    check_range(t);
    const auto& T = d_->t;
    const size_t i = detail::panel_index(T, t);
    const double d0 = slope_z(i, Side::right), d1 = slope_z(i + 1, Side::left);
    return detail::hermite(T[i], T[i + 1], d_->z[i], d_->z[i + 1], d0, d1, t);
  }

  double eval_flux(double t) const {
    check_range(t);
    const auto& T = d_->t;
    const size_t i = detail::panel_index(T, t);
    const double d0 = slope_w(i, Side::right), d1 = slope_w(i + 1, Side::left);
    return detail::hermite(T[i], T[i + 1], d_->w[i], d_->w[i + 1], d0, d1, t);
  }

  // y = -v z'/z = -w/z from the interpolants; NaN within the masked band
  // around zeros.
  double eval_riccati(double t) const {
    const double zv = eval_z(t);
    const size_t i = detail::panel_index(d_->t, t);
    if (!d_->near_zero.empty() && (d_->near_zero[i] || d_->near_zero[i + 1])) return qnan;
    if (std::abs(zv) < mask_floor(i)) return qnan;
    return -eval_flux(t) / zv;
  }

  double first_zero() const {
    if (d_->zeros.empty()) throw precondition_error("track has no zeros");
    return d_->zeros.front().location;
  }

 private:
  friend SolutionTrack riccati_track(const SolutionTrack&);
  friend std::vector<ZeroRecord> find_zeros(const SolutionTrack&, double);
  friend class Solver;

  void check_range(double t) const {
    if (!(t >= d_->t.front() && t <= d_->t.back()))
      throw domain_error("track evaluation outside the solved range");
  }

  double slope_z(size_t i, Side side) const {
    const double eps = d_->eps_history.empty() ? 0 : d_->eps_history.back();
    const double ti = d_->t[i];
    double vv = ti == 0 ? d_->v.origin_limit() : d_->v.eval(ti, side);
    if (eps > 0 && ti <= eps) vv = std::max(vv, d_->v.eval(eps, Side::mid));
    return vv > 0 ? d_->w[i] / vv : 0.0;
  }

  double slope_w(size_t i, Side side) const {
    const double ti = d_->t[i];
    const double vv = ti == 0 ? d_->v.origin_limit() : d_->v.eval(ti, side);
    const double aa = A_at(ti, side);
    return -aa * vv * d_->z[i];
  }

  double A_at(double t, Side side) const {
    return t == 0 ? d_->A.origin_limit() : d_->A.eval(t, side);
  }

  double mask_floor(size_t i) const {
    // Local amplitude over a node window keeps the mask meaningful deep in
    // exponential decay.
    const size_t n = d_->z.size();
    const size_t lo = i > 100 ? i - 100 : 0, hi = std::min(n, i + 101);
    double amp = 0;
    for (size_t k = lo; k < hi; ++k) amp = std::max(amp, std::abs(d_->z[k]));
    return 1e-10 * std::max(amp, 1e-300);
  }

  std::shared_ptr<const detail::TrackData> d_;
};

std::vector<ZeroRecord> find_zeros(const SolutionTrack& track, double refine_tol);

class Solver {
 public:
  static SolutionTrack solve_ivp(const CoefficientProfile& v, const CoefficientProfile& A,
                                 double z0, double horizon, SolveOptions opts = {}) {
    validate(v, A, z0, horizon);
    auto data = std::make_shared<detail::TrackData>(detail::TrackData{v, A});
    data->z0 = z0;
    data->horizon = horizon;
    data->opts = opts;

    const std::vector<double> forced = forced_nodes(v, A, 0, horizon, opts.eps_floor);
    // Regularization ladder: start at the floor, halve until two consecutive
    // solutions agree in sup norm on probe points (empirical Cauchy check).
    double eps = std::min(opts.eps_floor, horizon / 8);
    std::vector<double> T, Z, W;
    run_once(v, A, z0, horizon, eps, opts, forced, T, Z, W);
    data->eps_history.push_back(eps);
    const double cauchy_tol = opts.cauchy_tol_scale * z0;
    for (int k = 0; k < opts.max_ladder; ++k) {
      const double eps2 = eps / 2;
      std::vector<double> T2, Z2, W2;
      run_once(v, A, z0, horizon, eps2, opts, forced, T2, Z2, W2);
      data->eps_history.push_back(eps2);
      const double diff = probe_diff(T, Z, W, T2, Z2, W2, v, eps, eps2);
      T.swap(T2);
      Z.swap(Z2);
      W.swap(W2);
      eps = eps2;
      if (diff < cauchy_tol) break;
      if (k + 1 == opts.max_ladder)
        throw accuracy_error("solver: regularization ladder did not stabilize (last diff " +
                             std::to_string(diff) + ")");
    }
    data->t = std::move(T);
    data->z = std::move(Z);
    data->w = std::move(W);
    finalize(*data);
    SolutionTrack track(data);
    if (opts.check_residual) verify_residual(track, *data);
    return track;
  }

  // Regular initial value problem from an interior point (or from 0 when
  // the volume is positive there): no regularization ladder, same stepping
  // and the same integral-equation gate anchored at the start state.
  static SolutionTrack solve_from(const CoefficientProfile& v, const CoefficientProfile& A,
                                  double z_init, double w_init, double t_start,
                                  double horizon, SolveOptions opts = {}) {
    if (!(z_init > 0)) throw precondition_error("solve_from: initial value must be positive");
    if (!(t_start >= 0) || !(horizon > t_start))
      throw precondition_error("solve_from: need 0 <= start < horizon");
    if (horizon > v.domain_end() || horizon > A.domain_end())
      throw precondition_error("solve_from: horizon beyond coefficient domain");
    if (!(v.eval(t_start, Side::right) > 0))
      throw precondition_error("solve_from: volume must be positive at the start");
    try {
      for (double t : linspace(t_start + (horizon - t_start) / 512, horizon, 512))
        if (A.eval(t, Side::mid) < 0)
          throw precondition_error("solve_from: potential must be nonnegative");
    } catch (const domain_error& e) {
      throw precondition_error(std::string("solve_from: potential not evaluable: ") + e.what());
    }
    auto data = std::make_shared<detail::TrackData>(detail::TrackData{v, A});
    data->z0 = z_init;
    data->horizon = horizon;
    data->opts = opts;
    const std::vector<double> forced = forced_nodes(v, A, t_start, horizon, 0);
    detail::Stepper st(v, A, 0, opts, z_init);
    st.run(t_start, horizon, z_init, w_init, forced, data->t, data->z, data->w);
    finalize(*data);
    SolutionTrack track(data);
    if (opts.check_residual) verify_residual(track, *data);
    return track;
  }

  // Dispatch on the volume type: a vanishing origin takes the regularized
  // singular route, anything else starts as a plain initial value problem
  // at the first admissible point.
  static SolutionTrack solve_auto(const CoefficientProfile& v, const CoefficientProfile& A,
                                  double z0, double horizon, SolveOptions opts = {}) {
    const double ds = std::max(v.domain_start(), A.domain_start());
    if (ds == 0 && v.is_volume_type()) return solve_ivp(v, A, z0, horizon, opts);
    const double start = ds == 0 ? 0.0 : ds * (1 + 1e-9);
    return solve_from(v, A, z0, 0.0, start, horizon, opts);
  }

  // Continue an accepted track to a larger horizon: regular initial value
  // problem from the existing final state, no new regularization.
  static SolutionTrack extend(const SolutionTrack& base, double new_horizon) {
    const auto& d = base.d_;
    if (!(new_horizon > d->horizon)) throw parameter_error("extend: horizon must grow");
    if (new_horizon > d->v.domain_end() || new_horizon > d->A.domain_end())
      throw domain_error("extend: horizon beyond coefficient domain");
    auto data = std::make_shared<detail::TrackData>(*d);
    data->horizon = new_horizon;
    data->y.clear();
    data->near_zero.clear();
    const std::vector<double> forced =
        forced_nodes(d->v, d->A, d->horizon, new_horizon, 0);
    detail::Stepper st(d->v, d->A, 0, d->opts, d->z0);
    std::vector<double> T, Z, W;
    st.run(d->horizon, new_horizon, d->z.back(), d->w.back(), forced, T, Z, W);
    data->t.insert(data->t.end(), T.begin() + 1, T.end());
    data->z.insert(data->z.end(), Z.begin() + 1, Z.end());
    data->w.insert(data->w.end(), W.begin() + 1, W.end());
    finalize(*data);
    SolutionTrack track(data);
    if (d->opts.check_residual) verify_residual(track, *data);
    return track;
  }

  // Grow the horizon geometrically until the track holds `count` zeros.
  static SolutionTrack solve_until_zeros(const CoefficientProfile& v,
                                         const CoefficientProfile& A, double z0, int count,
                                         double initial_horizon, double hard_cap,
                                         SolveOptions opts = {}) {
    if (count < 1) throw parameter_error("solve_until_zeros: count must be >= 1");
    SolutionTrack track = solve_auto(v, A, z0, initial_horizon, opts);
    while (static_cast<int>(track.zeros().size()) < count) {
      const double next = track.horizon() * 1.5;
      if (next > hard_cap)
        throw horizon_error("zero capture: horizon cap " + std::to_string(hard_cap) +
                            " reached with " + std::to_string(track.zeros().size()) +
                            " zero(s)");
      track = extend(track, std::min(next, hard_cap));
    }
    return track;
  }

 private:
  friend std::vector<ZeroRecord> find_zeros(const SolutionTrack&, double);

  static void validate(const CoefficientProfile& v, const CoefficientProfile& A, double z0,
                       double horizon) {
    if (!(z0 > 0)) throw precondition_error("solve: z0 must be positive");
    if (!(horizon > 0)) throw precondition_error("solve: horizon must be positive");
    if (horizon > v.domain_end() || horizon > A.domain_end())
      throw precondition_error("solve: horizon beyond coefficient domain");
    if (!v.is_volume_type())
      throw precondition_error("solve: volume must vanish at 0 and increase nearby");
    const double a0 = A.origin_limit();
    if (!(a0 >= 0) || a0 == inf)
      throw precondition_error("solve: potential must be bounded and nonnegative near 0");
    try {
      for (double t : linspace(horizon / 512, horizon, 512))
        if (A.eval(t, Side::mid) < 0)
          throw precondition_error("solve: potential must be nonnegative");
    } catch (const domain_error& e) {
      throw precondition_error(std::string("solve: potential not evaluable on [0,horizon]: ") +
                               e.what());
    }
  }

  static std::vector<double> forced_nodes(const CoefficientProfile& v,
                                          const CoefficientProfile& A, double lo, double hi,
                                          double eps_seed) {
    std::vector<double> f;
    for (double b : v.breakpoints())
      if (b > lo && b < hi) f.push_back(b);
    for (double b : A.breakpoints())
      if (b > lo && b < hi) f.push_back(b);
    // Seed nodes at the regularization scale so the first steps resolve it.
    if (eps_seed > 0)
      for (double e = eps_seed / 4; e < std::min(hi, 8 * eps_seed); e *= 2)
        if (e > lo) f.push_back(e);
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
  }

  static void run_once(const CoefficientProfile& v, const CoefficientProfile& A, double z0,
                       double horizon, double eps, const SolveOptions& opts,
                       std::vector<double> forced, std::vector<double>& T,
                       std::vector<double>& Z, std::vector<double>& W) {
    forced.push_back(eps);
    std::sort(forced.begin(), forced.end());
    forced.erase(std::unique(forced.begin(), forced.end()), forced.end());
    detail::Stepper st(v, A, eps, opts, z0);
    T.clear();
    Z.clear();
    W.clear();
    st.run(0.0, horizon, z0, 0.0, forced, T, Z, W);
  }

  static double probe_diff(const std::vector<double>& T1, const std::vector<double>& Z1,
                           const std::vector<double>& W1, const std::vector<double>& T2,
                           const std::vector<double>& Z2, const std::vector<double>& W2,
                           const CoefficientProfile& v, double eps1, double eps2) {
    (void)W1;
    (void)W2;
    (void)v;
    (void)eps1;
    (void)eps2;
    // Sup over probe points of |z_eps - z_eps/2| using linear interpolation
    // on the finer track (the grids are dense; interpolation error is far
    // below the tolerance being tested).
    double worst = 0;
    const size_t probes = 257;
    const double lo = T1.front(), hi = T1.back();
    for (size_t k = 1; k < probes; ++k) {
      const double t = lo + (hi - lo) * double(k) / (probes - 1);
      worst = std::max(worst, std::abs(lin_at(T1, Z1, t) - lin_at(T2, Z2, t)));
    }
    return worst;
  }

  static double lin_at(const std::vector<double>& T, const std::vector<double>& F, double x) {
    const size_t i = detail::panel_index(T, x);
    const double u = (x - T[i]) / (T[i + 1] - T[i]);
    return F[i] + u * (F[i + 1] - F[i]);
  }

  static void finalize(detail::TrackData& d);

  static void verify_residual(const SolutionTrack& track, detail::TrackData& d) {
    // Independent reconstruction with the true volume: cumulative
    //   wt(s) = w(t0) - int_{t0}^s A v z,  r(t) = z(t) - z(t0) - int_{t0}^t wt/v,
    // anchored at the track's first node (t0 = 0 with wt = 0 for the
    // singular problem).
    const auto& T = d.t;
    const size_t n = T.size();
    std::vector<double> wt(n, 0.0), outer(n, 0.0);
    wt[0] = d.w.front();
    for (size_t i = 0; i + 1 < n; ++i) {
      auto inner = [&](double x) {
        return d.A.eval(x, Side::mid) * d.v.eval(x, Side::mid) * track.eval_z(x);
      };
      wt[i + 1] = wt[i] - detail::gk15(inner, T[i], T[i + 1]).kronrod;
    }
    for (size_t i = 0; i + 1 < n; ++i) {
      // Reconstructed flux inside the panel: cubic Hermite with the exact
      // nodal slopes wt' = -A v z. Linear interpolation here would cap the
      // whole check at second order in the step size.
      double da = -d.A.eval(T[i], Side::right) * d.v.eval(T[i], Side::right) * d.z[i];
      double db =
          -d.A.eval(T[i + 1], Side::left) * d.v.eval(T[i + 1], Side::left) * d.z[i + 1];
      if (!std::isfinite(da)) da = 0;
      if (!std::isfinite(db)) db = 0;
      auto integrand = [&](double x) {
        return detail::hermite(T[i], T[i + 1], wt[i], wt[i + 1], da, db, x) /
               d.v.eval(x, Side::mid);
      };
      outer[i + 1] = outer[i] + detail::gk15(integrand, T[i], T[i + 1]).kronrod;
    }
    double worst = 0;
    const int probes = std::max(8, d.opts.residual_probes);
    for (int k = 1; k <= probes; ++k) {
      const size_t i = std::min(n - 1, size_t(double(k) / probes * (n - 1)));
      worst = std::max(worst, std::abs(d.z[i] - d.z.front() - outer[i]));
    }
    d.max_residual = worst;
    const double tol = d.opts.residual_tol_scale * d.z0;
    if (worst > tol)
      throw accuracy_error("solver: integral-equation residual " + std::to_string(worst) +
                           " exceeds tolerance " + std::to_string(tol));
  }
};

inline SolutionTrack solve_ivp(const CoefficientProfile& v, const CoefficientProfile& A,
                               double z0, double horizon, SolveOptions opts = {}) {
  return Solver::solve_ivp(v, A, z0, horizon, opts);
}

inline SolutionTrack solve_auto(const CoefficientProfile& v, const CoefficientProfile& A,
                                double z0, double horizon, SolveOptions opts = {}) {
  return Solver::solve_auto(v, A, z0, horizon, opts);
}

// Zero extraction: every sign change of the Hermite interpolant between
// consecutive nodes, refined by bisection to the requested bracket width.
// Brackets certify the sign change; a separation floor derived from the
// local potential guards against double-counting a single zero.
inline std::vector<ZeroRecord> find_zeros(const SolutionTrack& track, double refine_tol) {
  if (!(refine_tol > 0)) throw parameter_error("find_zeros: refine_tol must be positive");
  const auto& T = track.grid();
  const auto& Z = track.z_values();
  std::vector<ZeroRecord> out;
  for (size_t i = 0; i + 1 < T.size(); ++i) {
    double lo = T[i], hi = T[i + 1];
    double zlo = Z[i], zhi = Z[i + 1];
    if (Z[i] == 0 && i > 0) {
      // Exact node zero: certify with the neighboring values.
      ZeroRecord rec{static_cast<int>(out.size()), T[i], T[i] - 0.5 * refine_tol,
                     T[i] + 0.5 * refine_tol, Z[i - 1], zhi};
      out.push_back(rec);
      continue;
    }
    if (!(zlo * zhi < 0)) continue;
    while (hi - lo > refine_tol) {
      const double mid = 0.5 * (lo + hi);
      const double zm = track.eval_z(mid);
      if (zm == 0) {
        lo = mid - 0.25 * refine_tol;
        hi = mid + 0.25 * refine_tol;
        break;
      }
      if (zlo * zm < 0) {
        hi = mid;
        zhi = zm;
      } else {
        lo = mid;
        zlo = zm;
      }
    }
    ZeroRecord rec;
    rec.index = static_cast<int>(out.size());
    rec.location = 0.5 * (lo + hi);
    rec.bracket_lo = lo;
    rec.bracket_hi = hi;
    rec.z_lo = zlo;
    rec.z_hi = zhi;
    if (!out.empty()) {
      const double amid = track.potential()(rec.location);
      const double floor = amid > 0 ? 1e-4 * pi / std::sqrt(amid)
                                    : 1e-6 * track.horizon();
      if (rec.location - out.back().location < floor)
        throw resolution_error("find_zeros: two zeros within the separation floor; refine the grid");
    }
    out.push_back(rec);
  }
  return out;
}

// Fill y = -w/z at nodes where |z| clears the mask floor; flag nodes inside
// the masked bands (they are the blow-up neighborhoods of the zeros).
inline SolutionTrack riccati_track(const SolutionTrack& base) {
  auto data = std::make_shared<detail::TrackData>(*base.d_);
  const size_t n = data->t.size();
  data->y.assign(n, qnan);
  data->near_zero.assign(n, 0);
  // Windowed local amplitude; grows robustly through deep exponential decay.
  std::vector<double> amp(n, 0.0);
  const size_t win = 100;
  for (size_t i = 0; i < n; ++i) {
    const size_t lo = i > win ? i - win : 0, hi = std::min(n, i + win + 1);
    double a = 0;
    for (size_t k = lo; k < hi; ++k) a = std::max(a, std::abs(data->z[k]));
    amp[i] = std::max(a, 1e-300);
  }
  // A node is masked when its own value sits inside the amplitude band or
  // when it bounds a sign change (nodes rarely coincide with a zero, so the
  // band alone would miss most of them).
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(data->z[i]) < 1e-10 * amp[i]) {
      data->near_zero[i] = 1;
      if (i > 0) data->near_zero[i - 1] = 1;
      if (i + 1 < n) data->near_zero[i + 1] = 1;
    }
  }
  for (size_t i = 0; i + 1 < n; ++i) {
    if (data->z[i] == 0.0 || data->z[i] * data->z[i + 1] < 0.0) {
      const size_t lo = i > 0 ? i - 1 : 0, hi = std::min(n - 1, i + 2);
      for (size_t k = lo; k <= hi; ++k) data->near_zero[k] = 1;
    }
  }
  for (size_t i = 0; i < n; ++i)
    if (!data->near_zero[i]) data->y[i] = -data->w[i] / data->z[i];
  return SolutionTrack(data);
}

inline void Solver::finalize(detail::TrackData& d) {
  SolutionTrack probe(std::make_shared<detail::TrackData>(d));
  d.zeros = find_zeros(probe, d.opts.zero_refine_tol);
}

// Comparison of two potentials over one volume: A1 >= A2 pointwise implies
// z2 >= z1 up to the first zero of z1.
inline SturmReport sturm_compare(const CoefficientProfile& v, const CoefficientProfile& A1,
                                 const CoefficientProfile& A2, double z0, double horizon,
                                 SolveOptions opts = {}) {
  for (double t : linspace(horizon / 2048, horizon, 2048)) {
    const double a1 = A1.eval(t, Side::mid), a2 = A2.eval(t, Side::mid);
    if (a1 < a2 - 1e-12 * std::max(1.0, std::abs(a1)))
      throw precondition_error("sturm_compare: A1 >= A2 fails at t = " + std::to_string(t));
  }
  const SolutionTrack s1 = solve_ivp(v, A1, z0, horizon, opts);
  const SolutionTrack s2 = solve_ivp(v, A2, z0, horizon, opts);
  SturmReport rep;
  rep.cutoff = s1.zeros().empty() ? horizon : s1.zeros().front().location;
  rep.min_gap = inf;
  for (double t : s1.grid()) {
    if (t >= rep.cutoff) break;
    const double gap = (t <= s2.horizon() ? s2.eval_z(t) : qnan) - s1.eval_z(t);
    if (std::isfinite(gap)) rep.min_gap = std::min(rep.min_gap, gap);
  }
  rep.pass = rep.min_gap >= -1e-7 * z0;
  return rep;
}

}  // namespace oscilla
