#pragma once

// End-to-end checks over the whole toolkit: dichotomies with closed-form
// zero structure, gap bounds, spectral sandwiches, comparison sweeps, solver
// integrity, and the critical-function identities. Each check is wrapped so
// a failure reports its reason instead of aborting the suite.

#include "common.hpp"
#include "criteria.hpp"
#include "critical.hpp"
#include "csv.hpp"
#include "gaps.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "solver.hpp"
#include "spectral.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>

namespace oscilla {

struct AcceptanceResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0;
  std::string detail;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw error(msg);
}

}  // namespace detail

inline std::string format_rel(double x) { return format_number(x * 100) + "%"; }

namespace detail {

inline AcceptanceResult run_check(int id, const std::string& name, double budget_s,
                                  const std::function<void(std::ostringstream&)>& body) {
  AcceptanceResult r;
  r.id = id;
  r.name = name;
  std::ostringstream det;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(det);
    r.pass = true;
  } catch (const std::exception& e) {
    r.pass = false;
    det << "FAIL: " << e.what();
  }
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.pass && budget_s > 0 && r.seconds > budget_s) {
    r.pass = false;
    det << " | over the " << budget_s << " s budget";
  }
  r.detail = det.str();
  return r;
}

}  // namespace detail

namespace acceptance {

// 1. Capped inverse-square potential on the m=3 cone volume: subcritical
// amplitude stays positive to 1e3, supercritical produces geometrically
// spaced zeros at the closed-form ratio.
inline AcceptanceResult euler_dichotomy() {
  return detail::run_check(1, "euler dichotomy", 10.0, [](std::ostringstream& det) {
    const auto v = CoefficientProfile::euclidean(3);
    const auto low = solve_ivp(v, CoefficientProfile::capped_euler(0.4, 3), 1.0, 1e3);
    detail::require(low.zeros().empty(), "H=0.4 produced zeros on [0, 1e3]");
    const auto high = Solver::solve_until_zeros(
        v, CoefficientProfile::capped_euler(1.0, 3), 1.0, 5, 1e3, 1e8);
    detail::require(high.zeros().size() >= 5, "H=1 did not reach 5 zeros");
    const double target = std::exp(2 * pi / std::sqrt(3.0));
    double worst = 0;
    for (size_t k = 1; k < 5; ++k) {
      const double ratio = high.zeros()[k].location / high.zeros()[k - 1].location;
      worst = std::max(worst, std::abs(ratio / target - 1));
    }
    detail::require(worst <= 0.01, "consecutive-zero ratio off the closed form by " +
                                       std::to_string(worst * 100) + "%");
    det << "no zeros at H=0.4; 5 zeros at H=1, ratio within " << format_rel(worst)
        << " of " << target;
  });
}

// 2. m=2 hyperbolic volume with a capped coth potential: amplitude 0.45
// stays positive to 200, amplitude 0.6 oscillates with the pointwise ratio
// estimate at 2H.
inline AcceptanceResult hyperbolic_dichotomy() {
  return detail::run_check(2, "hyperbolic dichotomy", 10.0, [](std::ostringstream& det) {
    const auto v = CoefficientProfile::hyperbolic(2, 1.0);
    const auto pos = solve_ivp(v, CoefficientProfile::capped_hyperbolic(0.45, 2, 1.0), 1.0,
                               200.0);
    detail::require(pos.zeros().empty(), "H=0.45 produced zeros on [0, 200]");
    const auto osc_pot = CoefficientProfile::capped_hyperbolic(0.6, 2, 1.0);
    const auto osc = Solver::solve_until_zeros(v, osc_pot, 1.0, 2, 200.0, 2000.0);
    detail::require(osc.zeros().size() >= 2, "H=0.6 did not oscillate");
    const auto reports = sufficient_conditions(v, osc_pot, std::nullopt, 200.0);
    double ratio = qnan;
    for (const auto& r : reports)
      if (r.id == "pointwise_ratio") {
        detail::require(r.verdict == Verdict::holds, "pointwise ratio criterion not held");
        ratio = r.left;
      }
    detail::require(std::abs(ratio / 1.2 - 1) <= 0.02,
                    "pointwise ratio " + std::to_string(ratio) + " not within 2% of 1.2");
    det << "positive at H=0.45; oscillatory at H=0.6 with ratio " << ratio;
  });
}

// 3. v = e^t, A = 1: zero spacing at the closed form, and the second-zero
// ratio sweep stays under the gap bound while approaching 1.
inline AcceptanceResult constant_coefficient_gaps() {
  return detail::run_check(3, "constant-coefficient gaps", 10.0,
                           [](std::ostringstream& det) {
    const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
    const auto v = CoefficientProfile::exponential(f);
    const auto A = CoefficientProfile::constant(1.0);
    const auto track = Solver::solve_auto(v, A, 1.0, 60.0);
    detail::require(track.zeros().size() >= 10, "too few zeros on [0, 60]");
    const double spacing = 2 * pi / std::sqrt(3.0);
    double worst = 0;
    for (size_t k = 1; k < track.zeros().size(); ++k) {
      const double gap = track.zeros()[k].location - track.zeros()[k - 1].location;
      worst = std::max(worst, std::abs(gap / spacing - 1));
    }
    detail::require(worst <= 1e-3, "zero spacing off by " + format_rel(worst));
    GapOptions gopt;
    // Keep the solve horizon at 2 * max(tau) = 600 so e^t stays inside the
    // double range; the constant potential guarantees zeros well before it.
    gopt.initial_horizon_factor = 2.0;
    const auto rep = verify_gap_bound(v, A, f, 2.0, geomspace(30.0, 300.0, 25), gopt);
    detail::require(rep.bound == 9.0, "gap bound for (2, 1) is not 9");
    detail::require(rep.pass, "second-zero ratio exceeded the bound");
    detail::require(rep.limsup_estimate <= 9.0, "ratio estimate above the raw bound");
    // Bounded-horizon stand-in for the asymptotic approach to 1: two zero
    // spacings past tau = 30 keep T2/tau under 1 + 7.3/30.
    detail::require(rep.limsup_estimate < 1.25,
                    "ratio estimate " + std::to_string(rep.limsup_estimate) +
                        " not near 1 at the horizon");
    det << "spacing within " << format_rel(worst) << " of " << spacing
        << "; T2/tau estimate " << rep.limsup_estimate << " <= 9";
  });
}

// 4. Closed-form growth constant and its boundary limit.
inline AcceptanceResult growth_constant() {
  return detail::run_check(4, "growth constant", 0.0, [](std::ostringstream& det) {
    const auto r2 = principale_constant(1.0, 2.0);
    const double target = 17.0 + 12.0 * std::sqrt(2.0);
    detail::require(std::abs(r2.value - target) <= 1e-9,
                    "constant at alpha=2 missed " + std::to_string(target));
    detail::require(std::abs(r2.c_star - (1.0 + std::sqrt(2.0))) <= 1e-9,
                    "minimizer at alpha=2 missed 1+sqrt(2)");
    const auto r1 = principale_constant(1.0, 1.0);
    detail::require(r1.value == 0.25, "alpha=1 limit is not exactly a^2/4");
    det << "alpha=2 constant " << format_number(r2.value) << ", c* " << r2.c_star
        << "; alpha=1 exact";
  });
}

// 5. Spectral sandwich on the linear-exponent volume: model bound, Rayleigh
// quotient, and finite-difference oracle all hug 1/4.
inline AcceptanceResult spectral_sandwich() {
  return detail::run_check(5, "spectral sandwich", 60.0, [](std::ostringstream& det) {
    const auto v = CoefficientProfile::superexp(3, 1.0, 1.0, 0.0);
    const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
    const auto ml = model_lower_bound(1.0, 1.0, 30.0, 3);
    detail::require(ml.model_lower == 0.25, "model lower bound at alpha=1 is not 1/4");
    double worst_up = 0, worst_fd = 0;
    for (double R : {20.0, 35.0, 50.0}) {
      const auto est = rayleigh_upper(v, f, R);
      worst_up = std::max(worst_up, std::abs(est.upper_bound / 0.25 - 1));
      const double fd = fd_eigenvalue_oracle(v, R, R + 40.0, 1024);
      worst_fd = std::max(worst_fd, std::abs(fd / 0.25 - 1));
    }
    detail::require(worst_up <= 0.05, "Rayleigh upper bound drifted " + format_rel(worst_up));
    detail::require(worst_fd <= 0.05, "fd oracle drifted " + format_rel(worst_fd));
    det << "upper bounds within " << format_rel(worst_up) << ", oracle within "
        << format_rel(worst_fd) << " of 1/4";
  });
}

// 6. Randomized comparison sweep: the solution under the smaller potential
// dominates up to the first zero of the other, across volumes and caps.
inline AcceptanceResult comparison_sweep(std::uint64_t seed) {
  return detail::run_check(6, "comparison sweep", 60.0, [seed](std::ostringstream& det) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> dim(3, 5);
    double worst = inf;
    for (int i = 0; i < 50; ++i) {
      const int m = dim(rng);
      const double h2 = 0.05 + 1.3 * unif(rng);
      const double h1 = h2 + (1.45 - h2) * unif(rng);
      const double horizon = 40.0 + 160.0 * unif(rng);
      const auto rep = sturm_compare(CoefficientProfile::euclidean(m),
                                     CoefficientProfile::capped_euler(h1, m),
                                     CoefficientProfile::capped_euler(h2, m), 1.0, horizon);
      worst = std::min(worst, rep.min_gap);
      detail::require(rep.min_gap >= -1e-6,
                      "ordering violated by " + std::to_string(-rep.min_gap) + " at case " +
                          std::to_string(i));
    }
    det << "50 ordered pairs, worst margin " << format_number(worst);
  });
}

// 7. Solver integrity: residual and regularization stability on the suite's
// solve shapes, plus continuity and a flux Lipschitz bound across a volume
// jump.
inline AcceptanceResult solver_integrity() {
  return detail::run_check(7, "solver integrity", 0.0, [](std::ostringstream& det) {
    struct Case {
      CoefficientProfile v, A;
      double horizon;
      bool singular;
    };
    const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
    const std::vector<Case> cases = {
        {CoefficientProfile::euclidean(3), CoefficientProfile::capped_euler(0.4, 3), 1e3,
         true},
        {CoefficientProfile::euclidean(3), CoefficientProfile::capped_euler(1.0, 3), 1e4,
         true},
        {CoefficientProfile::hyperbolic(2, 1.0),
         CoefficientProfile::capped_hyperbolic(0.45, 2, 1.0), 200.0, true},
        {CoefficientProfile::hyperbolic(2, 1.0),
         CoefficientProfile::capped_hyperbolic(0.6, 2, 1.0), 200.0, true},
        {CoefficientProfile::exponential(f), CoefficientProfile::constant(1.0), 400.0,
         false},
        {CoefficientProfile::euclidean(4), CoefficientProfile::capped_euler(1.2, 4), 300.0,
         true},
    };
    double worst_res = 0;
    for (const auto& c : cases) {
      const auto tr = Solver::solve_auto(c.v, c.A, 1.0, c.horizon);
      worst_res = std::max(worst_res, tr.max_residual());
      detail::require(tr.max_residual() <= 1e-6, "residual above 1e-6 z0");
      if (c.singular) {
        detail::require(tr.eps_history().size() >= 2,
                        "regularization ladder did not record a stability pair");
        detail::require(tr.eps_history().back() < tr.eps_history().front(),
                        "ladder did not descend");
      }
    }
    // Downward volume jump: the solution stays continuous and the flux obeys
    // |w(t) - w(s)| <= sup|A v z| |t - s|.
    const auto vj = CoefficientProfile::euclidean(3).with_jumps({{2.0, 0.5}});
    const auto tr = solve_ivp(vj, CoefficientProfile::constant(1.0), 1.0, 10.0);
    const double zl = tr.eval_z(2.0 - 1e-7), zr = tr.eval_z(2.0 + 1e-7);
    detail::require(std::abs(zl - zr) <= 1e-5, "z not continuous across the jump");
    double lip = 0;
    for (double t : linspace(0.01, 10.0, 2000)) {
      const double az = std::abs(tr.potential().eval(t, Side::mid) *
                                 tr.volume().eval(t, Side::left) * tr.eval_z(t));
      lip = std::max(lip, az);
    }
    const auto& T = tr.grid();
    const auto& W = tr.flux_values();
    for (size_t i = 0; i + 1 < T.size(); ++i)
      detail::require(std::abs(W[i + 1] - W[i]) <= 1.05 * lip * (T[i + 1] - T[i]) + 1e-12,
                      "flux violated its Lipschitz bound near t = " + std::to_string(T[i]));
    det << "six solve shapes, worst residual " << format_number(worst_res)
        << "; jump case continuous with Lipschitz flux";
  });
}

// 8. Nodal-annulus count against the predicted logarithmic rate on the
// linear-exponent realization.
inline AcceptanceResult index_growth() {
  return detail::run_check(8, "index growth", 0.0, [](std::ostringstream& det) {
    const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
    const auto v = CoefficientProfile::exponential(f);
    double least = inf;
    for (double r : {50.0, 120.0, 300.0, 500.0}) {
      const auto est = index_lower_bound(v, f, 2.0, r);
      least = std::min(least, est.rate);
      detail::require(est.rate > est.predicted_rate,
                      "rate " + std::to_string(est.rate) + " at r = " + std::to_string(r) +
                          " does not exceed " + std::to_string(est.predicted_rate));
    }
    det << "count/log r >= " << format_number(least) << " > 1/(2 log 3) on [50, 500]";
  });
}

// 9. Square-root integral identity against direct quadrature, and the
// divergence of the critical square root, on three volume families.
inline AcceptanceResult critical_identities() {
  return detail::run_check(9, "critical identities", 0.0, [](std::ostringstream& det) {
    const std::vector<CoefficientProfile> volumes = {
        CoefficientProfile::euclidean(3), CoefficientProfile::hyperbolic(3, 1.0),
        CoefficientProfile::superexp(3, 1.0, 1.0, 0.0)};
    double worst = 0;
    for (const auto& v : volumes) {
      CriticalCurve curve(v, inf, {0.5, 60.0, 2048});
      auto root = [&](double s) { return std::sqrt(chi(v, s)); };
      const double direct = integrate(root, 2.0, 40.0, {1e-12, 1e-10, 40000}).value;
      const double fast = curve.sqrt_chi_integral(2.0, 40.0);
      const double err = std::abs(direct - fast) / std::max(1.0, std::abs(direct));
      worst = std::max(worst, err);
      detail::require(err <= 1e-7, v.describe() + ": identity off by " + format_number(err));
      const double i1 = curve.sqrt_chi_integral(2.0, 6.0);
      const double i2 = curve.sqrt_chi_integral(6.0, 18.0);
      const double i3 = curve.sqrt_chi_integral(18.0, 54.0);
      detail::require(i1 > 0 && i2 >= 0.75 * i1 && i3 >= 0.75 * i2 && i1 + i2 + i3 > 0.5,
                      v.describe() + ": square-root integral increments do not diverge");
    }
    det << "identity within " << format_number(worst) << " on three families";
  });
}

}  // namespace acceptance

inline std::vector<AcceptanceResult> run_acceptance(std::uint64_t seed = 20260816ULL) {
  return {acceptance::euler_dichotomy(),
          acceptance::hyperbolic_dichotomy(),
          acceptance::constant_coefficient_gaps(),
          acceptance::growth_constant(),
          acceptance::spectral_sandwich(),
          acceptance::comparison_sweep(seed),
          acceptance::solver_integrity(),
          acceptance::index_growth(),
          acceptance::critical_identities()};
}

}  // namespace oscilla
