#pragma once

// Closed-form references used across the tests. Everything here is derived
// independently of the library code paths it checks.

#include <cmath>

namespace oracles {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// (e^t z')' + A e^t z = 0, z(0) = 1, z'(0) = 0, constant A > 1/4:
//   z = e^{-t/2} (cos(w t) + sin(w t) / (2 w)),  w = sqrt(A - 1/4).
inline double exp_volume_solution(double A, double t) {
  const double w = std::sqrt(A - 0.25);
  return std::exp(-0.5 * t) * (std::cos(w * t) + 0.5 / w * std::sin(w * t));
}

inline double exp_volume_spacing(double A) { return pi / std::sqrt(A - 0.25); }

// Smallest Dirichlet eigenvalue of -(e^t z')' = lambda e^t z on a length-L
// interval.
inline double exp_volume_eigenvalue(double L) { return 0.25 + (pi / L) * (pi / L); }

// v = t^2, A = H^2 / t^2 with H^2 > 1/4: solutions are
//   t^{-1/2} (cos(w ln t) + c sin(w ln t)),  w = sqrt(H^2 - 1/4),
// so consecutive zeros sit at the fixed ratio e^{pi/w}.
inline double euler_zero_ratio(double H) {
  return std::exp(pi / std::sqrt(H * H - 0.25));
}

// First zero past 1 of the solution with z(1) = 1, z'(1) = 0.
inline double euler_first_zero(double H) {
  const double w = std::sqrt(H * H - 0.25);
  return std::exp((pi - std::atan(2 * w)) / w);
}

// Critical function closed forms.
inline double chi_cone(int m, double t) {
  const double c = (m - 2) / 2.0;
  return c * c / (t * t);
}

// m = 2 hyperbolic volume sinh(Bt): tail integral is log coth(Bt/2) / B.
inline double chi_sinh(double B, double t) {
  const double tail = std::log(1.0 / std::tanh(B * t / 2)) / B;
  const double denom = 2 * std::sinh(B * t) * tail;
  return 1.0 / (denom * denom);
}

inline double gap_bound(double c, double alpha) {
  return std::pow((c + 1) / (c - 1), 2 / alpha);
}

// Stationary point of c^2 ((c+1)/(c-1))^{4(alpha-1)/alpha} on c > 1.
inline double principale_minimizer(double alpha) {
  const double k = 4 * (alpha - 1) / alpha;
  return 0.5 * (k + std::sqrt(k * k + 4));
}

inline double principale_value(double a, double alpha) {
  const double c = principale_minimizer(alpha);
  return a * a * alpha * alpha / 4 * c * c *
         std::pow((c + 1) / (c - 1), 4 * (alpha - 1) / alpha);
}

}  // namespace oracles
