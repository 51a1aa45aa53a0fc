#pragma once

// Error taxonomy and small numeric helpers shared by every module.
//
// Errors are split by what the caller can do about them: parameter_error and
// config_error mean the request itself is malformed; precondition_error means
// the inputs are well-formed but violate a structural hypothesis of the
// operation; accuracy/resolution/horizon errors mean the numerics could not
// certify the result at the requested tolerances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscilla {

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double qnan = std::numeric_limits<double>::quiet_NaN();
inline constexpr double pi = 3.141592653589793238462643383279502884;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Malformed family or operation parameters.
struct parameter_error : error { using error::error; };
// Evaluation outside a profile's or curve's domain.
struct domain_error : error { using error::error; };
// A structural hypothesis required by the operation does not hold.
struct precondition_error : error { using error::error; };
// A quantity that must be finite for this request diverges.
struct divergence_error : error { using error::error; };
// Stepper or quadrature could not certify the requested accuracy.
struct accuracy_error : error { using error::error; };
// Two detected zeros collapsed below the separation floor.
struct resolution_error : error { using error::error; };
// The requested feature was not reached before the horizon cap.
struct horizon_error : error { using error::error; };
// FD oracle failed to converge.
struct oracle_error : error { using error::error; };
// Config file problems; messages carry "<file>:<line>: ..." diagnostics.
struct config_error : error { using error::error; };

// One-sided evaluation at discontinuities; `mid` is the default point value.
enum class Side { left, mid, right };

inline double sq(double x) { return x * x; }

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) throw parameter_error("linspace: need at least 2 points");
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] = a + (b - a) * (double(i) / double(n - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

inline std::vector<double> geomspace(double a, double b, int n) {
  if (!(a > 0) || !(b > 0)) throw parameter_error("geomspace: endpoints must be positive");
  if (n < 2) throw parameter_error("geomspace: need at least 2 points");
  const double la = std::log(a), lb = std::log(b);
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] = std::exp(la + (lb - la) * (double(i) / double(n - 1)));
  out.front() = a;
  out.back() = b;
  return out;
}

// log(coth(x/2)) without cancellation for large x; equals atanh-free form
// log((1+e^{-x})/(1-e^{-x})).
inline double log_coth_half(double x) {
  if (!(x > 0)) throw domain_error("log_coth_half: argument must be positive");
  const double e = std::exp(-x);
  return std::log1p(e) - std::log1p(-e);
}

// Worker count used by parallel sweeps; the CLI sets this from --threads.
inline int& worker_count() {
  static int n = 1;
  return n;
}

// Index-space parallel map with deterministic result ordering. Falls back to
// a plain loop when a single worker is configured.
template <class Fn>
void parallel_for(size_t n, Fn&& fn) {
  const int workers = std::max(1, worker_count());
  if (workers == 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> futs;
  const size_t chunk = (n + static_cast<size_t>(workers) - 1) / static_cast<size_t>(workers);
  for (size_t lo = 0; lo < n; lo += chunk) {
    const size_t hi = std::min(n, lo + chunk);
    futs.push_back(std::async(std::launch::async, [lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    }));
  }
  for (auto& f : futs) f.get();
}

}  // namespace oscilla
