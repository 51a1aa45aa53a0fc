#pragma once

// Critical functions and reciprocal tail integrals.
//
//   chi_R(t) = (2 v(t) int_t^R ds/v)^{-2}     R finite or infinite
//   chi_f(t) = same with an envelope f in place of v
//   chi_tilde_f(t) = (f'(t) / 2 f(t))^2
//
// Divergent tails are a value (+inf) for tail_integral and an error for the
// chi evaluators, since chi is undefined there. Evaluation below t = 1e-8 is
// refused: v -> 0 at the origin and extrapolated values would be noise.

#include "common.hpp"
#include "envelope.hpp"
#include "profile.hpp"
#include "quadrature.hpp"

#include <memory>

namespace oscilla {

inline constexpr double chi_eval_floor = 1e-8;

// int_t^R ds/v(s), split at jump locations; +inf when the tail diverges.
inline double tail_integral(const CoefficientProfile& v, double t, double R = inf) {
  if (!(t > 0)) throw domain_error("tail_integral: t must be positive");
  if (!(t < R)) throw domain_error("tail_integral: need t < R");
  if (R > v.domain_end()) throw domain_error("tail_integral: R beyond domain end");
  if (R == inf) {
    if (!v.reciprocal_integrable_at_infinity()) return inf;
    return v.reciprocal_tail_to_infinity(t);
  }
  auto f = [&v](double s) { return 1.0 / v.eval(s, Side::mid); };
  return integrate(f, t, R, {1e-13, 1e-11, 40000}, v.breakpoints()).value;
}

inline double chi(const CoefficientProfile& v, double t, double R = inf) {
  if (!(t >= chi_eval_floor))
    throw resolution_error("chi: evaluation below the origin floor is refused");
  const double tail = tail_integral(v, t, R);
  if (tail == inf)
    throw divergence_error("chi: reciprocal tail diverges, critical function undefined");
  return 1.0 / sq(2.0 * v.eval(t, Side::mid) * tail);
}

inline double chi_f(const GrowthEnvelope& f, double t) {
  if (!(t > f.domain_start())) throw domain_error("chi_f: t below envelope domain");
  // Log space: f and its tail overflow/underflow individually long before
  // their product does.
  return std::exp(-2 * (std::log(2.0) + f.log_value(t) + log_reciprocal_tail(f, t)));
}

inline double chi_tilde_f(const GrowthEnvelope& f, double t) {
  return sq(0.5 * f.log_derivative(t));
}

enum class CriticalVariant { chi_R, chi, chi_f, chi_tilde_f };

struct CriticalCacheOptions {
  double t_lo = 1e-4;
  double t_hi = 0;  // 0: pick R(1 - 1e-6) for finite R, else 100
  int nodes = 1024;
};

// Cached critical curve. Tail integrals I(t) = int_t^R ds/source are
// accumulated backward over a geometric grid once at construction; log I is
// then interpolated by a cubic Hermite whose nodal derivative -1/(v I) is
// exact. Reads are pure.
//
// The square-root integral uses the identity
//   int_T^t sqrt(chi_R) = -1/2 log I(t) + 1/2 log I(T),
// so it costs two curve lookups.
class CriticalCurve {
 public:
  using CacheOptions = CriticalCacheOptions;

  CriticalCurve(const CoefficientProfile& v, double R = inf, CacheOptions opt = CacheOptions())
      : variant_(R == inf ? CriticalVariant::chi : CriticalVariant::chi_R), R_(R) {
    if (R == inf && !v.reciprocal_integrable_at_infinity())
      throw divergence_error("CriticalCurve: reciprocal tail diverges for " + v.describe());
    if (!(R <= v.domain_end())) throw domain_error("CriticalCurve: R beyond domain end");
    value_ = [v](double t, Side side) { return v.eval(t, side); };
    double hi = opt.t_hi;
    if (hi == 0) hi = (R == inf) ? 100.0 : R * (1 - 1e-6);
    double edge = (R == inf) ? v.reciprocal_tail_to_infinity(hi)
                             : tail_integral(v, hi, R);
    build(v.breakpoints(), opt.t_lo, hi, opt.nodes, edge);
  }

  CriticalCurve(const GrowthEnvelope& f, CriticalVariant variant, CacheOptions opt = CacheOptions())
      : variant_(variant), R_(inf), env_(f) {
    if (variant != CriticalVariant::chi_f && variant != CriticalVariant::chi_tilde_f)
      throw parameter_error("CriticalCurve: envelope source supports chi_f or chi_tilde_f");
    value_ = [f](double t, Side) { return f.value(t); };
    if (variant == CriticalVariant::chi_tilde_f) return;  // closed form, no cache
    double lo = std::max(opt.t_lo, f.domain_start() + 1e-6);
    double hi = opt.t_hi == 0 ? 100.0 : opt.t_hi;
    build({}, lo, hi, opt.nodes, CoefficientProfile::envelope_reciprocal_tail(f, hi));
  }

  CriticalVariant variant() const { return variant_; }
  double domain_lo() const { return grid_.empty() ? 0 : grid_.front(); }
  double domain_hi() const { return grid_.empty() ? inf : grid_.back(); }

  // int_t^R ds/source.
  double tail(double t) const {
    if (variant_ == CriticalVariant::chi_tilde_f)
      throw precondition_error("CriticalCurve: chi_tilde_f has no tail integral");
    return std::exp(log_tail(t));
  }

  double operator()(double t) const {
    if (!(t >= chi_eval_floor))
      throw resolution_error("CriticalCurve: evaluation below the origin floor is refused");
    if (variant_ == CriticalVariant::chi_tilde_f) return chi_tilde_f(*env_, t);
    return std::exp(-2.0 * log_tail(t)) / sq(2.0 * value_(t, Side::mid));
  }

  // int_T^t sqrt(chi) via the log identity; exact up to cache interpolation.
  double sqrt_chi_integral(double T, double t) const {
    if (!(T <= t)) throw domain_error("sqrt_chi_integral: need T <= t");
    if (T == t) return 0.0;
    if (variant_ == CriticalVariant::chi_tilde_f) {
      // sqrt(chi_tilde) = f'/2f integrates to (log f)/2 exactly.
      return 0.5 * (env_->exponent(t) - env_->exponent(T));
    }
    return 0.5 * (log_tail(T) - log_tail(t));
  }

 private:
  void build(const std::vector<double>& splits, double lo, double hi, int nodes, double edge_tail) {
    if (!(lo > 0 && hi > lo)) throw parameter_error("CriticalCurve: bad cache range");
    if (nodes < 16) throw parameter_error("CriticalCurve: too few cache nodes");
    grid_ = geomspace(lo, hi, nodes + 1);
    // Force breakpoints in range onto the grid so no panel straddles one.
    for (double s : splits)
      if (s > lo && s < hi) grid_.push_back(s);
    std::sort(grid_.begin(), grid_.end());
    grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());
    const size_t n = grid_.size();
    std::vector<double> I(n);
    I[n - 1] = edge_tail;
    auto recip = [this](double s) { return 1.0 / value_(s, Side::mid); };
    for (size_t k = n - 1; k > 0; --k) {
      const double piece = integrate(recip, grid_[k - 1], grid_[k], {1e-14, 1e-12, 20000}).value;
      I[k - 1] = I[k] + piece;
    }
    logI_.resize(n);
    dlogI_right_.resize(n);
    dlogI_left_.resize(n);
    // log I is continuous but its slope -1/(v I) jumps with v, so keep the
    // one-sided slope each adjacent panel needs.
    for (size_t k = 0; k < n; ++k) {
      if (!(I[k] > 0)) throw accuracy_error("CriticalCurve: nonpositive tail in cache");
      logI_[k] = std::log(I[k]);
      dlogI_right_[k] = -1.0 / (value_(grid_[k], Side::right) * I[k]);
      dlogI_left_[k] = -1.0 / (value_(grid_[k], Side::left) * I[k]);
    }
  }

  double log_tail(double t) const {
    if (t < grid_.front() || t > grid_.back())
      throw domain_error("CriticalCurve: t outside cached range");
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    size_t i = (it == grid_.begin()) ? 0 : static_cast<size_t>(it - grid_.begin()) - 1;
    if (i + 1 >= grid_.size()) i = grid_.size() - 2;
    const double h = grid_[i + 1] - grid_[i];
    const double x = (t - grid_[i]) / h;
    const double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
    const double h10 = x * (1 - x) * (1 - x);
    const double h01 = x * x * (3 - 2 * x);
    const double h11 = x * x * (x - 1);
    return h00 * logI_[i] + h * h10 * dlogI_right_[i] + h01 * logI_[i + 1] +
           h * h11 * dlogI_left_[i + 1];
  }

  CriticalVariant variant_;
  double R_;
  std::optional<GrowthEnvelope> env_;
  std::function<double(double, Side)> value_;
  std::vector<double> grid_, logI_, dlogI_right_, dlogI_left_;
};

}  // namespace oscilla
