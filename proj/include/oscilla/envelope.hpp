#pragma once

// Growth envelopes f(t) = Lambda * exp{a t^alpha log^beta t}. These bound
// volume growth from above and generate the simplified critical curve
// (f'/2f)^2 used by the gap and spectral estimates.

#include "common.hpp"

namespace oscilla {

class GrowthEnvelope {
 public:
  GrowthEnvelope(double Lambda, double a, double alpha, double beta)
      : Lambda_(Lambda), a_(a), alpha_(alpha), beta_(beta) {
    if (!(Lambda > 0)) throw parameter_error("GrowthEnvelope: Lambda must be positive");
    if (!(a > 0)) throw parameter_error("GrowthEnvelope: a must be positive");
    if (!(alpha > 0)) throw parameter_error("GrowthEnvelope: alpha must be positive");
    if (!(beta >= 0)) throw parameter_error("GrowthEnvelope: beta must be nonnegative");
  }

  double Lambda() const { return Lambda_; }
  double a() const { return a_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  // a t^alpha log^beta t. With beta = 0 the log factor is identically 1 and
  // any t >= 0 is allowed; with beta > 0 we require t > 1 so the power of the
  // log is well-defined and positive.
  double exponent(double t) const {
    if (beta_ == 0) {
      if (!(t >= 0)) throw domain_error("GrowthEnvelope: t must be nonnegative");
      return a_ * std::pow(t, alpha_);
    }
    require_above_one(t);
    return a_ * std::pow(t, alpha_) * std::pow(std::log(t), beta_);
  }

  double value(double t) const { return Lambda_ * std::exp(exponent(t)); }
  double log_value(double t) const { return std::log(Lambda_) + exponent(t); }

  // f'(t)/f(t) = a t^{alpha-1} (alpha log^beta t + beta log^{beta-1} t).
  double log_derivative(double t) const {
    if (beta_ == 0) {
      if (!(t > 0)) throw domain_error("GrowthEnvelope: t must be positive");
      return a_ * alpha_ * std::pow(t, alpha_ - 1);
    }
    require_above_one(t);
    const double lg = std::log(t);
    return a_ * std::pow(t, alpha_ - 1) *
           (alpha_ * std::pow(lg, beta_) + beta_ * std::pow(lg, beta_ - 1));
  }

  double derivative(double t) const { return value(t) * log_derivative(t); }

  // Smallest admissible evaluation point for this envelope.
  double domain_start() const { return beta_ == 0 ? 0.0 : 1.0; }

 private:
  void require_above_one(double t) const {
    if (!(t > 1))
      throw domain_error("GrowthEnvelope: t must exceed 1 when beta is nonzero");
  }

  double Lambda_, a_, alpha_, beta_;
};

}  // namespace oscilla
