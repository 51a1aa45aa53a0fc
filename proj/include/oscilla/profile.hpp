#pragma once

// Radial coefficient profiles v(t), A(t) on (0, R). A profile is immutable
// after construction: closed-form families, sampled tables with piecewise
// linear interpolation, and declared downward jumps (volume drops across a
// cut locus). At a declared jump the point value is the average of the
// one-sided limits; one-sided values are available through eval(t, Side).
//
// Family seams (the cap boundary of the capped potentials, the two bridge
// ends of the superexp volume, table nodes) are exposed as breakpoints so
// quadrature panels and solver grids never straddle them. Seams are not
// jumps: the midpoint rule applies only to the declared jump set.

#include "common.hpp"
#include "envelope.hpp"
#include "quadrature.hpp"

#include <memory>
#include <optional>
#include <sstream>

namespace oscilla {

struct Jump {
  double location;
  double left_value;
  double right_value;  // invariant: left_value >= right_value > 0
};

class CoefficientProfile {
 public:
  // --- volume generators -------------------------------------------------
  static CoefficientProfile euclidean(int m) {
    require(m >= 2, "euclidean: m must be an integer >= 2");
    CoefficientProfile p(Kind::euclidean);
    p.m_ = m;
    return p;
  }

  static CoefficientProfile hyperbolic(int m, double B) {
    require(m >= 2, "hyperbolic: m must be an integer >= 2");
    require(B > 0, "hyperbolic: B must be positive");
    CoefficientProfile p(Kind::hyperbolic);
    p.m_ = m;
    p.B_ = B;
    return p;
  }

  // t^{m-1} on [0,1], exp{a t^alpha log^beta t} on [2,inf), joined on [1,2]
  // by a cubic Hermite blend of log v matching value and first derivative at
  // both ends. The blend is checked monotone at construction (its derivative
  // is an explicit quadratic).
  static CoefficientProfile superexp(int m, double a, double alpha, double beta) {
    require(m >= 2, "superexp: m must be an integer >= 2");
    require(a > 0, "superexp: a must be positive");
    require(alpha >= 1, "superexp: alpha must be >= 1");
    require(beta >= 0, "superexp: beta must be nonnegative");
    CoefficientProfile p(Kind::superexp);
    p.m_ = m;
    p.env_.emplace(1.0, a, alpha, beta);
    p.br_s0_ = double(m - 1);                    // d/dt log t^{m-1} at t=1
    p.br_L1_ = p.env_->exponent(2.0);            // log v(2)
    p.br_s1_ = p.env_->log_derivative(2.0);
    const double Dq = p.br_L1_;                  // L(2)-L(1) with L(1)=0
    // Bridge slope q(x) = 6D x(1-x) + s0 (1-x)(1-3x) + s1 x(3x-2), x in [0,1].
    const double A2 = -6 * Dq + 3 * p.br_s0_ + 3 * p.br_s1_;
    const double B1 = 6 * Dq - 4 * p.br_s0_ - 2 * p.br_s1_;
    const double C0 = p.br_s0_;
    double qmin = std::min(C0, A2 + B1 + C0);
    if (A2 > 0) {
      const double xs = -B1 / (2 * A2);
      if (xs > 0 && xs < 1) qmin = std::min(qmin, C0 - B1 * B1 / (4 * A2));
    }
    const double scale = std::max({std::abs(Dq), std::abs(p.br_s0_), std::abs(p.br_s1_), 1.0});
    require(qmin >= -1e-12 * scale, "superexp: bridge on [1,2] is not monotone for these parameters");
    return p;
  }

  // v(t) = f(t) for a growth envelope f. Not volume-type: v(0+) = Lambda.
  static CoefficientProfile exponential(const GrowthEnvelope& f) {
    CoefficientProfile p(Kind::exponential);
    p.env_ = f;
    return p;
  }

  static CoefficientProfile constant(double value, double R = inf) {
    require(value > 0, "constant: value must be positive");
    require(R > 0, "constant: domain end must be positive");
    CoefficientProfile p(Kind::constant);
    p.value_ = value;
    p.R_ = R;
    return p;
  }

  static CoefficientProfile power(double coeff, double exponent, double R = inf) {
    require(coeff > 0, "power: coefficient must be positive");
    require(R > 0, "power: domain end must be positive");
    CoefficientProfile p(Kind::power);
    p.coeff_ = coeff;
    p.expo_ = exponent;
    p.R_ = R;
    return p;
  }

  // --- potential generators ----------------------------------------------
  // H^2/t^2 on [1,inf); on [0,1) capped at min(H^2, ((m-2)/2)^2), which keeps
  // A bounded at the origin and below the critical curve (m-2)^2/(4t^2).
  static CoefficientProfile capped_euler(double H, int m) {
    require(H >= 0, "capped_euler: H must be nonnegative");
    require(m >= 2, "capped_euler: m must be an integer >= 2");
    CoefficientProfile p(Kind::capped_euler);
    p.H_ = H;
    p.m_ = m;
    return p;
  }

  // H^2 B^2 coth(B max(t,1)): continuous, bounded at the origin, exactly
  // H^2 B^2 coth(Bt) beyond the cap.
  static CoefficientProfile capped_hyperbolic(double H, int m, double B) {
    require(H >= 0, "capped_hyperbolic: H must be nonnegative");
    require(m >= 2, "capped_hyperbolic: m must be an integer >= 2");
    require(B > 0, "capped_hyperbolic: B must be positive");
    CoefficientProfile p(Kind::capped_hyperbolic);
    p.H_ = H;
    p.m_ = m;
    p.B_ = B;
    return p;
  }

  // A(t) = [c (a alpha/2) t^{alpha-1} log^beta t]^2: the potential whose root
  // dominates c times the simplified critical curve of the envelope.
  static CoefficientProfile growth_potential(const GrowthEnvelope& f, double c) {
    require(c > 0, "growth_potential: c must be positive");
    CoefficientProfile p(Kind::growth_potential);
    p.env_ = f;
    p.c_ = c;
    return p;
  }

  // --- sampled tables -----------------------------------------------------
  static CoefficientProfile sampled(std::vector<double> t, std::vector<double> value) {
    require(t.size() == value.size(), "sampled: abscissae/value size mismatch");
    require(t.size() >= 2, "sampled: need at least two samples");
    for (size_t i = 0; i + 1 < t.size(); ++i)
      require(t[i] < t[i + 1], "sampled: abscissae must be strictly increasing");
    require(t.front() >= 0, "sampled: abscissae must be nonnegative");
    for (size_t i = 0; i < t.size(); ++i) {
      require(value[i] >= 0, "sampled: values must be nonnegative");
      require(value[i] > 0 || t[i] == 0, "sampled: value may vanish only at t=0");
    }
    CoefficientProfile p(Kind::table);
    p.table_ = std::make_shared<const Table>(Table{std::move(t), std::move(value)});
    p.R_ = p.table_->t.back();
    return p;
  }

  // Copy of this profile with downward jumps: the value is scaled by the
  // running product of factors past each location. Factors in (0,1] keep the
  // left >= right invariant automatic.
  CoefficientProfile with_jumps(const std::vector<std::pair<double, double>>& loc_factor) const {
    CoefficientProfile p(*this);
    require(p.jumps_.empty(), "with_jumps: profile already carries jumps");
    double cum = 1.0, prev = 0.0;
    const auto seams = seam_points();
    for (const auto& [loc, factor] : loc_factor) {
      require(loc > 0 && loc < R_, "with_jumps: jump location outside (0, domain_end)");
      require(loc > prev, "with_jumps: locations must be strictly ascending");
      require(factor > 0 && factor <= 1, "with_jumps: factor must lie in (0,1]");
      for (double s : seams)
        require(loc != s, "with_jumps: jump collides with a family seam");
      const double base = p.base_eval(loc, Side::mid);
      p.jumps_.push_back({loc, base * cum, base * cum * factor});
      cum *= factor;
      p.cum_factors_.push_back(cum);
      prev = loc;
    }
    return p;
  }

  // --- evaluation ----------------------------------------------------------
  double operator()(double t) const { return eval(t, Side::mid); }

  double eval(double t, Side side) const {
    if (!(t >= 0)) throw domain_error("profile: t must be nonnegative");
    if (t > R_) throw domain_error("profile: t beyond domain end");
    return base_eval(t, side) * jump_factor(t, side);
  }

  double domain_end() const { return R_; }

  // First admissible evaluation point: 1 for envelope-backed profiles with a
  // log factor (the exponent needs log t > 0), the first sample for tables,
  // 0 otherwise.
  double domain_start() const {
    if ((kind_ == Kind::exponential || kind_ == Kind::growth_potential) && env_->beta() > 0)
      return 1.0;
    if (kind_ == Kind::table) return table_->t.front();
    return 0.0;
  }

  double origin_limit() const {
    switch (kind_) {
      case Kind::euclidean:
      case Kind::hyperbolic:
      case Kind::superexp: return 0.0;
      case Kind::exponential: return env_->beta() == 0 ? env_->Lambda() : qnan;
      case Kind::constant: return value_;
      case Kind::power:
        return expo_ > 0 ? 0.0 : (expo_ == 0 ? coeff_ : inf);
      case Kind::capped_euler: return std::min(H_ * H_, sq(0.5 * (m_ - 2)));
      case Kind::capped_hyperbolic: return H_ * H_ * B_ * B_ / std::tanh(B_);
      case Kind::growth_potential: {
        if (env_->beta() > 0) return qnan;
        const double s = c_ * env_->a() * env_->alpha() / 2;
        return env_->alpha() > 1 ? 0.0 : (env_->alpha() == 1 ? s * s : inf);
      }
      case Kind::table: return table_->t.front() == 0 ? table_->v.front() : qnan;
    }
    return qnan;
  }

  // Volume-type: vanishes at the origin and is strictly increasing on a
  // neighborhood of it, so the singular Cauchy problem applies.
  bool is_volume_type() const { return origin_limit() == 0.0 && increasing_near_origin(); }

  bool increasing_near_origin() const {
    switch (kind_) {
      case Kind::euclidean:
      case Kind::hyperbolic:
      case Kind::superexp: return true;
      case Kind::exponential: return env_->beta() == 0;
      case Kind::power: return expo_ > 0;
      case Kind::table: {
        if (table_->t.front() != 0) return false;
        return table_->v.size() >= 2 && table_->v[1] > table_->v[0];
      }
      default: return false;
    }
  }

  const std::vector<Jump>& jumps() const { return jumps_; }

  // Abscissae where eval may be kinked or discontinuous.
  std::vector<double> breakpoints() const {
    std::vector<double> bp = seam_points();
    for (const auto& j : jumps_) bp.push_back(j.location);
    if (kind_ == Kind::table)
      bp.insert(bp.end(), table_->t.begin(), table_->t.end());
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
  }

  // --- tail behavior -------------------------------------------------------
  // Is int_t^inf ds/value finite? Only meaningful on unbounded domains.
  bool reciprocal_integrable_at_infinity() const {
    if (R_ < inf) throw precondition_error("reciprocal_integrable_at_infinity: finite domain");
    switch (kind_) {
      case Kind::euclidean: return m_ >= 3;
      case Kind::hyperbolic:
      case Kind::superexp:
      case Kind::exponential: return true;
      case Kind::constant: return false;
      case Kind::power: return expo_ > 1;
      case Kind::capped_euler:
      case Kind::capped_hyperbolic: return false;
      case Kind::growth_potential: {
        const double p = 2 * (env_->alpha() - 1);
        return p > 1 || (p == 1 && 2 * env_->beta() > 1);
      }
      case Kind::table: return false;
    }
    return false;
  }

  // Is int^inf value ds finite? (Finite total volume beyond any ball.)
  bool integrable_at_infinity() const {
    if (R_ < inf) throw precondition_error("integrable_at_infinity: finite domain");
    switch (kind_) {
      case Kind::euclidean:
      case Kind::hyperbolic:
      case Kind::superexp:
      case Kind::exponential:
      case Kind::constant: return false;
      case Kind::power: return expo_ < -1;
      case Kind::capped_euler: return H_ > 0;
      case Kind::capped_hyperbolic: return false;
      case Kind::growth_potential: return 2 * (env_->alpha() - 1) < -1;
      case Kind::table: return false;
    }
    return false;
  }

  // int_t^inf ds/value, exact or certified-truncation evaluation.
  // Throws divergence_error when the tail is infinite.
  double reciprocal_tail_to_infinity(double t) const {
    if (R_ < inf) throw precondition_error("reciprocal tail: profile has a finite domain");
    if (!(t > 0)) throw domain_error("reciprocal tail: t must be positive");
    if (!reciprocal_integrable_at_infinity())
      throw divergence_error("reciprocal tail diverges for " + describe());
    // Split at jump locations beyond t; the final unbounded piece sees a
    // constant scale factor.
    double acc = 0, x = t;
    for (size_t k = 0; k < jumps_.size(); ++k) {
      if (jumps_[k].location <= t) continue;
      const double seg_end = jumps_[k].location;
      acc += finite_reciprocal(x, seg_end);
      x = seg_end;
    }
    const double scale = jumps_.empty() ? 1.0 : jump_factor_beyond(x);
    return acc + base_reciprocal_tail(x) / scale;
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::euclidean: os << "euclidean(m=" << m_ << ")"; break;
      case Kind::hyperbolic: os << "hyperbolic(m=" << m_ << ", B=" << B_ << ")"; break;
      case Kind::superexp:
        os << "superexp(m=" << m_ << ", a=" << env_->a() << ", alpha=" << env_->alpha()
           << ", beta=" << env_->beta() << ")";
        break;
      case Kind::exponential:
        os << "exponential(Lambda=" << env_->Lambda() << ", a=" << env_->a()
           << ", alpha=" << env_->alpha() << ", beta=" << env_->beta() << ")";
        break;
      case Kind::constant: os << "constant(" << value_ << ")"; break;
      case Kind::power: os << "power(" << coeff_ << ", " << expo_ << ")"; break;
      case Kind::capped_euler: os << "capped_euler(H=" << H_ << ", m=" << m_ << ")"; break;
      case Kind::capped_hyperbolic:
        os << "capped_hyperbolic(H=" << H_ << ", m=" << m_ << ", B=" << B_ << ")";
        break;
      case Kind::growth_potential:
        os << "growth_potential(c=" << c_ << ", a=" << env_->a() << ", alpha=" << env_->alpha()
           << ", beta=" << env_->beta() << ")";
        break;
      case Kind::table: os << "table(" << table_->t.size() << " samples)"; break;
    }
    if (!jumps_.empty()) os << " with " << jumps_.size() << " jump(s)";
    return os.str();
  }

  // Envelope naturally associated with this profile (the one whose exponent
  // the profile matches at infinity), if any.
  std::optional<GrowthEnvelope> natural_envelope() const {
    if (kind_ == Kind::exponential) return env_;
    if (kind_ == Kind::superexp) return GrowthEnvelope(1.0, env_->a(), env_->alpha(), env_->beta());
    return std::nullopt;
  }

 private:
  enum class Kind {
    euclidean,
    hyperbolic,
    superexp,
    exponential,
    constant,
    power,
    capped_euler,
    capped_hyperbolic,
    growth_potential,
    table
  };

  struct Table {
    std::vector<double> t, v;
  };

  explicit CoefficientProfile(Kind k) : kind_(k) {}

  static void require(bool ok, const char* msg) {
    if (!ok) throw parameter_error(msg);
  }

  std::vector<double> seam_points() const {
    switch (kind_) {
      case Kind::capped_euler:
      case Kind::capped_hyperbolic: return {1.0};
      case Kind::superexp: return {1.0, 2.0};
      default: return {};
    }
  }

  double bridge_log(double t) const {
    // Cubic Hermite of log v on [1,2]; L(1)=0, L(2)=br_L1_, slopes br_s0_/br_s1_.
    const double x = t - 1.0;
    const double h10 = x * (1 - x) * (1 - x);
    const double h01 = x * x * (3 - 2 * x);
    const double h11 = x * x * (x - 1);
    return br_s0_ * h10 + br_L1_ * h01 + br_s1_ * h11;
  }

  double base_eval(double t, Side side) const {
    switch (kind_) {
      case Kind::euclidean: return std::pow(t, m_ - 1);
      case Kind::hyperbolic: return std::pow(std::sinh(B_ * t), m_ - 1);
      case Kind::superexp:
        if (t <= 1.0 && (side == Side::left || t < 1.0)) return std::pow(t, m_ - 1);
        if (t < 2.0 || (t == 2.0 && side == Side::left)) return std::exp(bridge_log(t));
        return std::exp(env_->exponent(t));
      case Kind::exponential: return env_->value(t);
      case Kind::constant: return value_;
      case Kind::power:
        if (t == 0 && expo_ < 0) return inf;
        if (t == 0 && expo_ == 0) return coeff_;
        return coeff_ * std::pow(t, expo_);
      case Kind::capped_euler: {
        const double cap = std::min(H_ * H_, sq(0.5 * (m_ - 2)));
        if (t < 1.0 || (t == 1.0 && side == Side::left)) return cap;
        return H_ * H_ / (t * t);
      }
      case Kind::capped_hyperbolic: {
        const double x = B_ * std::max(t, 1.0);
        return H_ * H_ * B_ * B_ / std::tanh(x);
      }
      case Kind::growth_potential: {
        const double al = env_->alpha(), be = env_->beta();
        if (be == 0) {
          if (t == 0) return origin_limit();
          const double r = c_ * env_->a() * al / 2 * std::pow(t, al - 1);
          return r * r;
        }
        if (!(t > 1)) throw domain_error("growth_potential: t must exceed 1 when beta > 0");
        const double r =
            c_ * env_->a() * al / 2 * std::pow(t, al - 1) * std::pow(std::log(t), be);
        return r * r;
      }
      case Kind::table: return table_eval(t);
    }
    return qnan;
  }

  double table_eval(double t) const {
    const auto& ts = table_->t;
    const auto& vs = table_->v;
    if (t < ts.front() || t > ts.back())
      throw domain_error("table profile: t outside the sampled range");
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    if (it == ts.begin()) return vs.front();
    if (it == ts.end()) return vs.back();
    const size_t i = static_cast<size_t>(it - ts.begin()) - 1;
    const double u = (t - ts[i]) / (ts[i + 1] - ts[i]);
    return vs[i] + u * (vs[i + 1] - vs[i]);
  }

  double jump_factor(double t, Side side) const {
    if (jumps_.empty()) return 1.0;
    // Index of the last jump at or before t.
    size_t lo = 0, n = jumps_.size();
    while (lo < n && jumps_[lo].location < t) ++lo;
    // lo = first jump with location >= t.
    if (lo < n && jumps_[lo].location == t) {
      const double before = lo == 0 ? 1.0 : cum_factors_[lo - 1];
      const double after = cum_factors_[lo];
      switch (side) {
        case Side::left: return before;
        case Side::right: return after;
        case Side::mid: return 0.5 * (before + after);
      }
    }
    return lo == 0 ? 1.0 : cum_factors_[lo - 1];
  }

  double jump_factor_beyond(double t) const {
    double f = 1.0;
    for (size_t k = 0; k < jumps_.size(); ++k)
      if (jumps_[k].location <= t) f = cum_factors_[k];
    return f;
  }

  double finite_reciprocal(double a, double b) const {
    auto f = [this](double s) { return 1.0 / eval(s, Side::mid); };
    return integrate(f, a, b, {1e-14, 1e-12, 40000}, breakpoints()).value;
  }

  // int_x^inf ds / base_value(s), per family.
  double base_reciprocal_tail(double x) const {
    switch (kind_) {
      case Kind::euclidean: return std::pow(x, 2.0 - m_) / (m_ - 2);
      case Kind::power: return std::pow(x, 1.0 - expo_) / (coeff_ * (expo_ - 1));
      case Kind::hyperbolic: {
        if (m_ == 2) return log_coth_half(B_ * x) / B_;
        // u = e^{-Bs}: int = (2^{m-1}/B) int_0^{e^{-Bx}} u^{m-2} (1-u^2)^{1-m} du.
        const double ux = std::exp(-B_ * x);
        const int m = m_;
        auto g = [m](double u) {
          return std::pow(u, m - 2) * std::pow(1.0 - u * u, 1 - m);
        };
        const auto r = integrate(g, 0.0, ux, {1e-15, 1e-13, 40000});
        return std::pow(2.0, m - 1) / B_ * r.value;
      }
      case Kind::superexp: {
        if (x < 2.0) {
          auto f = [this](double s) { return 1.0 / base_eval(s, Side::mid); };
          const double head = integrate(f, x, 2.0, {1e-14, 1e-12, 40000}, {1.0}).value;
          return head + base_reciprocal_tail(2.0);
        }
        return envelope_reciprocal_tail(GrowthEnvelope(1.0, env_->a(), env_->alpha(), env_->beta()), x);
      }
      case Kind::exponential: return envelope_reciprocal_tail(*env_, x);
      case Kind::growth_potential: return generic_reciprocal_tail(x);
      default:
        throw divergence_error("reciprocal tail unsupported for " + describe());
    }
  }

  // Doubling panels with a geometric remainder estimate; valid whenever the
  // reciprocal decays at least like a convergent power tail.
  double generic_reciprocal_tail(double x) const {
    auto f = [this](double s) { return 1.0 / base_eval(s, Side::mid); };
    double acc = 0, lo = x, panel_prev = -1;
    for (int k = 0; k < 200; ++k) {
      const double hi = lo * 2;
      const double panel = integrate(f, lo, hi, {1e-15, 1e-12, 40000}).value;
      acc += panel;
      if (panel_prev > 0) {
        const double r = panel / panel_prev;
        if (r < 0.95) {
          const double bound = panel * r / (1 - r);
          if (bound < 1e-12 * acc) return acc + bound;
        }
      }
      panel_prev = panel;
      lo = hi;
    }
    throw accuracy_error("reciprocal tail truncation did not converge for " + describe());
  }

 public:
  // int_x^inf ds/f for an envelope; closed form when alpha=1, beta=0, else
  // panelwise integration truncated once a certified remainder bound drops
  // below 1e-10 of the accumulated value.
  static double envelope_reciprocal_tail(const GrowthEnvelope& f, double x) {
    if (!(x > f.domain_start()))
      throw domain_error("envelope reciprocal tail: x below envelope domain");
    if (f.alpha() == 1 && f.beta() == 0)
      return std::exp(-f.a() * x) / (f.a() * f.Lambda());
    double acc = 0, lo = x;
    for (int k = 0; k < 400; ++k) {
      // Advance so the exponent grows by ~25 per panel: integrand drops by
      // e^{-25} across it.
      const double rate = std::max(f.log_derivative(std::max(lo, f.domain_start() + 1e-9)), 1e-12);
      const double hi = lo + std::max(25.0 / rate, 1e-3 * std::max(lo, 1.0));
      auto g = [&f](double s) { return 1.0 / f.value(s); };
      acc += integrate(g, lo, hi, {1e-15, 1e-13, 40000}).value;
      // Remainder bound: sum of width/f(left end) over doubling blocks.
      double bound = 0, b = hi;
      for (int j = 0; j < 200; ++j) {
        const double term = b / f.value(b);
        bound += term;
        if (term < 1e-4 * bound || term == 0) break;
        b *= 2;
      }
      if (bound < 1e-10 * acc) return acc;
      lo = hi;
    }
    throw accuracy_error("envelope reciprocal tail truncation did not converge");
  }

 private:
  Kind kind_;
  int m_ = 0;
  double B_ = 0, H_ = 0, value_ = 0, coeff_ = 0, expo_ = 0, c_ = 0;
  double R_ = inf;
  double br_L1_ = 0, br_s0_ = 0, br_s1_ = 0;
  std::optional<GrowthEnvelope> env_;
  std::shared_ptr<const Table> table_;
  std::vector<Jump> jumps_;
  std::vector<double> cum_factors_;
};

// Envelope dominating the profile: same exponent family, Lambda enlarged so
// that value <= envelope on a dense sample (exact beyond the superexp bridge).
// log of int_x^inf ds/f, stable far past the point where the tail itself
// underflows: with E the envelope exponent,
//   log int = -E(x) - log Lambda + log int_0^inf e^{-(E(x+u) - E(x))} du,
// and the u-integral is O(1/E'(x)).
inline double log_reciprocal_tail(const GrowthEnvelope& f, double x) {
  if (!(x > f.domain_start()))
    throw domain_error("envelope log reciprocal tail: x below envelope domain");
  if (f.alpha() == 1 && f.beta() == 0) return -f.a() * x - std::log(f.a() * f.Lambda());
  const double Ex = f.exponent(x);
  auto rel = [&](double u) { return std::exp(-(f.exponent(x + u) - Ex)); };
  double acc = 0, lo = 0;
  bool done = false;
  for (int k = 0; k < 400 && !done; ++k) {
    const double rate = std::max(f.log_derivative(x + lo), 1e-12);
    const double hi = lo + std::max(5.0 / rate, 1e-6 * std::max(x, 1.0));
    acc += integrate(rel, lo, hi, {1e-15, 1e-13, 40000}).value;
    const double drop = f.exponent(x + hi) - Ex;
    if (drop > 45 &&
        std::exp(-drop) / std::max(f.log_derivative(x + hi), 1e-12) < 1e-12 * acc)
      done = true;
    lo = hi;
  }
  if (!done) throw accuracy_error("envelope log reciprocal tail did not converge");
  return -Ex - std::log(f.Lambda()) + std::log(acc);
}

inline GrowthEnvelope matching_envelope(const CoefficientProfile& p) {
  auto base = p.natural_envelope();
  if (!base) throw precondition_error("matching_envelope: profile has no envelope family");
  double lam = 1.0;
  const double lo = base->beta() == 0 ? 1e-6 : 1.0 + 1e-6;
  for (double t : linspace(lo, 2.0, 2001)) {
    const double ratio = p(t) / std::exp(base->exponent(t));
    lam = std::max(lam, ratio);
  }
  return GrowthEnvelope(lam * (1 + 1e-9), base->a(), base->alpha(), base->beta());
}

}  // namespace oscilla
