#include <catch2/catch_amalgamated.hpp>

#include <oscilla/critical.hpp>
#include <oscilla/profile.hpp>
#include <oscilla/quadrature.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace oscilla;

TEST_CASE("chi closed forms", "[critical]") {
  // Cone volumes: chi = ((m-2)/2)^2 / t^2.
  for (int m : {3, 4, 6}) {
    const auto v = CoefficientProfile::euclidean(m);
    for (double t : {0.5, 2.0, 17.0})
      CHECK(chi(v, t) == Catch::Approx(oracles::chi_cone(m, t)).epsilon(1e-11));
  }
  // sinh volume, m = 2.
  const auto h = CoefficientProfile::hyperbolic(2, 1.0);
  for (double t : {0.7, 3.0, 12.0})
    CHECK(chi(h, t) == Catch::Approx(oracles::chi_sinh(1.0, t)).epsilon(1e-10));
  // Pure exponential volume: chi is identically 1/4.
  const auto e = CoefficientProfile::exponential(GrowthEnvelope(1.0, 1.0, 1.0, 0.0));
  for (double t : {1.0, 10.0, 30.0})
    CHECK(chi(e, t) == Catch::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("chi with a finite radius exceeds the unbounded value", "[critical]") {
  const auto v = CoefficientProfile::euclidean(3);
  for (double t : {1.0, 5.0, 20.0}) {
    const double bounded = chi(v, t, 50.0);
    CHECK(bounded > chi(v, t));
    // Closed form: tail = 1/t - 1/R.
    const double tail = 1.0 / t - 1.0 / 50.0;
    CHECK(bounded == Catch::Approx(1.0 / sq(2.0 * t * t * tail)).epsilon(1e-10));
  }
}

TEST_CASE("chi precondition failures", "[critical]") {
  const auto plane = CoefficientProfile::euclidean(2);
  CHECK_THROWS_AS(chi(plane, 1.0), divergence_error);
  CHECK(tail_integral(plane, 1.0) == inf);
  CHECK_THROWS_AS(CriticalCurve(plane, inf), divergence_error);
  const auto v = CoefficientProfile::euclidean(3);
  CHECK_THROWS_AS(chi(v, 1e-9), resolution_error);
}

TEST_CASE("envelope critical functions", "[critical]") {
  const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
  // chi_f of a pure exponential envelope is 1/4 at any depth; the log-space
  // route must survive far past the underflow point of the direct tail.
  CHECK(chi_f(f, 2.0) == Catch::Approx(0.25).epsilon(1e-11));
  CHECK(chi_f(f, 500.0) == Catch::Approx(0.25).epsilon(1e-9));
  CHECK(chi_tilde_f(f, 7.0) == Catch::Approx(0.25).epsilon(1e-13));

  // chi_f equals chi of the profile realizing the envelope exactly.
  const GrowthEnvelope g(2.0, 0.8, 1.3, 0.0);
  const auto vg = CoefficientProfile::exponential(g);
  for (double t : {1.0, 3.0, 6.0})
    CHECK(chi_f(g, t) == Catch::Approx(chi(vg, t)).epsilon(1e-8));

  // chi_tilde_f = (E'/2)^2.
  CHECK(chi_tilde_f(g, 4.0) ==
        Catch::Approx(sq(0.5 * g.log_derivative(4.0))).epsilon(1e-13));
}

TEST_CASE("critical curve matches pointwise evaluation", "[critical]") {
  const auto v = CoefficientProfile::hyperbolic(3, 1.0);
  const CriticalCurve curve(v, inf, {1e-3, 60.0, 2048});
  for (double t : {0.01, 0.37, 1.0, 4.9, 23.0, 59.0})
    CHECK(curve(t) == Catch::Approx(chi(v, t)).epsilon(1e-8));
  CHECK(curve.tail(2.0) == Catch::Approx(tail_integral(v, 2.0)).epsilon(1e-9));

  const auto b = CoefficientProfile::euclidean(3);
  const CriticalCurve bounded(b, 50.0);
  for (double t : {0.5, 3.0, 30.0})
    CHECK(bounded(t) == Catch::Approx(chi(b, t, 50.0)).epsilon(1e-8));
}

TEST_CASE("critical curve handles jump discontinuities", "[critical]") {
  const auto v = CoefficientProfile::euclidean(3).with_jumps({{3.0, 0.5}});
  const CriticalCurve curve(v, inf, {1e-2, 40.0, 1024});
  for (double t : {2.9, 2.999, 3.001, 3.5, 20.0})
    CHECK(curve(t) == Catch::Approx(chi(v, t)).epsilon(1e-6));
}

TEST_CASE("square root integral identity", "[critical]") {
  const auto cases = {CoefficientProfile::euclidean(3),
                      CoefficientProfile::hyperbolic(3, 1.0),
                      CoefficientProfile::superexp(3, 1.0, 1.0, 0.0)};
  for (const auto& v : cases) {
    const CriticalCurve curve(v, inf, {0.5, 60.0, 2048});
    auto root = [&](double s) { return std::sqrt(chi(v, s)); };
    const double direct = integrate(root, 2.0, 20.0, {1e-13, 1e-11, 40000}).value;
    const double fast = curve.sqrt_chi_integral(2.0, 20.0);
    CHECK(fast == Catch::Approx(direct).epsilon(1e-9));
  }
  // Cone closed form: int sqrt(chi) = (1/2) log(t/T) for m = 3.
  const CriticalCurve cone(CoefficientProfile::euclidean(3), inf, {0.5, 60.0, 2048});
  CHECK(cone.sqrt_chi_integral(2.0, 20.0) ==
        Catch::Approx(0.5 * std::log(10.0)).epsilon(1e-9));
}

TEST_CASE("envelope curve variants", "[critical]") {
  const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
  const CriticalCurve cf(f, CriticalVariant::chi_f, {0.5, 80.0, 1024});
  for (double t : {1.0, 10.0, 60.0})
    CHECK(cf(t) == Catch::Approx(0.25).epsilon(1e-8));
  CHECK(cf.sqrt_chi_integral(2.0, 42.0) == Catch::Approx(20.0).epsilon(1e-8));

  const CriticalCurve ct(f, CriticalVariant::chi_tilde_f);
  CHECK(ct(33.0) == Catch::Approx(0.25).epsilon(1e-13));
  CHECK(ct.sqrt_chi_integral(2.0, 42.0) == Catch::Approx(20.0).epsilon(1e-13));
  CHECK_THROWS_AS(ct.tail(2.0), precondition_error);
  CHECK_THROWS_AS(CriticalCurve(f, CriticalVariant::chi), parameter_error);
}
