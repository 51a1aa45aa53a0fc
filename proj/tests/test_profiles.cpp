#include <catch2/catch_amalgamated.hpp>

#include <oscilla/envelope.hpp>
#include <oscilla/profile.hpp>
#include <oscilla/quadrature.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace oscilla;

TEST_CASE("euclidean profile basics", "[profiles]") {
  const auto v = CoefficientProfile::euclidean(3);
  CHECK(v(2.0) == Catch::Approx(4.0).epsilon(1e-14));
  CHECK(v(0.0) == 0.0);
  CHECK(v.origin_limit() == 0.0);
  CHECK(v.is_volume_type());
  CHECK(v.breakpoints().empty());
  CHECK(v.reciprocal_integrable_at_infinity());
  CHECK_FALSE(v.integrable_at_infinity());
  // int_t^inf s^{-2} ds = 1/t.
  CHECK(v.reciprocal_tail_to_infinity(2.0) == Catch::Approx(0.5).epsilon(1e-12));

  const auto plane = CoefficientProfile::euclidean(2);
  CHECK_FALSE(plane.reciprocal_integrable_at_infinity());
  CHECK_THROWS_AS(plane.reciprocal_tail_to_infinity(1.0), divergence_error);
  CHECK_THROWS_AS(CoefficientProfile::euclidean(1), error);
}

TEST_CASE("hyperbolic profile matches sinh powers", "[profiles]") {
  const auto v = CoefficientProfile::hyperbolic(3, 2.0);
  CHECK(v(1.3) == Catch::Approx(sq(std::sinh(2.6))).epsilon(1e-13));
  CHECK(v.is_volume_type());

  // m = 2 tail has the closed form log(coth(Bt/2))/B.
  const auto plane = CoefficientProfile::hyperbolic(2, 1.0);
  const double tail = plane.reciprocal_tail_to_infinity(1.5);
  CHECK(tail == Catch::Approx(std::log(1.0 / std::tanh(0.75))).epsilon(1e-11));

  // m = 3 tail against direct quadrature with a manual cutoff.
  const auto space = CoefficientProfile::hyperbolic(3, 1.0);
  auto rec = [&](double s) { return 1.0 / space(s); };
  const double direct = integrate(rec, 2.0, 60.0, {1e-14, 1e-13, 40000}).value;
  CHECK(space.reciprocal_tail_to_infinity(2.0) == Catch::Approx(direct).epsilon(1e-10));
}

TEST_CASE("superexp bridge is continuous and monotone", "[profiles]") {
  const auto v = CoefficientProfile::superexp(3, 1.0, 1.0, 0.0);
  CHECK(v(0.5) == Catch::Approx(0.25).epsilon(1e-14));
  CHECK(v(3.0) == Catch::Approx(std::exp(3.0)).epsilon(1e-13));
  CHECK(v.eval(1.0, Side::left) == Catch::Approx(v.eval(1.0, Side::right)).epsilon(1e-12));
  CHECK(v.eval(2.0, Side::left) == Catch::Approx(v.eval(2.0, Side::right)).epsilon(1e-12));
  double prev = 0;
  for (double t : linspace(0.05, 4.0, 400)) {
    const double cur = v(t);
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK(v.is_volume_type());
  auto env = v.natural_envelope();
  REQUIRE(env.has_value());
  CHECK(env->Lambda() == 1.0);
  CHECK(env->a() == 1.0);
}

TEST_CASE("envelope-backed profile", "[profiles]") {
  const GrowthEnvelope f(2.0, 0.5, 1.0, 0.0);
  const auto v = CoefficientProfile::exponential(f);
  CHECK(v(3.0) == Catch::Approx(2.0 * std::exp(1.5)).epsilon(1e-14));
  CHECK(v.origin_limit() == 2.0);
  CHECK_FALSE(v.is_volume_type());
  // int_t^inf ds / (Lambda e^{a s}) = e^{-a t} / (a Lambda).
  CHECK(v.reciprocal_tail_to_infinity(2.0) ==
        Catch::Approx(std::exp(-1.0) / 1.0).epsilon(1e-12));
  CHECK(v.domain_start() == 0.0);

  const GrowthEnvelope g(1.0, 1.0, 1.0, 1.0);
  const auto w = CoefficientProfile::exponential(g);
  CHECK(w.domain_start() == 1.0);
}

TEST_CASE("capped potentials", "[profiles]") {
  const auto A = CoefficientProfile::capped_euler(1.0, 3);
  CHECK(A(0.2) == 0.25);
  CHECK(A.eval(1.0, Side::left) == 0.25);
  CHECK(A.eval(1.0, Side::right) == 1.0);
  CHECK(A(4.0) == Catch::Approx(1.0 / 16).epsilon(1e-14));
  REQUIRE(A.breakpoints().size() == 1);
  CHECK(A.breakpoints()[0] == 1.0);
  CHECK(A.integrable_at_infinity());
  CHECK_FALSE(A.reciprocal_integrable_at_infinity());

  const auto small = CoefficientProfile::capped_euler(0.4, 3);
  CHECK(small(0.5) == Catch::Approx(0.16).epsilon(1e-14));

  const auto Ah = CoefficientProfile::capped_hyperbolic(0.6, 2, 1.0);
  CHECK(Ah(0.3) == Catch::Approx(0.36 / std::tanh(1.0)).epsilon(1e-14));
  CHECK(Ah(5.0) == Catch::Approx(0.36 / std::tanh(5.0)).epsilon(1e-14));
}

TEST_CASE("growth potential and matching envelope", "[profiles]") {
  const GrowthEnvelope f(1.0, 1.0, 2.0, 0.0);
  const auto A = CoefficientProfile::growth_potential(f, 2.0);
  // [c a alpha/2 t^{alpha-1}]^2 = (2 t)^2.
  CHECK(A(3.0) == Catch::Approx(36.0).epsilon(1e-13));
  CHECK(A.origin_limit() == 0.0);

  const auto v = CoefficientProfile::superexp(3, 1.0, 1.0, 0.0);
  const auto env = matching_envelope(v);
  for (double t : linspace(1e-3, 2.0, 500)) CHECK(env.value(t) >= v(t) * (1 - 1e-12));
  CHECK_THROWS_AS(matching_envelope(CoefficientProfile::euclidean(3)), precondition_error);
}

TEST_CASE("sampled tables interpolate and validate", "[profiles]") {
  const auto v = CoefficientProfile::sampled({0.0, 1.0, 3.0}, {0.0, 2.0, 6.0});
  CHECK(v(0.5) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(v(2.0) == Catch::Approx(4.0).epsilon(1e-14));
  CHECK(v.domain_end() == 3.0);
  CHECK(v.is_volume_type());
  CHECK_THROWS_AS(v(3.5), domain_error);
  CHECK_THROWS_AS(CoefficientProfile::sampled({0.0, 1.0, 1.0}, {0.0, 1.0, 2.0}), error);
  CHECK_THROWS_AS(CoefficientProfile::sampled({0.0, 1.0}, {0.0, -1.0}), error);
  CHECK_THROWS_AS(CoefficientProfile::sampled({0.0, 1.0, 2.0}, {0.0, 0.0, 1.0}), error);
}

TEST_CASE("jumps scale the profile downward past each location", "[profiles]") {
  const auto base = CoefficientProfile::euclidean(3);
  const auto v = base.with_jumps({{2.0, 0.5}, {4.0, 0.25}});
  CHECK(v(1.0) == 1.0);
  CHECK(v.eval(2.0, Side::left) == Catch::Approx(4.0).epsilon(1e-14));
  CHECK(v.eval(2.0, Side::right) == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(v.eval(2.0, Side::mid) == Catch::Approx(3.0).epsilon(1e-14));
  CHECK(v(5.0) == Catch::Approx(25.0 * 0.125).epsilon(1e-14));
  REQUIRE(v.jumps().size() == 2);
  CHECK(v.jumps()[0].left_value >= v.jumps()[0].right_value);

  // Tail integral splits at the jumps: int_1^2 s^-2 + 2 int_2^4 s^-2 + 8 int_4^inf s^-2.
  const double expect = (1.0 - 0.5) + 2 * (0.5 - 0.25) + 8 * 0.25;
  CHECK(v.reciprocal_tail_to_infinity(1.0) == Catch::Approx(expect).epsilon(1e-11));

  CHECK_THROWS_AS(base.with_jumps({{2.0, 1.5}}), error);
  CHECK_THROWS_AS(base.with_jumps({{-1.0, 0.5}}), error);
}

TEST_CASE("log reciprocal tail agrees with direct evaluation", "[profiles]") {
  const GrowthEnvelope lin(1.5, 2.0, 1.0, 0.0);
  // Closed form: -a x - log(a Lambda).
  CHECK(log_reciprocal_tail(lin, 4.0) ==
        Catch::Approx(-8.0 - std::log(3.0)).epsilon(1e-13));

  const GrowthEnvelope quad(1.0, 1.0, 2.0, 0.0);
  const auto v = CoefficientProfile::exponential(quad);
  for (double x : {1.0, 2.5, 5.0}) {
    const double direct = v.reciprocal_tail_to_infinity(x);
    CHECK(log_reciprocal_tail(quad, x) == Catch::Approx(std::log(direct)).epsilon(1e-9));
  }
  // Far in the tail the direct integral underflows but the log stays finite.
  const double far = log_reciprocal_tail(quad, 100.0);
  CHECK(std::isfinite(far));
  // Bracket by -E(x) - log E'(x) (Laplace scale) within a small correction.
  const double rate = quad.log_derivative(100.0);
  CHECK(far == Catch::Approx(-quad.exponent(100.0) - std::log(rate)).margin(0.05));
}

TEST_CASE("growth envelope derivative identities", "[profiles]") {
  const GrowthEnvelope f(2.0, 0.7, 1.4, 1.0);
  const double t = 3.7, h = 1e-6;
  const double num = (f.exponent(t + h) - f.exponent(t - h)) / (2 * h);
  CHECK(f.log_derivative(t) == Catch::Approx(num).epsilon(1e-7));
  CHECK(f.value(t) == Catch::Approx(2.0 * std::exp(f.exponent(t))).epsilon(1e-13));
  CHECK(f.derivative(t) == Catch::Approx(f.value(t) * f.log_derivative(t)).epsilon(1e-12));
}
