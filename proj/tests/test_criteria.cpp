#include <catch2/catch_amalgamated.hpp>

#include <oscilla/criteria.hpp>
#include <oscilla/profile.hpp>

#include "oracles.hpp"

#include <cmath>
#include <optional>

using namespace oscilla;

namespace {
const CriterionReport& by_id(const std::vector<CriterionReport>& reports, const std::string& id) {
  for (const auto& r : reports)
    if (r.id == id) return r;
  FAIL("missing report id " + id);
  return reports.front();
}
}  // namespace

TEST_CASE("first zero window on the cone worked example", "[criteria]") {
  const auto v = CoefficientProfile::euclidean(3);
  const auto A = CoefficientProfile::capped_euler(1.0, 3);
  const auto rep = first_zero_test(v, A, 1.0, 40.0);
  CHECK(rep.verdict == Verdict::holds);
  // Closed forms: left = (1/2) log 40, right = (1/2) log 12 (head integral 1/12,
  // unit tail), and the localization radius solves 1/40 - 1/R = e^{-2(S - C0)}.
  CHECK(rep.left == Catch::Approx(0.5 * std::log(40.0)).epsilon(1e-6));
  CHECK(rep.right == Catch::Approx(0.5 * std::log(12.0)).epsilon(1e-6));
  const double target = std::exp(-2.0 * (std::log(40.0) - 0.5 * std::log(12.0)));
  const double R_expect = 1.0 / (1.0 / 40.0 - target);
  CHECK(rep.R_bar == Catch::Approx(R_expect).epsilon(1e-4));
  CHECK(rep.R_bar == Catch::Approx(57.13).epsilon(1e-2));
}

TEST_CASE("first zero window fails below the critical rate", "[criteria]") {
  const auto v = CoefficientProfile::euclidean(3);
  const auto A = CoefficientProfile::capped_euler(0.4, 3);
  const auto rep = first_zero_test(v, A, 1.0, 40.0);
  CHECK(rep.verdict == Verdict::fails);
  CHECK_FALSE(std::isfinite(rep.R_bar));
}

TEST_CASE("first zero scan finds a holding window", "[criteria]") {
  const auto v = CoefficientProfile::euclidean(3);
  const auto A = CoefficientProfile::capped_euler(1.0, 3);
  const auto rep = first_zero_scan(v, A, 100.0);
  CHECK(rep.verdict == Verdict::holds);
  CHECK(rep.T < rep.t);
  CHECK(std::isfinite(rep.R_bar));
}

TEST_CASE("first zero preconditions", "[criteria]") {
  const auto v = CoefficientProfile::euclidean(3);
  const auto zero = CoefficientProfile::capped_euler(0.0, 3);
  CHECK_THROWS_AS(first_zero_test(v, zero, 1.0, 40.0), precondition_error);
  const auto A = CoefficientProfile::capped_euler(1.0, 3);
  CHECK_THROWS_AS(first_zero_test(v, A, 5.0, 2.0), parameter_error);
}

TEST_CASE("oscillation via non-integrable reciprocal branch", "[criteria]") {
  // v = t (plane): 1/v not integrable; A v = H^2/t beyond the cap, whose
  // dyadic increments are constant.
  const auto v = CoefficientProfile::euclidean(2);
  const auto A = CoefficientProfile::capped_euler(0.5, 2);
  const auto rep = oscillation_test(v, A, 400.0);
  CHECK_FALSE(rep.reciprocal_integrable);
  CHECK(rep.verdict == Verdict::holds);

  // A v ~ t^{-2} is integrable: the increment test must stay inconclusive.
  const auto small = CoefficientProfile::power(1.0, -3.0);
  const auto rep2 = oscillation_test(v, small, 400.0);
  CHECK(rep2.verdict == Verdict::inconclusive);
}

TEST_CASE("oscillation via unbounded excess branch", "[criteria]") {
  const auto v = CoefficientProfile::exponential(GrowthEnvelope(1.0, 1.0, 1.0, 0.0));
  const auto rep = oscillation_test(v, CoefficientProfile::constant(1.0), 100.0);
  CHECK(rep.reciprocal_integrable);
  CHECK(rep.verdict == Verdict::holds);
  // Exactly critical constant potential: the excess is flat, no divergence.
  const auto flat = oscillation_test(v, CoefficientProfile::constant(0.25), 100.0);
  CHECK(flat.verdict == Verdict::inconclusive);
}

TEST_CASE("sufficient conditions on the oscillatory hyperbolic plane", "[criteria]") {
  const auto v = CoefficientProfile::hyperbolic(2, 1.0);
  const auto A = CoefficientProfile::capped_hyperbolic(0.6, 2, 1.0);
  // Start past the cap: the conditions are asymptotic, and inside [0, 1) the
  // capped potential sits below the critical function of the plane.
  CriteriaOptions copt;
  copt.t0 = 1.0;
  const auto reports = sufficient_conditions(v, A, std::nullopt, 200.0, copt);
  REQUIRE(reports.size() == 5);

  CHECK(by_id(reports, "pointwise_excess").verdict == Verdict::holds);
  CHECK(by_id(reports, "integral_ratio").verdict == Verdict::holds);

  const auto& ratio = by_id(reports, "pointwise_ratio");
  CHECK(ratio.verdict == Verdict::holds);
  // A / chi -> 4 H^2 = 1.44, so the sqrt ratio tends to 1.2.
  CHECK(ratio.left == Catch::Approx(1.2).epsilon(5e-3));

  CHECK(by_id(reports, "log_tail_ratio").verdict == Verdict::holds);
  // No envelope was supplied.
  CHECK(by_id(reports, "envelope_beat").verdict == Verdict::inconclusive);
}

TEST_CASE("sufficient conditions below the critical curve", "[criteria]") {
  const auto v = CoefficientProfile::hyperbolic(2, 1.0);
  const auto A = CoefficientProfile::capped_hyperbolic(0.45, 2, 1.0);
  const auto reports = sufficient_conditions(v, A, std::nullopt, 200.0);
  CHECK(by_id(reports, "pointwise_excess").verdict == Verdict::fails);
  CHECK(by_id(reports, "pointwise_ratio").verdict == Verdict::fails);
}

TEST_CASE("envelope beating sequence", "[criteria]") {
  const auto v = CoefficientProfile::superexp(3, 1.0, 1.0, 0.0);
  const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
  const auto strong =
      sufficient_conditions(v, CoefficientProfile::constant(0.6), f, 100.0);
  CHECK(by_id(strong, "envelope_beat").verdict == Verdict::holds);

  const auto weak =
      sufficient_conditions(v, CoefficientProfile::constant(0.2), f, 100.0);
  CHECK(by_id(weak, "envelope_beat").verdict == Verdict::inconclusive);
}

TEST_CASE("interval gap criterion", "[criteria]") {
  const auto v = CoefficientProfile::exponential(GrowthEnvelope(1.0, 1.0, 1.0, 0.0));
  const auto above = hille_nehari_gap(v, CoefficientProfile::constant(1.0), 100.0);
  CHECK(above.verdict == Verdict::holds);
  CHECK(above.left == Catch::Approx(1.0).epsilon(1e-6));

  const auto critical = hille_nehari_gap(v, CoefficientProfile::constant(0.25), 100.0);
  CHECK(critical.verdict == Verdict::fails);
  CHECK(critical.borderline);

  CHECK_THROWS_AS(
      hille_nehari_gap(CoefficientProfile::euclidean(2), CoefficientProfile::constant(1.0), 100.0),
      precondition_error);
}
