#include <catch2/catch_amalgamated.hpp>

#include <oscilla/profile.hpp>
#include <oscilla/spectral.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace oscilla;

TEST_CASE("growth constant closed forms", "[spectral]") {
  const auto r2 = principale_constant(1.0, 2.0);
  CHECK(r2.value == Catch::Approx(17.0 + 12.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r2.c_star == Catch::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK_FALSE(r2.boundary_minimum);

  for (double alpha : {1.3, 1.5, 2.0, 3.7}) {
    const auto r = principale_constant(2.0, alpha);
    CHECK(r.c_star == Catch::Approx(oracles::principale_minimizer(alpha)).epsilon(1e-12));
    CHECK(r.value == Catch::Approx(oracles::principale_value(2.0, alpha)).epsilon(1e-12));
  }

  const auto r1 = principale_constant(3.0, 1.0);
  CHECK(r1.value == 2.25);
  CHECK(r1.c_star == 1.0);
  CHECK(r1.boundary_minimum);

  const auto r0 = principale_constant(1.0, 0.5);
  CHECK(r0.value == 0.0);
  CHECK(r0.alpha_below_one);

  CHECK_THROWS_AS(principale_constant(-1.0, 2.0), parameter_error);
}

TEST_CASE("growth constant is continuous at the boundary exponent", "[spectral]") {
  // The infimum degenerates to the boundary as alpha -> 1+; the computed
  // value approaches a^2/4 like 4 (alpha-1) log(1/(alpha-1)).
  CHECK(principale_constant(1.0, 1.0 + 1e-3).value ==
        Catch::Approx(0.25).epsilon(5e-2));
  CHECK(principale_constant(1.0, 1.0 + 1e-4).value ==
        Catch::Approx(0.25).epsilon(1e-2));
}

TEST_CASE("model lower bound and the density it comes from", "[spectral]") {
  const auto est = model_lower_bound(1.0, 2.0, 10.0, 3);
  CHECK(est.model_lower == Catch::Approx(99.9975).epsilon(1e-9));
  CHECK(est.b_tilde == Catch::Approx(0.5025).epsilon(1e-12));
  // Dropping the curvature term is the only difference from lambda_b.
  const double full = lambda_b(1.0, 2.0, est.b_tilde, 10.0);
  const double curvature = 2.0 * est.b_tilde;  // alpha (alpha-1) b R^{alpha-2}
  CHECK(full - est.model_lower == Catch::Approx(curvature).epsilon(1e-9));

  // alpha = 1 collapses to b(a-b) at b = a/2 exactly, any radius.
  CHECK(model_lower_bound(1.0, 1.0, 30.0, 3).model_lower == 0.25);
  CHECK(model_lower_bound(2.0, 1.0, 5.0, 2).model_lower == 1.0);

  // Too small a radius pushes the optimal exponent out of (0, a).
  CHECK_THROWS_AS(model_lower_bound(1.0, 2.0, 0.4, 3), parameter_error);
}

TEST_CASE("window infimum of the tail rate", "[spectral]") {
  const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
  // -1/2 log int_{r+u}^inf e^{-s} ds / u = (r + u) / (2u), minimized at the
  // window edge: value slightly above 1/2.
  const double v20 = lemma_infimum(f, 20.0);
  CHECK(v20 > 0.5);
  CHECK(v20 < 0.53);
  const double wide = lemma_infimum(f, 20.0, 4096.0);
  CHECK(wide < v20);
  CHECK(wide > 0.5);
  CHECK_THROWS_AS(lemma_infimum(f, 20.0, 0.5), parameter_error);
}

TEST_CASE("windowed potential is monotone and near the critical level", "[spectral]") {
  const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
  const auto A = spectral_potential(f, 5e-3, 25.0, 200.0);
  CHECK(A.domain_end() == 200.0);
  double prev = 0;
  for (double t : linspace(25.5, 199.5, 150)) {
    const double a = A(t);
    CHECK(a >= prev * (1 - 1e-12));
    CHECK(a == Catch::Approx(0.255).margin(0.01));
    prev = a;
  }
}

TEST_CASE("spectral sandwich on the exponential model", "[spectral]") {
  const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
  const auto v = CoefficientProfile::superexp(3, 1.0, 1.0, 0.0);
  const auto est = spectral_summary(v, f, 30.0, 3, true);

  CHECK(est.model_lower == 0.25);
  CHECK(est.asymptotic_constant == 0.25);
  CHECK(est.c_star == 1.0);
  REQUIRE(est.T1 > 30.0);
  REQUIRE(est.T2 > est.T1);

  // Upper bound: within 5% of the bottom of the spectrum.
  CHECK(est.upper_bound >= 0.25);
  CHECK(est.upper_bound <= 0.25 * 1.05);
  CHECK(est.upper_bound <= est.quotient_cap * (1 + 1e-6));

  // The quotient function is admissible for the annulus eigenvalue, so the
  // independent grid oracle must sit between the model bound and the quotient.
  REQUIRE(std::isfinite(est.fd_oracle));
  CHECK(est.fd_oracle >= 0.25 * (1 - 1e-6));
  CHECK(est.fd_oracle <= est.upper_bound * (1 + 5e-3));

  // Beyond the bridge the volume is exactly e^t, so the annulus eigenvalue
  // has a closed form.
  const double L = est.T2 - est.T1;
  CHECK(est.fd_oracle ==
        Catch::Approx(oracles::exp_volume_eigenvalue(L)).epsilon(1e-4));
}

TEST_CASE("divergent reciprocal tail short-circuits to zero", "[spectral]") {
  const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
  const auto plane = CoefficientProfile::euclidean(2);
  const auto est = rayleigh_upper(plane, f, 10.0);
  CHECK(est.zero_branch);
  CHECK(est.upper_bound == 0.0);
}

TEST_CASE("finite difference oracle on closed-form intervals", "[spectral]") {
  // Flat volume on [0, pi]: first Dirichlet eigenvalue 1.
  const auto flat = CoefficientProfile::constant(1.0);
  CHECK(fd_eigenvalue_oracle(flat, 0.0, oracles::pi, 512) ==
        Catch::Approx(1.0).epsilon(1e-7));

  // Exponential volume on [0, 40]: 1/4 + (pi/40)^2.
  const auto e = CoefficientProfile::exponential(GrowthEnvelope(1.0, 1.0, 1.0, 0.0));
  CHECK(fd_eigenvalue_oracle(e, 0.0, 40.0, 512) ==
        Catch::Approx(oracles::exp_volume_eigenvalue(40.0)).epsilon(1e-5));

  // Discretization error scales like h^2: successive grids contract by 4.
  const double l1 = fd_eigenvalue_single(e, 0.0, 40.0, 256);
  const double l2 = fd_eigenvalue_single(e, 0.0, 40.0, 512);
  const double l3 = fd_eigenvalue_single(e, 0.0, 40.0, 1024);
  const double ratio = (l1 - l2) / (l2 - l3);
  CHECK(ratio == Catch::Approx(4.0).margin(0.8));

  CHECK_THROWS_AS(fd_eigenvalue_single(flat, 1.0, 1.0, 64), parameter_error);
  CHECK_THROWS_AS(fd_eigenvalue_single(flat, 0.0, 1.0, 8), parameter_error);
}

TEST_CASE("index growth rate on the exponential model", "[spectral]") {
  const GrowthEnvelope f(1.0, 1.0, 1.0, 0.0);
  const auto v = CoefficientProfile::exponential(f);
  const auto est = index_lower_bound(v, f, 2.0, 50.0);
  CHECK(est.predicted_rate == Catch::Approx(1.0 / (2 * std::log(3.0))).epsilon(1e-12));
  CHECK(est.annuli >= 10);
  CHECK(est.rate > est.predicted_rate);
  CHECK(est.exceeds);

  // A volume above its envelope violates the comparison hypothesis.
  const auto big = CoefficientProfile::exponential(GrowthEnvelope(1.0, 2.0, 1.0, 0.0));
  CHECK_THROWS_AS(index_lower_bound(big, f, 2.0, 50.0), precondition_error);
}
