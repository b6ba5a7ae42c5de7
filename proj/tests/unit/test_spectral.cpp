#include <doctest.h>

#include <cmath>

#include "brwlab/errors.hpp"
#include "brwlab/spectral.hpp"

using namespace brwlab;

TEST_CASE("beta_critical values") {
  // recurrent walks: beta_c = 0
  CHECK(beta_critical(WalkKernel::simple(1)) == 0.0);
  CHECK(beta_critical(WalkKernel::simple(2)) == 0.0);
  // d=3 SRW: 1 / G_0(0,0) with G_0(0,0) the Watson integral
  CHECK(beta_critical(WalkKernel::simple(3)) ==
        doctest::Approx(1.0 / 1.516386059152).epsilon(2e-5));
  // heavy tail d=1, alpha=1/2
  CHECK(beta_critical(WalkKernel::heavy_tail(1, 0.5, 1.0)) ==
        doctest::Approx(0.795909244594).epsilon(2e-5));
}

TEST_CASE("lambda0 closed form for the d=1 simple walk") {
  // beta* G_lambda(0,0) = 1 with G = 1/sqrt(lambda(lambda+2)) gives
  // lambda0 = sqrt(1 + beta*^2) - 1
  auto k = WalkKernel::simple(1);
  CHECK(lambda0(k, 1.0).value() ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-9));
  CHECK(lambda0(k, 0.5).value() ==
        doctest::Approx(std::sqrt(1.25) - 1.0).epsilon(1e-9));
  CHECK_FALSE(lambda0(k, 0.0).has_value());
}

TEST_CASE("eigenvalue residual and monotonicity") {
  auto k = WalkKernel::simple(3);
  double bc = beta_critical(k);
  double prev = 0.0;
  for (double mult : {1.5, 2.0, 4.0}) {
    double bs = mult * bc;
    double l0 = lambda0(k, bs).value();
    CHECK(l0 > prev);
    prev = l0;
    double resid = bs * green(k, l0, Site::origin(), Site::origin()) - 1.0;
    CHECK(std::abs(resid) < 1e-8);
  }
}

TEST_CASE("no eigenvalue at or below the threshold") {
  auto k = WalkKernel::simple(3);
  double bc = beta_critical(k);
  CHECK_FALSE(lambda0(k, 0.5 * bc).has_value());
  CHECK_FALSE(lambda0(k, bc).has_value());
  CHECK(lambda0(k, 1.001 * bc).has_value());
  CHECK_THROWS_AS(critical_death_rate(k, 0.5 * bc), WrongRegime);
}

TEST_CASE("regime decision tree") {
  auto k1 = WalkKernel::simple(1);
  double l0 = lambda0(k1, 1.0).value();

  SUBCASE("pure walk") {
    auto r = classify(k1, OffspringLaw({{0, 0.5}}));
    CHECK(r.regime == Regime::PureWalk);
    CHECK(r.beta_star == 0.0);
    CHECK(r.death_rate == doctest::Approx(0.5));
    CHECK_FALSE(r.lambda0.has_value());
  }
  SUBCASE("supercritical") {
    auto r = classify(k1, OffspringLaw({{0, 0.1}, {2, 1.0}}));
    CHECK(r.regime == Regime::Supercritical);
    CHECK(r.lambda0.value() == doctest::Approx(l0).epsilon(1e-9));
    CHECK(r.lambda_E.value() == doctest::Approx(l0 - 0.1).epsilon(1e-8));
  }
  SUBCASE("critical") {
    auto r = classify(k1, OffspringLaw({{0, l0}, {2, 1.0}}));
    CHECK(r.regime == Regime::Critical);
  }
  SUBCASE("subcritical with eigenvalue") {
    auto r = classify(k1, OffspringLaw({{0, l0 + 0.2}, {2, 1.0}}));
    CHECK(r.regime == Regime::SubcriticalEigen);
    CHECK(r.lambda_E.value() == doctest::Approx(-0.2).epsilon(1e-7));
  }
  SUBCASE("boundary and weak need a transient walk") {
    auto k3 = WalkKernel::simple(3);
    double bc = beta_critical(k3);
    auto rb = classify(k3, OffspringLaw({{0, 0.3}, {2, bc}}));
    CHECK(rb.regime == Regime::SubcriticalBoundary);
    CHECK_FALSE(rb.lambda0.has_value());
    auto rw = classify(k3, OffspringLaw({{0, 0.3}, {2, 0.5 * bc}}));
    CHECK(rw.regime == Regime::SubcriticalWeak);
  }
}

TEST_CASE("critical death rate round trip") {
  auto k = WalkKernel::simple(1);
  double b0 = critical_death_rate(k, 1.0);
  CHECK(b0 == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-9));
  auto r = classify(k, OffspringLaw({{0, b0}, {2, 1.0}}));
  CHECK(r.regime == Regime::Critical);
}

TEST_CASE("regime names round trip") {
  for (Regime r : {Regime::PureWalk, Regime::Supercritical, Regime::Critical,
                   Regime::SubcriticalEigen, Regime::SubcriticalBoundary,
                   Regime::SubcriticalWeak})
    CHECK(regime_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(regime_from_string("bogus"), Error);
}
