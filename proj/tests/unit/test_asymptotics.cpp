#include <doctest.h>

#include <cmath>
#include <vector>

#include "brwlab/asymptotics.hpp"
#include "brwlab/errors.hpp"

using namespace brwlab;

namespace {

RegimeReport report(Regime r, double b0, double lambda_e = 0) {
  RegimeReport rep;
  rep.regime = r;
  rep.death_rate = b0;
  if (r == Regime::Supercritical || r == Regime::SubcriticalEigen ||
      r == Regime::Critical) {
    rep.lambda0 = lambda_e + b0;
    rep.lambda_E = lambda_e;
  }
  return rep;
}

SampledFunction sampled(double lo, double hi, int n,
                        double (*f)(double), double rho, double kappa,
                        double eta = 0) {
  SampledFunction s;
  s.rho = rho;
  s.kappa = kappa;
  s.eta = eta;
  s.t.resize(n);
  s.v.resize(n);
  for (int i = 0; i < n; ++i) {
    s.t[i] = lo + (hi - lo) * i / (n - 1);
    s.v[i] = f(s.t[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("asymptote table: eigenvalue regimes") {
  auto sup = report(Regime::Supercritical, 0.1, 0.3);
  for (int n : {1, 2, 3}) {
    for (auto variant : {MomentVariant::Local, MomentVariant::Total}) {
      auto f = predicted_asymptote(sup, 1, {}, n, variant);
      CHECK(f.rho == doctest::Approx(0.3 * n));
      CHECK(f.kappa == 0.0);
      CHECK(f.eta == 0.0);
    }
  }
  auto crit = report(Regime::Critical, 0.4, 0.0);
  for (int n : {1, 2, 3, 4}) {
    auto f = predicted_asymptote(crit, 1, {}, n, MomentVariant::Local);
    CHECK(f.rho == 0.0);
    CHECK(f.kappa == doctest::Approx(n - 1.0));
    auto g = predicted_asymptote(crit, 1, {}, n, MomentVariant::Total);
    CHECK(g.kappa == doctest::Approx(n - 1.0));
  }
  auto sub = report(Regime::SubcriticalEigen, 0.6, -0.2);
  for (int n : {1, 2, 3}) {
    auto f = predicted_asymptote(sub, 1, {}, n, MomentVariant::Local);
    CHECK(f.rho == doctest::Approx(-0.2));  // same rate for every order
    CHECK(f.kappa == 0.0);
  }
}

TEST_CASE("asymptote table: boundary, finite variance") {
  auto rep = report(Regime::SubcriticalBoundary, 0.3);
  struct Row {
    int dim;
    double local_kappa, local_eta, total_kappa, total_eta;
  };
  for (const Row& row : std::vector<Row>{{3, -0.5, 0, 0.5, 0},
                                         {4, 0, -1, 1, -1},
                                         {5, 0, 0, 1, 0}}) {
    auto l = predicted_asymptote(rep, row.dim, {}, 1, MomentVariant::Local);
    CHECK(l.rho == doctest::Approx(-0.3));
    CHECK(l.kappa == doctest::Approx(row.local_kappa));
    CHECK(l.eta == doctest::Approx(row.local_eta));
    auto t = predicted_asymptote(rep, row.dim, {}, 1, MomentVariant::Total);
    CHECK(t.kappa == doctest::Approx(row.total_kappa));
    CHECK(t.eta == doctest::Approx(row.total_eta));
    // higher moments share the first-moment row
    auto l3 = predicted_asymptote(rep, row.dim, {}, 3, MomentVariant::Local);
    CHECK(l3.kappa == l.kappa);
    CHECK(l3.eta == l.eta);
    CHECK(l3.rho == l.rho);
  }
}

TEST_CASE("asymptote table: boundary, heavy tails") {
  auto rep = report(Regime::SubcriticalBoundary, 0.25);
  // r = d/alpha in (1,2): kappa = r-2 local, r-1 total
  auto l = predicted_asymptote(rep, 1, 0.7, 1, MomentVariant::Local);
  double r = 1.0 / 0.7;
  CHECK(l.kappa == doctest::Approx(r - 2));
  CHECK(l.eta == 0.0);
  auto t = predicted_asymptote(rep, 1, 0.7, 1, MomentVariant::Total);
  CHECK(t.kappa == doctest::Approx(r - 1));
  // r = 2: log corrections
  auto l2 = predicted_asymptote(rep, 2, 1.0, 1, MomentVariant::Local);
  CHECK(l2.kappa == 0.0);
  CHECK(l2.eta == doctest::Approx(-1.0));
  auto t2 = predicted_asymptote(rep, 2, 1.0, 1, MomentVariant::Total);
  CHECK(t2.kappa == doctest::Approx(1.0));
  CHECK(t2.eta == doctest::Approx(-1.0));
  // r > 2: constants and linear growth
  auto l3 = predicted_asymptote(rep, 3, 1.0, 1, MomentVariant::Local);
  CHECK(l3.kappa == 0.0);
  CHECK(l3.eta == 0.0);
  auto t3 = predicted_asymptote(rep, 3, 1.0, 1, MomentVariant::Total);
  CHECK(t3.kappa == doctest::Approx(1.0));
}

TEST_CASE("asymptote table: weak subcritical and pure walk") {
  auto weak = report(Regime::SubcriticalWeak, 0.3);
  auto l = predicted_asymptote(weak, 3, {}, 2, MomentVariant::Local);
  CHECK(l.rho == doctest::Approx(-0.3));
  CHECK(l.kappa == doctest::Approx(-1.5));
  auto t = predicted_asymptote(weak, 3, {}, 2, MomentVariant::Total);
  CHECK(t.kappa == 0.0);
  auto lh = predicted_asymptote(weak, 1, 0.5, 1, MomentVariant::Local);
  CHECK(lh.kappa == doctest::Approx(-2.0));
  auto th = predicted_asymptote(weak, 1, 0.5, 1, MomentVariant::Total);
  CHECK(th.kappa == 0.0);

  auto pure = report(Regime::PureWalk, 0.5);
  auto pl = predicted_asymptote(pure, 2, {}, 1, MomentVariant::Local);
  CHECK(pl.rho == doctest::Approx(-0.5));
  CHECK(pl.kappa == doctest::Approx(-1.0));
  auto ph = predicted_asymptote(pure, 1, 0.8, 1, MomentVariant::Local);
  CHECK(ph.kappa == doctest::Approx(-1.25));
  auto pt = predicted_asymptote(pure, 2, {}, 1, MomentVariant::Total);
  CHECK(pt.kappa == 0.0);
}

TEST_CASE("unsupported combinations") {
  auto bound = report(Regime::SubcriticalBoundary, 0.3);
  CHECK_THROWS_AS(
      predicted_asymptote(bound, 2, {}, 1, MomentVariant::Local),
      UnsupportedCombination);
  CHECK_THROWS_AS(
      predicted_asymptote(bound, 1, 1.5, 1, MomentVariant::Local),
      UnsupportedCombination);
  auto weak = report(Regime::SubcriticalWeak, 0.3);
  CHECK_THROWS_AS(predicted_asymptote(weak, 1, {}, 1, MomentVariant::Total),
                  UnsupportedCombination);
  CHECK_THROWS_AS(predicted_asymptote(weak, 2, 2.5, 1, MomentVariant::Total),
                  UnsupportedCombination);
}

TEST_CASE("lemma convolution: exponential closed form") {
  auto phi = sampled(0, 20, 1601, [](double t) { return std::exp(-t); },
                     -1.0, 0.0);
  auto chi = sampled(0, 20, 1601, [](double t) { return std::exp(-2 * t); },
                     -2.0, 0.0);
  auto res = lemma_convolve(phi, chi, 1.0);
  CHECK(res.w0 == doctest::Approx(1.0).epsilon(1e-3));
  for (double t : {1.0, 5.0, 10.0}) {
    std::size_t i = 0;
    while (res.w.t[i] != t) ++i;
    double exact = std::exp(-t) - std::exp(-2 * t);
    CHECK(res.w.v[i] == doctest::Approx(exact).epsilon(1e-3));
  }
}

TEST_CASE("lemma convolution: regularly varying prefactors") {
  // phi = t^{-1/2} e^{-t}, chi = t^{-1} e^{-2t}, both smoothed below t = 1;
  // W(t) / phi(t) -> W0
  auto phi = sampled(
      0, 60, 6001,
      [](double t) { return std::pow(std::max(t, 1.0), -0.5) * std::exp(-t); },
      -1.0, -0.5);
  auto chi = sampled(
      0, 40, 4001,
      [](double t) { return std::exp(-2 * t) / std::max(t, 1.0); }, -2.0,
      -1.0);
  auto res = lemma_convolve(phi, chi, 1.0);
  double t = 50.0;
  std::size_t i = 0;
  while (res.w.t[i] != t) ++i;
  double ratio = res.w.v[i] * std::sqrt(t) * std::exp(t) / res.w0;
  CHECK(ratio == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("lemma convolution: scaling chi scales W0") {
  auto phi = sampled(0, 10, 801, [](double t) { return std::exp(-t); },
                     -1.0, 0.0);
  auto chi = sampled(0, 10, 801, [](double t) { return std::exp(-3 * t); },
                     -3.0, 0.0);
  auto a = lemma_convolve(phi, chi, 1.0);
  for (double& v : chi.v) v *= 3.0;
  auto b = lemma_convolve(phi, chi, 1.0);
  CHECK(b.w0 == doctest::Approx(3.0 * a.w0).epsilon(1e-13));
}

TEST_CASE("lemma convolution: hypothesis gate") {
  auto phi = sampled(0, 10, 801, [](double t) { return std::exp(-t); },
                     -1.0, 0.0);
  // chi ~ s^{-1/2} e^{-b0 s}: e^{b0 s} chi is not integrable
  auto chi = sampled(
      1, 10, 801,
      [](double t) { return std::pow(t, -0.5) * std::exp(-0.4 * t); }, -0.4,
      -0.5);
  CHECK_THROWS_AS(lemma_convolve(phi, chi, 0.4), TailUnbounded);
  // a faster-decaying chi with the same prefactor is fine
  chi.rho = -0.8;
  CHECK_NOTHROW(lemma_convolve(phi, chi, 0.4));
}

TEST_CASE("validate_regime on solved trajectories") {
  auto k = WalkKernel::simple(1);

  SUBCASE("supercritical exponents pass") {
    OffspringLaw law({{0, 0.1}, {2, 1.0}});
    auto rep = classify(k, law);
    SolveOptions o;
    o.orders = 2;
    o.radius = 100;
    o.horizon = 30;
    auto tr = solve_moments(k, law, o);
    auto verdicts = validate_regime(k, law, rep, tr);
    REQUIRE(verdicts.size() == 2);
    for (const auto& v : verdicts) {
      CHECK(v.pass);
      CHECK(v.fit.rho ==
            doctest::Approx(v.order * rep.lambda_E.value()).epsilon(0.01));
    }
  }
  SUBCASE("pure walk is checked pointwise") {
    OffspringLaw law({{0, 0.5}});
    auto rep = classify(k, law);
    SolveOptions o;
    o.radius = 60;
    o.horizon = 5;
    auto tr = solve_moments(k, law, o);
    auto verdicts = validate_regime(k, law, rep, tr);
    REQUIRE(verdicts.size() == 1);
    CHECK(verdicts[0].pass);
  }
  SUBCASE("window outside the trajectory") {
    OffspringLaw law({{0, 0.5}});
    auto rep = classify(k, law);
    SolveOptions o;
    o.radius = 60;
    o.horizon = 5;
    auto tr = solve_moments(k, law, o);
    ValidationOptions vo;
    vo.window_lo = 10;
    vo.window_hi = 20;
    CHECK_THROWS_AS(validate_regime(k, law, rep, tr, vo), WindowTooShort);
  }
}
