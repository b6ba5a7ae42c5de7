#include <doctest.h>

#include <cmath>
#include <vector>

#include "brwlab/errors.hpp"
#include "brwlab/walk_kernel.hpp"

using namespace brwlab;

TEST_CASE("construction rejects invalid intensities") {
  CHECK_THROWS_AS(WalkKernel::finite_support(1, {}), ZeroSupport);
  CHECK_THROWS_AS(
      WalkKernel::finite_support(1, {{Site{1}, 0.5}, {Site{-1}, 0.25}}),
      AsymmetricKernel);
  CHECK_THROWS_AS(WalkKernel::finite_support(
                      1, {{Site{1}, -0.5}, {Site{-1}, -0.5}}),
                  NegativeIntensity);
  CHECK_THROWS_AS(WalkKernel::heavy_tail(1, 2.5, 1.0), TailDivergence);
  CHECK_THROWS_AS(WalkKernel::heavy_tail(1, 0.0, 1.0), TailDivergence);
}

TEST_CASE("simple kernel basics") {
  auto k = WalkKernel::simple(2);
  CHECK(k.total_rate() == doctest::Approx(1.0));
  CHECK(k.rate(Site{1, 0}) == doctest::Approx(0.25));
  CHECK(k.rate(Site{0, -1}) == doctest::Approx(0.25));
  CHECK(k.rate(Site{1, 1}) == 0.0);
  CHECK(k.coordinate_variance_rate(0) == doctest::Approx(0.5));
  CHECK(k.coordinate_variance_rate(1) == doctest::Approx(0.5));
}

TEST_CASE("d=1 transition probability closed form") {
  // p(t,0,0) = e^{-t} I_0(t) for the rate-1 simple walk
  auto k = WalkKernel::simple(1);
  CHECK(transition_probability(k, 1.0, Site{0}, Site{0}) ==
        doctest::Approx(0.465759607593).epsilon(1e-9));
  CHECK(transition_probability(k, 0.0, Site{0}, Site{0}) == 1.0);
  CHECK(transition_probability(k, 0.0, Site{1}, Site{0}) == 0.0);
  // p(t,0,1) = e^{-t} I_1(t); I_1(2) = 1.5906368546373291
  CHECK(transition_probability(k, 2.0, Site{0}, Site{1}) ==
        doctest::Approx(std::exp(-2.0) * 1.5906368546373291).epsilon(1e-9));
}

TEST_CASE("mass conservation and spatial symmetry") {
  auto k = WalkKernel::simple(1);
  double t = 3.0;
  double total = 0.0;
  for (int64_t x = -40; x <= 40; ++x) {
    double p = transition_probability(k, t, Site{0}, Site{x});
    CHECK(p >= 0.0);
    total += p;
    if (x > 0)
      CHECK(p == doctest::Approx(
                     transition_probability(k, t, Site{0}, Site{-x}))
                     .epsilon(1e-10));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("chapman-kolmogorov") {
  auto k = WalkKernel::simple(1);
  double s = 0.7, t = 1.3;
  for (int64_t x : {0, 1, 3}) {
    double lhs = transition_probability(k, s + t, Site{0}, Site{x});
    double rhs = 0.0;
    for (int64_t y = -25; y <= 25; ++y)
      rhs += transition_probability(k, s, Site{0}, Site{y}) *
             transition_probability(k, t, Site{y}, Site{x});
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("d=1 green function closed form") {
  // G_lambda(0,0) = 1/sqrt(lambda(lambda+2)) for the rate-1 simple walk
  auto k = WalkKernel::simple(1);
  for (double lam : {0.1, 0.5, 2.0}) {
    CHECK(green(k, lam, Site{0}, Site{0}) ==
          doctest::Approx(1.0 / std::sqrt(lam * (lam + 2))).epsilon(1e-8));
  }
  // recurrent: G_0 diverges
  CHECK(std::isinf(green(k, 0.0, Site{0}, Site{0})));
}

TEST_CASE("green symmetry and monotonicity") {
  auto k = WalkKernel::simple(2);
  Site x{2, -1}, y{0, 1};
  CHECK(green(k, 0.5, x, y) ==
        doctest::Approx(green(k, 0.5, y, x)).epsilon(1e-10));
  double prev = green(k, 0.1, Site{0, 0}, Site{0, 0});
  for (double lam : {0.2, 0.5, 1.0, 3.0}) {
    double g = green(k, lam, Site{0, 0}, Site{0, 0});
    CHECK(g < prev);
    CHECK(g > 0.0);
    prev = g;
  }
}

TEST_CASE("d=3 watson integral") {
  auto k = WalkKernel::simple(3);
  CHECK(is_transient(k));
  CHECK(green(k, 0.0, Site{0, 0, 0}, Site{0, 0, 0}) ==
        doctest::Approx(1.516386059152).epsilon(2e-5));
}

TEST_CASE("heavy-tail normalization and rates") {
  // d=1, alpha=1/2, q=1: a(z) = C |z|^{-3/2} with C = 1/(2 zeta(3/2))
  auto k = WalkKernel::heavy_tail(1, 0.5, 1.0);
  // the mass beyond the summation cutoff is a radial-integral model, so the
  // normalization matches 1/(2 zeta(3/2)) to ~1e-10, not to rounding
  CHECK(k.scale() == doctest::Approx(0.191396691999713).epsilon(1e-9));
  CHECK(k.total_rate() == doctest::Approx(1.0));
  CHECK(k.rate(Site{8}) == doctest::Approx(k.scale() * std::pow(8.0, -1.5)));
  CHECK(k.rate(Site{-8}) == doctest::Approx(k.rate(Site{8})));
  // tail_rate(0) is the whole rate; tail sums match direct summation
  CHECK(k.tail_rate(0.5) == doctest::Approx(1.0).epsilon(1e-9));
  double direct = 0.0;
  for (int64_t z = 11; z <= 400000; ++z)
    direct += 2 * k.scale() * std::pow(double(z), -1.5);
  direct += 2 * k.scale() * 2.0 * std::pow(400000.5, -0.5);  // analytic rest
  CHECK(k.tail_rate(10.5) == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("heavy-tail green value") {
  auto k = WalkKernel::heavy_tail(1, 0.5, 1.0);
  CHECK(is_transient(k));  // d=1 is transient for alpha < 1
  CHECK(green(k, 0.0, Site{0}, Site{0}) ==
        doctest::Approx(1.25642465745).epsilon(2e-5));
  CHECK(green(k, 0.5, Site{0}, Site{0}) <
        green(k, 0.0, Site{0}, Site{0}));
}

TEST_CASE("transience table") {
  CHECK_FALSE(is_transient(WalkKernel::simple(1)));
  CHECK_FALSE(is_transient(WalkKernel::simple(2)));
  CHECK(is_transient(WalkKernel::simple(4)));
  CHECK(is_transient(WalkKernel::heavy_tail(1, 0.9, 1.0)));
  CHECK_FALSE(is_transient(WalkKernel::heavy_tail(1, 1.5, 1.0)));
  CHECK(is_transient(WalkKernel::heavy_tail(2, 1.5, 1.0)));
}
