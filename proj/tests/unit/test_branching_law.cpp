#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "brwlab/branching_law.hpp"
#include "brwlab/errors.hpp"

using namespace brwlab;

namespace {

// Brute-force g_n: sum over r and over ordered compositions
// i_1 + ... + i_r = n of beta^(r)/r! * n!/(i_1!...i_r!) * prod m_{i_k}.
double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double composition_sum(int remaining, int parts, const std::vector<double>& m,
                       double partial) {
  if (parts == 0) return remaining == 0 ? partial : 0.0;
  double sum = 0;
  for (int i = 1; i + (parts - 1) <= remaining; ++i)
    sum += composition_sum(remaining - i, parts - 1, m,
                           partial * m[i - 1] / factorial(i));
  return sum;
}

double brute_force_g(const OffspringLaw& law, int n,
                     const std::vector<double>& m) {
  double g = 0;
  for (int r = 2; r <= n; ++r)
    g += law.factorial_moment(r) / factorial(r) * factorial(n) *
         composition_sum(n, r, m, 1.0);
  return g;
}

}  // namespace

TEST_CASE("derived rates of a mixed law") {
  OffspringLaw law({{0, 0.3}, {2, 0.5}, {3, 0.25}});
  CHECK(law.death_rate() == doctest::Approx(0.3));
  CHECK(law.intensity(0) == doctest::Approx(0.3));
  CHECK(law.intensity(2) == doctest::Approx(0.5));
  CHECK(law.intensity(3) == doctest::Approx(0.25));
  CHECK(law.intensity(4) == 0.0);
  // b_1 balances the rates: sum_n b_n = 0
  CHECK(law.intensity(1) == doctest::Approx(-1.05));
  CHECK(law.beta_star() == doctest::Approx(1.0));
  CHECK(law.max_offspring() == 3);
}

TEST_CASE("generating function and factorial moments") {
  OffspringLaw law({{0, 0.3}, {2, 0.5}, {3, 0.25}});
  CHECK(law.generating_function(1.0) == doctest::Approx(0.0));
  CHECK(law.generating_function(0.0) == doctest::Approx(0.3));
  // f'(1) = beta* - b_0, f''(1) = 2 b_2 + 6 b_3, f'''(1) = 6 b_3
  CHECK(law.factorial_moment(1) == doctest::Approx(0.7));
  CHECK(law.factorial_moment(2) == doctest::Approx(2.5));
  CHECK(law.factorial_moment(3) == doctest::Approx(1.5));
  CHECK(law.factorial_moment(4) == doctest::Approx(0.0));
}

TEST_CASE("low-order g_n closed forms") {
  OffspringLaw law({{0, 0.1}, {2, 0.7}, {3, 0.2}});
  double m1 = 1.3, m2 = 4.2;
  double b2 = law.factorial_moment(2), b3 = law.factorial_moment(3);
  CHECK(law.g(2, {m1}) == doctest::Approx(b2 * m1 * m1));
  CHECK(law.g(3, {m1, m2}) ==
        doctest::Approx(3 * b2 * m1 * m2 + b3 * m1 * m1 * m1));
}

TEST_CASE("g_n equals the brute-force composition sum up to n = 6") {
  OffspringLaw law({{0, 0.2}, {2, 0.4}, {3, 0.3}, {5, 0.1}}, 6);
  std::vector<double> m{0.9, 2.1, 7.3, 30.5, 160.0};
  for (int n = 2; n <= 6; ++n) {
    std::vector<double> lower(m.begin(), m.begin() + (n - 1));
    CHECK(law.g(n, lower) ==
          doctest::Approx(brute_force_g(law, n, lower)).epsilon(1e-12));
  }
}

TEST_CASE("pure-walk law has no source term") {
  OffspringLaw law({{0, 0.5}});
  CHECK(law.beta_star() == 0.0);
  CHECK(law.g(2, {1.7}) == 0.0);
}

TEST_CASE("error cases") {
  CHECK_THROWS_AS(OffspringLaw({{0, -0.1}}), NegativeIntensity);
  CHECK_THROWS_AS(OffspringLaw({{2, -1.0}}), NegativeIntensity);
  OffspringLaw law({{0, 0.1}, {2, 0.5}});
  CHECK_THROWS_AS(law.g(3, {1.0}), ArityMismatch);
  CHECK_THROWS_AS(law.g(2, {1.0, 2.0}), ArityMismatch);
}
