#include <doctest.h>

#include <cmath>
#include <vector>

#include "brwlab/moment_solver.hpp"
#include "brwlab/montecarlo.hpp"

using namespace brwlab;

TEST_CASE("tracked window") {
  auto w1 = tracked_window(1, 2);
  CHECK(w1.size() == 5);
  auto w2 = tracked_window(2, 1);
  CHECK(w2.size() == 9);
  bool has_origin = false;
  for (const Site& s : w2) has_origin |= s.is_origin();
  CHECK(has_origin);
}

TEST_CASE("simulation determinism") {
  auto k = WalkKernel::simple(1);
  OffspringLaw law({{0, 0.1}, {2, 1.0}});
  SimOptions o;
  o.horizon = 3;
  o.checkpoints = {1.5, 3.0};
  o.replicas = 200;
  o.seed = 9;
  o.threads = 4;
  auto a = run_replicas(k, law, o);
  o.threads = 1;
  auto b = run_replicas(k, law, o);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].totals == b[i].totals);
    CHECK(a[i].counts == b[i].counts);
    CHECK(a[i].events == b[i].events);
  }
  o.seed = 10;
  auto c = run_replicas(k, law, o);
  bool all_same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].totals != c[i].totals) all_same = false;
  CHECK_FALSE(all_same);
}

TEST_CASE("walk without branching keeps exactly one particle") {
  auto k = WalkKernel::simple(2);
  OffspringLaw law({{0, 0.0}});
  SimOptions o;
  o.horizon = 5;
  o.checkpoints = {2.5, 5.0};
  o.replicas = 300;
  o.seed = 4;
  for (const auto& r : run_replicas(k, law, o)) {
    CHECK_FALSE(r.truncated);
    for (uint64_t n : r.totals) CHECK(n == 1);
  }
}

TEST_CASE("pure walk with absorption: mean and extinction") {
  auto k = WalkKernel::simple(1);
  OffspringLaw law({{0, 0.5}});
  SimOptions o;
  o.horizon = 2;
  o.checkpoints = {2.0};
  o.replicas = 60000;
  o.seed = 42;
  auto sum = estimate_moments(run_replicas(k, law, o), k, o);
  double exact = std::exp(-1.0);
  CHECK(std::abs(sum.total_mean[0][0] - exact) <= 3 * sum.total_se[0][0]);
  // survival is Bernoulli(e^{-1}); extinction fraction ~ 1 - e^{-1}
  CHECK(sum.extinction_fraction[0] ==
        doctest::Approx(1 - exact).epsilon(0.02));
}

TEST_CASE("local occupation matches the transition probability") {
  auto k = WalkKernel::simple(1);
  OffspringLaw law({{0, 0.0}});
  SimOptions o;
  o.horizon = 2;
  o.checkpoints = {2.0};
  o.replicas = 60000;
  o.seed = 7;
  o.track_radius = 1;
  auto sum = estimate_moments(run_replicas(k, law, o), k, o);
  for (std::size_t s = 0; s < sum.tracked_sites.size(); ++s) {
    double p =
        transition_probability(k, 2.0, Site::origin(), sum.tracked_sites[s]);
    CHECK(std::abs(sum.local_mean[0][0][s] - p) <= 3 * sum.local_se[0][0][s]);
  }
}

TEST_CASE("branching moments match the ODE solution") {
  auto k = WalkKernel::simple(1);
  OffspringLaw law({{0, 0.0}, {2, 1.0}});
  SimOptions o;
  o.horizon = 1;
  o.checkpoints = {1.0};
  o.replicas = 60000;
  o.seed = 11;
  o.orders = 2;
  auto sum = estimate_moments(run_replicas(k, law, o), k, o);

  SolveOptions so;
  so.orders = 2;
  so.radius = 40;
  so.horizon = 1;
  auto tr = solve_moments(k, law, so);
  double ode1 = tr.series(1, Site::origin()).back();
  double ode2 = tr.series(2, Site::origin()).back();
  CHECK(std::abs(sum.local_mean[0][0][0] - ode1) <= 3 * sum.local_se[0][0][0]);
  CHECK(std::abs(sum.local_mean[1][0][0] - ode2) <= 3 * sum.local_se[1][0][0]);
}

TEST_CASE("truncated replicas are flagged and excluded") {
  auto k = WalkKernel::simple(1);
  OffspringLaw law({{0, 0.0}, {2, 2.0}});  // fast supercritical growth
  SimOptions o;
  o.horizon = 8;
  o.checkpoints = {8.0};
  o.replicas = 100;
  o.seed = 3;
  o.max_population = 50;
  auto recs = run_replicas(k, law, o);
  std::size_t truncated = 0;
  for (const auto& r : recs) truncated += r.truncated;
  CHECK(truncated > 0);
  auto sum = estimate_moments(recs, k, o);
  CHECK(sum.truncated == truncated);
  CHECK(sum.replicas == 100);
  // the surviving estimate is still finite and positive
  CHECK(sum.total_mean[0][0] >= 0.0);
  CHECK(std::isfinite(sum.total_mean[0][0]));
}

TEST_CASE("heavy-tail jump sampler reproduces tail frequencies") {
  auto k = WalkKernel::heavy_tail(1, 0.5, 1.0);
  JumpSampler sampler(k);
  Philox rng(1, 0);
  const int n = 400000;
  std::vector<double> radii{2.5, 8.5, 32.5, 5000.5};
  std::vector<int> counts(radii.size(), 0);
  for (int i = 0; i < n; ++i) {
    Site z = sampler.sample(rng);
    double r = z.norm2();
    CHECK(r >= 1.0);
    for (std::size_t j = 0; j < radii.size(); ++j)
      if (r > radii[j]) counts[j]++;
  }
  for (std::size_t j = 0; j < radii.size(); ++j) {
    double expected = k.tail_rate(radii[j]) / k.total_rate();
    double se = std::sqrt(expected * (1 - expected) / n);
    CHECK(std::abs(counts[j] / double(n) - expected) <= 4 * se);
  }
}
