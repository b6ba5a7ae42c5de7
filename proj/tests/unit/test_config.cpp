#include <doctest.h>

#include <cmath>

#include "brwlab/config.hpp"
#include "brwlab/errors.hpp"

using namespace brwlab;

namespace {

const char* kSample = R"({
  "schema": 1,
  "dimension": 1,
  "kernel": {"type": "simple"},
  "offspring": {"0": "0.1", "2": 1.0},
  "run": {
    "orders": 2,
    "radius": 80,
    "horizon": "30",
    "checkpoints": [1, 2, 5],
    "variant": "local",
    "track_radius": 1,
    "rtol": "1e-9"
  },
  "montecarlo": {"replicas": 5000, "seed": 17},
  "out_dir": "out",
  "threads": 2
})";

}  // namespace

TEST_CASE("parse accepts numbers and decimal strings") {
  auto c = parse_config(kSample);
  CHECK(c.dimension == 1);
  CHECK(c.kernel_type == "simple");
  CHECK(c.offspring.at(0) == doctest::Approx(0.1));
  CHECK(c.offspring.at(2) == doctest::Approx(1.0));
  CHECK(c.orders == 2);
  CHECK(c.radius == 80);
  CHECK(c.horizon == doctest::Approx(30.0));
  CHECK(c.checkpoints == std::vector<double>{1, 2, 5});
  CHECK(c.variant == MomentVariant::Local);
  CHECK(c.rtol == doctest::Approx(1e-9));
  CHECK(c.replicas == 5000);
  CHECK(c.seed == 17);
  CHECK(c.threads == 2);
}

TEST_CASE("serialize and parse round trip") {
  auto c = parse_config(kSample);
  auto c2 = parse_config(serialize_config(c));
  CHECK(serialize_config(c2) == serialize_config(c));
  CHECK(config_hash(c2) == config_hash(c));
}

TEST_CASE("hash is stable and ignores out_dir") {
  auto a = parse_config(kSample);
  auto b = a;
  b.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 18;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("kernel and law factories") {
  auto c = parse_config(kSample);
  auto k = make_kernel(c);
  CHECK(k.dimension() == 1);
  CHECK(k.total_rate() == doctest::Approx(1.0));
  auto law = make_law(c, k);
  CHECK(law.death_rate() == doctest::Approx(0.1));
  CHECK(law.beta_star() == doctest::Approx(1.0));

  auto so = solve_options(c);
  CHECK(so.orders == 2);
  CHECK(so.radius == 80);
  CHECK(so.horizon == 30.0);
  auto mo = sim_options(c);
  CHECK(mo.replicas == 5000);
  CHECK(mo.seed == 17);
}

TEST_CASE("critical death rate resolution") {
  auto c = parse_config(R"({
    "dimension": 1,
    "kernel": {"type": "simple"},
    "offspring": {"0": "critical", "2": 1.0},
    "run": {"horizon": 10}
  })");
  CHECK(c.critical_death);
  auto k = make_kernel(c);
  auto law = make_law(c, k);
  CHECK(law.death_rate() ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-8));
}

TEST_CASE("finite support and heavy tail kernels from config") {
  auto cf = parse_config(R"({
    "dimension": 2,
    "kernel": {"type": "finite_support", "jumps": [
      {"z": [1, 0], "rate": 0.25}, {"z": [-1, 0], "rate": 0.25},
      {"z": [0, 1], "rate": 0.25}, {"z": [0, -1], "rate": 0.25}
    ]},
    "offspring": {"0": 0.5},
    "run": {"horizon": 5}
  })");
  auto kf = make_kernel(cf);
  CHECK(kf.rate(Site{1, 0}) == doctest::Approx(0.25));

  auto ch = parse_config(R"({
    "dimension": 1,
    "kernel": {"type": "heavy_tail", "alpha": 0.5, "total_rate": 1.0},
    "offspring": {"0": 0.3},
    "run": {"horizon": 5}
  })");
  auto kh = make_kernel(ch);
  CHECK(kh.variant() == WalkKernel::Variant::HeavyTail);
  CHECK(kh.alpha() == doctest::Approx(0.5));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1,2]"), ConfigError);
  // missing required fields
  CHECK_THROWS_AS(parse_config(R"({"dimension": 1})"), ConfigError);
  // unknown kernel type
  CHECK_THROWS_AS(parse_config(R"({
    "dimension": 1, "kernel": {"type": "levy"}, "offspring": {"0": 0.1}
  })"),
                  ConfigError);
  // bad dimension
  CHECK_THROWS_AS(parse_config(R"({
    "dimension": 7, "kernel": {"type": "simple"}, "offspring": {"0": 0.1}
  })"),
                  ConfigError);
  // non-numeric rate
  CHECK_THROWS_AS(parse_config(R"({
    "dimension": 1, "kernel": {"type": "simple"},
    "offspring": {"0": "fast"}
  })"),
                  ConfigError);
  // jump arity mismatch
  CHECK_THROWS_AS(parse_config(R"({
    "dimension": 2,
    "kernel": {"type": "finite_support", "jumps": [{"z": [1], "rate": 0.5}]},
    "offspring": {"0": 0.1}
  })"),
                  ConfigError);
  // load from a missing file
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}
