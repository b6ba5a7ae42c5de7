#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "brwlab/branching_law.hpp"
#include "brwlab/moment_solver.hpp"
#include "brwlab/montecarlo.hpp"
#include "brwlab/spectral.hpp"
#include "brwlab/walk_kernel.hpp"

namespace brwlab {

// One self-contained model + run description, loaded from JSON.
struct ModelConfig {
  int schema = 1;
  int dimension = 1;

  // kernel: "simple" | "finite_support" | "heavy_tail"
  std::string kernel_type = "simple";
  std::vector<Jump> jumps;  // finite_support only
  double alpha = 0.5;       // heavy_tail only
  double total_rate = 1.0;  // heavy_tail only
  int64_t cutoff = 0;       // heavy_tail only; 0 -> default

  // offspring intensities b_n, n in {0} u {2,...}. When critical_death is
  // set, b_0 is replaced by lambda_0 at kernel construction time.
  std::map<int, double> offspring;
  bool critical_death = false;

  // moment run
  int orders = 2;
  int64_t radius = 100;
  double horizon = 50.0;
  std::vector<double> checkpoints;
  MomentVariant variant = MomentVariant::Local;
  int64_t track_radius = 0;
  double rtol = 1e-8;
  double atol = 1e-12;
  double leak_tol = 1e-3;

  // monte carlo
  std::size_t replicas = 1000;
  uint64_t seed = 0;
  std::size_t max_population = 1'000'000;
  uint64_t max_events = 100'000'000;

  std::string out_dir = "out";
  int threads = 0;
};

ModelConfig parse_config(const std::string& json_text);
ModelConfig load_config(const std::string& path);
// Canonical form: sorted keys, shortest round-trip numbers, tolerances as
// decimal strings. parse(serialize(c)) == c.
std::string serialize_config(const ModelConfig& config);
// FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const ModelConfig& config);

WalkKernel make_kernel(const ModelConfig& config);
// Resolves "b0": "critical" through the spectral equation when requested.
OffspringLaw make_law(const ModelConfig& config, const WalkKernel& kernel);

SolveOptions solve_options(const ModelConfig& config);
SimOptions sim_options(const ModelConfig& config);

}  // namespace brwlab
