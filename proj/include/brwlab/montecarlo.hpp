#pragma once

#include <cstdint>
#include <vector>

#include "brwlab/branching_law.hpp"
#include "brwlab/lattice.hpp"
#include "brwlab/rng.hpp"
#include "brwlab/spectral.hpp"
#include "brwlab/walk_kernel.hpp"

namespace brwlab {

// Samples jump displacements z with probability a(z)/q. Heavy-tail kernels
// use an alias table up to the cutoff plus an exact rejection sampler for
// the analytic tail (d = 1); for d >= 2 the tail rounds a continuous
// power-law radius onto the lattice.
class JumpSampler {
 public:
  explicit JumpSampler(const WalkKernel& kernel);
  Site sample(Philox& rng) const;

 private:
  const WalkKernel* kernel_;
  std::vector<Site> jumps_;  // directed displacements covered by the table
  bool has_tail_ = false;    // last table slot delegates to the tail sampler
  AliasTable table_;
  Site sample_tail(Philox& rng) const;
};

struct SimOptions {
  double horizon = 10;
  std::vector<double> checkpoints;  // ascending, <= horizon; empty -> horizon
  int orders = 2;
  int64_t track_radius = 0;
  std::size_t max_population = 1'000'000;
  uint64_t max_events = 100'000'000;
  uint64_t seed = 0;
  std::size_t replicas = 1000;
  int threads = 0;
};

struct ReplicaRecord {
  // counts[c][s]: particles at tracked site s at checkpoint c; totals[c]:
  // whole population. Snapshots after a cap was hit repeat the frozen state.
  std::vector<std::vector<uint64_t>> counts;
  std::vector<uint64_t> totals;
  bool truncated = false;
  uint64_t events = 0;
};

std::vector<Site> tracked_window(int dim, int64_t radius);

ReplicaRecord simulate_replica(const WalkKernel& kernel,
                               const OffspringLaw& law, const SimOptions& opts,
                               uint64_t replica_index);

// Runs opts.replicas independent replicas on a thread pool. Results are
// keyed by replica index, so the output is schedule-independent.
std::vector<ReplicaRecord> run_replicas(const WalkKernel& kernel,
                                        const OffspringLaw& law,
                                        const SimOptions& opts);

struct SimulationSummary {
  std::size_t replicas = 0;
  std::size_t truncated = 0;  // excluded from the estimates below
  std::vector<double> checkpoints;
  std::vector<Site> tracked_sites;
  // local_mean[n-1][c][s] = replica mean of mu(t_c, y_s)^n, with matching SE
  std::vector<std::vector<std::vector<double>>> local_mean;
  std::vector<std::vector<std::vector<double>>> local_se;
  // total_mean[n-1][c] = replica mean of mu(t_c)^n
  std::vector<std::vector<double>> total_mean;
  std::vector<std::vector<double>> total_se;
  std::vector<double> extinction_fraction;  // per checkpoint
};

SimulationSummary estimate_moments(const std::vector<ReplicaRecord>& records,
                                   const WalkKernel& kernel,
                                   const SimOptions& opts);

// Empirical distribution of mu(t)e^{-lambda_E t} at two large times, plus the
// per-site ratio psi estimates. Requires a supercritical report.
struct LimitLawSample {
  double lambda_e = 0;
  double t_primary = 0;
  double t_secondary = 0;
  std::vector<double> rescaled_primary;  // one entry per untruncated replica
  std::vector<double> rescaled_secondary;
  double mean_primary = 0, mean_secondary = 0;
  double variance_primary = 0;
  double zero_fraction_primary = 0;  // extinct replicas
  std::vector<Site> tracked_sites;
  // psi[s] = mean rescaled local count / mean rescaled total, per time
  std::vector<double> psi_primary, psi_secondary;
};

LimitLawSample sample_limit_law(const WalkKernel& kernel,
                                const OffspringLaw& law,
                                const RegimeReport& report, double t_large,
                                const SimOptions& opts);

}  // namespace brwlab
