#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brwlab/branching_law.hpp"
#include "brwlab/lattice.hpp"
#include "brwlab/truncated_operator.hpp"
#include "brwlab/walk_kernel.hpp"

namespace brwlab {

// Local: m_n(t, x, 0), the n-th moment of the particle count at the origin.
// Total: m_n(t, x), the n-th moment of the total population.
// Both are fields over the starting point x of the initial particle.
enum class MomentVariant { Local, Total };

std::string to_string(MomentVariant v);
MomentVariant moment_variant_from_string(const std::string& s);

struct SolveOptions {
  int orders = 1;
  int64_t radius = 100;  // box half-width L
  double horizon = 50.0;
  MomentVariant variant = MomentVariant::Local;
  double rtol = 1e-8;
  double atol = 1e-12;
  // Fraction of the origin-seeded first moment sitting on the boundary layer
  // at the horizon beyond which the box is declared too small.
  double leak_tol = 1e-3;
  int64_t track_radius = 2;  // record sites with |x|_inf <= track_radius
  std::vector<double> checkpoints;
  int outputs_per_decade = 32;
  double first_output = 1.0 / 16;
  int threads = 0;
};

struct MomentTrajectory {
  MomentVariant variant = MomentVariant::Local;
  int orders = 1;
  int dimension = 1;
  int64_t radius = 0;
  std::vector<double> times;
  std::vector<Site> tracked_sites;  // origin is always present
  // values[n-1][i][s] = m_n(times[i]) at tracked_sites[s]
  std::vector<std::vector<std::vector<double>>> values;
  // totals[n-1][i] = sum of the order-n field over the box
  std::vector<std::vector<double>> totals;
  // final_slice[n-1] = full order-n field at the horizon, box row-major
  std::vector<std::vector<double>> final_slice;
  double boundary_leak = 0;
  long steps_taken = 0;

  std::size_t site_index(const Site& s) const;
  // m_n at one tracked site across all output times
  std::vector<double> series(int order, const Site& s) const;
  const std::vector<double>& total_series(int order) const;
};

// Integrates the moment hierarchy dm_n/dt = E m_n + delta_0 g_n(m_1..m_{n-1})
// on the truncated box with adaptive Dormand-Prince 5(4). Internally evolves
// u_n = m_n e^{b0 t} so subcritical runs keep O(1) magnitudes.
MomentTrajectory solve_moments(const WalkKernel& kernel,
                               const OffspringLaw& law,
                               const SolveOptions& opts = {});

}  // namespace brwlab
