#pragma once

#include <cstdint>
#include <vector>

#include "brwlab/lattice.hpp"
#include "brwlab/walk_kernel.hpp"

namespace brwlab {

// Cube ||x||_inf <= radius in Z^d with row-major indexing.
class Box {
 public:
  Box(int dim, int64_t radius);

  int dimension() const { return dim_; }
  int64_t radius() const { return radius_; }
  std::size_t size() const { return size_; }
  std::size_t origin_index() const { return origin_; }

  // -1 when the site lies outside the box.
  std::ptrdiff_t index(const Site& s) const;
  Site site(std::size_t index) const;
  bool on_boundary(std::size_t index) const;

 private:
  int dim_;
  int64_t radius_;
  int64_t side_;
  std::size_t size_;
  std::size_t origin_;
};

// E = A + beta* Delta_0 - b0 I restricted to a box, absorbing boundary:
// jumps leaving the box delete mass. Heavy-tail kernels couple every pair of
// sites with the exact power-law rate.
class TruncatedOperator {
 public:
  TruncatedOperator(const WalkKernel& kernel, double beta_star, double b0,
                    int64_t radius, int threads = 0);

  const Box& box() const { return box_; }
  double beta_star() const { return beta_star_; }
  double death_rate() const { return b0_; }
  double total_rate() const { return q_; }

  // out = E in (out must have box().size() entries).
  void apply(const std::vector<double>& in, std::vector<double>& out) const;
  void apply(const double* in, double* out) const;

  // Matrix entry E(x,y) for tests.
  double entry(const Site& x, const Site& y) const;

 private:
  Box box_;
  double beta_star_;
  double b0_;
  double q_;
  int threads_;
  std::vector<Site> offsets_;        // one per symmetric pair
  std::vector<double> offset_rates_;
  std::vector<std::ptrdiff_t> offset_strides_;  // flat-index shift per offset
};

// Leading eigenpair of the truncated operator by shifted power iteration.
// The eigenvector is entrywise positive (Perron) and unit-normalized.
struct EigenPair {
  double value;
  std::vector<double> vector;
  double residual;
  int iterations;
};
EigenPair leading_eigenpair(const TruncatedOperator& op, double tol = 1e-8,
                            int max_iters = 200000);

}  // namespace brwlab
