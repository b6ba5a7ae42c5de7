#pragma once

#include <map>
#include <vector>

#include "brwlab/lattice.hpp"

namespace brwlab {

// Offspring intensities b_n at the origin (n = 0 and n >= 2; b_1 is implied
// by sum_n b_n = 0) plus the death rate b_0 reused at every other site.
// Derives beta* = sum_{n>1} (n-1) b_n, the factorial moments
// beta^{(r)} = f^{(r)}(1) of f(u) = sum b_n u^n, and the moment-hierarchy
// source term g_n.
class OffspringLaw {
 public:
  // b maps n -> b_n for n in {0} u {2,..}; g_n coefficient tables are cached
  // up to order n_max.
  explicit OffspringLaw(const std::map<int, double>& b, int n_max = 6);

  double death_rate() const { return b0_; }
  double intensity(int n) const;  // b_n, including the implied b_1
  int max_offspring() const { return max_n_; }
  int cached_order() const { return n_max_; }

  double beta_star() const { return beta_star_; }
  // beta^{(r)} = f^{(r)}(1) = sum_n n(n-1)...(n-r+1) b_n, r >= 1.
  double factorial_moment(int r) const;
  // f(u) = sum_n b_n u^n.
  double generating_function(double u) const;

  // g_n(m_1,...,m_{n-1}) of the moment hierarchy; `lower` must have exactly
  // n-1 entries.
  double g(int n, const std::vector<double>& lower) const;

 private:
  struct Term {
    double coefficient;       // beta^{(r)} / r! * n! / (prod i_k!) * orderings
    std::vector<int> counts;  // multiplicity of each index 1..n-1
  };

  std::map<int, double> b_;  // n != 1 entries as given
  double b0_ = 0;
  double b1_ = 0;
  int max_n_ = 0;
  int n_max_ = 6;
  double beta_star_ = 0;
  std::vector<std::vector<Term>> g_terms_;  // per order n = 2..n_max
};

}  // namespace brwlab
