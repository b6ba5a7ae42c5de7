#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "brwlab/lattice.hpp"

namespace brwlab {

struct Jump {
  Site z;
  double rate;
};

struct QuadratureOptions {
  double rtol = 1e-8;
  double atol = 1e-13;  // absolute floor; integrands are O(1) on the torus
  int max_level = 8;
  std::size_t max_nodes = 40'000'000;  // total tensor nodes per level
};

// Tensor-product quadrature over [-pi,pi]^d with precomputed values of the
// generator symbol phi(theta) = sum_z a(z) (cos(theta.z) - 1) at the nodes.
// Finite-support kernels use a uniform midpoint rule (trapezoid on a periodic
// integrand, shifted off theta = 0); heavy-tail kernels use composite
// Gauss-Legendre panels graded geometrically towards the |theta|^alpha cusp
// at the origin.
class SymbolGrid {
 public:
  SymbolGrid(int dim, std::vector<double> nodes, std::vector<double> weights,
             std::vector<double> symbol);

  int dimension() const { return dim_; }
  std::size_t nodes_per_dim() const { return nodes_.size(); }
  std::size_t total_nodes() const { return symbol_.size(); }
  const std::vector<double>& nodes_1d() const { return nodes_; }
  const std::vector<double>& symbol_values() const { return symbol_; }

  // (2pi)^{-d} * integral of f(phi(theta)) * cos(theta . delta).
  template <class F>
  double integrate(const Site& delta, F&& f) const;

  double integrate_heat(double t, const Site& delta) const;          // e^{t phi}
  double integrate_resolvent(double lambda, const Site& delta) const;  // 1/(lambda - phi)
  // (1 - e^{T(phi - lambda)}) / (lambda - phi); the lambda -> phi limit is T.
  double integrate_green_split(double lambda, double horizon,
                               const Site& delta) const;
  double integrate_resolvent_sq(double lambda) const;  // 1/(lambda - phi)^2

 private:
  int dim_;
  std::vector<double> nodes_;    // per-dimension nodes (same in every dim)
  std::vector<double> weights_;  // per-dimension weights, (2pi)^{-1} included
  std::vector<double> symbol_;   // flattened tensor, length nodes^dim
};

// Symmetric homogeneous jump-intensity function a(z) on Z^d together with the
// spectral machinery for p(t,x,y) and G_lambda(x,y).
class WalkKernel {
 public:
  enum class Variant { FiniteSupport, HeavyTail };

  // Explicit map z -> a(z) on a finite symmetric set excluding 0.
  static WalkKernel finite_support(int dim, const std::vector<Jump>& jumps);
  // a(z) = C |z|^{-d-alpha}; C chosen so the total jump rate equals
  // total_rate. cutoff <= 0 picks a dimension-dependent default.
  static WalkKernel heavy_tail(int dim, double alpha, double total_rate,
                               int64_t cutoff = 0);
  // Same but with the scale C given directly.
  static WalkKernel heavy_tail_with_scale(int dim, double alpha, double scale,
                                          int64_t cutoff = 0);
  // Simple symmetric nearest-neighbour walk, total rate 1 (a(e) = 1/(2d)).
  static WalkKernel simple(int dim);

  int dimension() const { return dim_; }
  Variant variant() const { return variant_; }
  double total_rate() const { return total_rate_; }  // q = -a(0)
  bool finite_variance() const { return variant_ == Variant::FiniteSupport; }

  double alpha() const { return alpha_; }
  double scale() const { return scale_; }
  int64_t cutoff() const { return cutoff_; }

  // a(z) for z != 0 (0 outside the support for finite kernels; the exact
  // power law everywhere for heavy-tail kernels).
  double rate(const Site& z) const;
  // One representative per {z,-z} pair, rate as stored.
  const std::vector<Jump>& support_pairs() const { return pairs_; }

  // sum_{|z| > radius} a(z), with the analytic tail beyond the cutoff.
  double tail_rate(double radius) const;
  // sum_z a(z) z_k^2 per coordinate (finite-variance kernels only).
  double coordinate_variance_rate(int axis) const;

  double symbol(const std::array<double, kMaxDim>& theta) const;

  // Relative accuracy limit of symbol(): the radial-integral model of the
  // mass beyond the cutoff caps heavy-tail accuracy; d = 2 additionally
  // interpolates its Bessel tail correction from a table.
  double quadrature_noise_floor() const {
    if (variant_ != Variant::HeavyTail) return 0.0;
    return dim_ == 2 ? 1e-4 : 5e-8;
  }

  const SymbolGrid& grid(int level, const QuadratureOptions& opts) const;

 private:
  WalkKernel() = default;
  void validate_finite() const;
  double heavy_symbol_tail(double theta_norm) const;

  int dim_ = 1;
  Variant variant_ = Variant::FiniteSupport;
  double total_rate_ = 0;
  std::vector<Jump> pairs_;  // one representative per symmetric pair

  // heavy-tail parameters
  double alpha_ = 0;
  double scale_ = 0;
  int64_t cutoff_ = 0;
  double tail_rate_beyond_cutoff_ = 0;
  std::shared_ptr<const std::vector<std::pair<double, double>>> tail_table_;
  // (log w, T(w)) samples of T(w) = int_w^inf (1 - Psi_d(v)) v^{-1-alpha} dv

  // behind a pointer so kernels stay movable
  std::shared_ptr<std::mutex> grid_mutex_ = std::make_shared<std::mutex>();
  mutable std::vector<std::shared_ptr<const SymbolGrid>> grids_;
};

// Transition probability p(t,x,y) of the pure walk by lattice Fourier
// quadrature. p(0,x,y) = delta_y(x) exactly.
double transition_probability(const WalkKernel& kernel, double t,
                              const Site& x, const Site& y,
                              const QuadratureOptions& opts = {});

// Green's function G_lambda(x,y), Eq-free spectral route. Returns +infinity
// for lambda = 0 on a recurrent kernel (decided by the closed-form
// transience criterion, never by quadrature divergence).
double green(const WalkKernel& kernel, double lambda, const Site& x,
             const Site& y, const QuadratureOptions& opts = {});

// sum_y G_lambda(0,y)^2, lambda > 0 (Parseval).
double green_norm_sq(const WalkKernel& kernel, double lambda,
                     const QuadratureOptions& opts = {});

// Closed-form transience classification: finite variance iff d >= 3;
// heavy tails iff (d = 1 and alpha < 1) or d >= 2.
bool is_transient(const WalkKernel& kernel);

template <class F>
double SymbolGrid::integrate(const Site& delta, F&& f) const {
  const std::size_t n = nodes_.size();
  const std::size_t total = symbol_.size();
  double sum = 0.0;
  std::array<std::size_t, kMaxDim> idx{0, 0, 0, 0};
  for (std::size_t flat = 0; flat < total; ++flat) {
    double w = 1.0;
    double dot = 0.0;
    for (int k = 0; k < dim_; ++k) {
      w *= weights_[idx[k]];
      if (delta.c[k] != 0) dot += nodes_[idx[k]] * double(delta.c[k]);
    }
    sum += w * f(symbol_[flat]) * std::cos(dot);
    for (int k = dim_ - 1; k >= 0; --k) {
      if (++idx[k] < n) break;
      idx[k] = 0;
    }
  }
  return sum;
}

}  // namespace brwlab
