#pragma once

#include <optional>
#include <string>

#include "brwlab/branching_law.hpp"
#include "brwlab/walk_kernel.hpp"

namespace brwlab {

enum class Regime {
  PureWalk,
  Supercritical,
  Critical,
  SubcriticalEigen,
  SubcriticalBoundary,
  SubcriticalWeak,
};

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

struct RegimeReport {
  Regime regime = Regime::PureWalk;
  double beta_star = 0;
  double beta_c = 0;  // 0 for a recurrent walk
  double death_rate = 0;
  std::optional<double> lambda0;
  std::optional<double> lambda_E;
  double critical_tolerance = 1e-9;
};

struct SpectralOptions {
  QuadratureOptions quadrature;
  double root_rtol = 1e-10;       // residual target for beta* G_lambda = 1
  double critical_rtol = 1e-9;    // |lambda_E| <= critical_rtol*max(1,lambda0)
  double boundary_rtol = 1e-9;    // |beta* - beta_c| <= boundary_rtol*beta_c
  int max_bisection_iters = 200;
};

// beta_c = 1/G_0(0,0); 0 when the walk is recurrent.
double beta_critical(const WalkKernel& kernel,
                     const SpectralOptions& opts = {});

// The isolated positive eigenvalue of A + beta* Delta_0: the unique root of
// beta* G_lambda(0,0) = 1 on (0, beta*]. Empty when beta* <= beta_c.
std::optional<double> lambda0(const WalkKernel& kernel, double beta_star,
                              const SpectralOptions& opts = {});

RegimeReport classify(const WalkKernel& kernel, const OffspringLaw& law,
                      const SpectralOptions& opts = {});

// Death rate that makes the model critical by construction: b_0 := lambda_0.
double critical_death_rate(const WalkKernel& kernel, double beta_star,
                           const SpectralOptions& opts = {});

}  // namespace brwlab
