#pragma once

#include <optional>
#include <string>
#include <vector>

#include "brwlab/fitting.hpp"
#include "brwlab/moment_solver.hpp"
#include "brwlab/spectral.hpp"

namespace brwlab {

// m_n(t) ~ const * t^kappa (ln t)^eta e^{rho t}
struct AsymptoteForm {
  double rho = 0;
  double kappa = 0;
  double eta = 0;
  int order = 1;
  MomentVariant variant = MomentVariant::Local;
  std::string source;  // regime-table row label
};

// The unique table row for (regime, variance class, d or d/alpha band, n,
// variant). alpha is empty for finite-variance kernels. Combinations outside
// the tables raise UnsupportedCombination.
AsymptoteForm predicted_asymptote(const RegimeReport& report, int dim,
                                  std::optional<double> alpha, int order,
                                  MomentVariant variant);

// A positive sampled function with its declared tail form
// v(t) ~ C t^kappa (ln t)^eta e^{rho t}.
struct SampledFunction {
  std::vector<double> t;  // strictly increasing, t.front() == 0 not required
  std::vector<double> v;
  double rho = 0;
  double kappa = 0;
  double eta = 0;
};

struct ConvolutionResult {
  SampledFunction w;  // W(t) = int_0^t phi(t-s) chi(s) ds on phi's grid
  double w0;          // int_0^inf e^{b0 s} chi(s) ds
};

// The convolution identity behind the subcritical theorems: when
// phi(t) = u(t) e^{-b0 t} with u regularly varying and e^{b0 s} chi(s) is
// integrable, W(t) / phi(t) -> W0.
ConvolutionResult lemma_convolve(const SampledFunction& phi,
                                 const SampledFunction& chi, double b0);

struct ValidationOptions {
  double window_lo = 0;  // 0 -> horizon/10
  double window_hi = 0;  // 0 -> horizon
  double rho_rtol = 0.05;
  double rho_atol = 0.01;
  double kappa_atol = 0.15;
  double eta_atol = 0.5;
  double pure_walk_rtol = 1e-6;
  QuadratureOptions quadrature;
};

struct Verdict {
  int order = 1;
  MomentVariant variant = MomentVariant::Local;
  AsymptoteForm predicted;
  GrowthFit fit;
  bool pass = false;
  std::string detail;
};

// Fits every order of the trajectory (origin series for Local, population
// totals for Total) against the predicted forms. PureWalk trajectories are
// compared pointwise against the closed form e^{-b0 t} p(t,0,0) instead.
std::vector<Verdict> validate_regime(const WalkKernel& kernel,
                                     const OffspringLaw& law,
                                     const RegimeReport& report,
                                     const MomentTrajectory& traj,
                                     const ValidationOptions& opts = {});

}  // namespace brwlab
