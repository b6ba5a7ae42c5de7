#pragma once

#include <vector>

namespace brwlab {

// Least-squares fit of log v(t) = log C + rho t + kappa log t + eta log log t
// over a window of (t, v) samples. Fixed exponents are held at the supplied
// values rather than estimated.
struct GrowthFit {
  double log_c = 0;
  double rho = 0;    // exponential rate
  double kappa = 0;  // power of t
  double eta = 0;    // power of log t
  double rms_residual = 0;
  int points = 0;
};

struct FitSpec {
  bool free_rho = true;
  bool free_kappa = true;
  bool free_eta = false;
  double rho = 0;
  double kappa = 0;
  double eta = 0;
};

GrowthFit fit_growth(const std::vector<double>& t, const std::vector<double>& v,
                     double t_min, double t_max, const FitSpec& spec);

}  // namespace brwlab
