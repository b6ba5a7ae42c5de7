#include "brwlab/spectral.hpp"

#include <cmath>

#include "brwlab/errors.hpp"

namespace brwlab {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::PureWalk:
      return "pure_walk";
    case Regime::Supercritical:
      return "supercritical";
    case Regime::Critical:
      return "critical";
    case Regime::SubcriticalEigen:
      return "subcritical_eigen";
    case Regime::SubcriticalBoundary:
      return "subcritical_boundary";
    case Regime::SubcriticalWeak:
      return "subcritical_weak";
  }
  return "?";
}

Regime regime_from_string(const std::string& s) {
  for (Regime r :
       {Regime::PureWalk, Regime::Supercritical, Regime::Critical,
        Regime::SubcriticalEigen, Regime::SubcriticalBoundary,
        Regime::SubcriticalWeak})
    if (to_string(r) == s) return r;
  throw Error("unknown regime: " + s);
}

double beta_critical(const WalkKernel& kernel, const SpectralOptions& opts) {
  if (!is_transient(kernel)) return 0.0;
  return 1.0 / green(kernel, 0.0, Site::origin(), Site::origin(),
                     opts.quadrature);
}

std::optional<double> lambda0(const WalkKernel& kernel, double beta_star,
                              const SpectralOptions& opts) {
  if (beta_star < 0) throw Error("beta* must be nonnegative");
  if (beta_star == 0) return std::nullopt;
  double bc = beta_critical(kernel, opts);
  if (beta_star <= bc) return std::nullopt;

  auto h = [&](double lambda) {
    return beta_star *
               green(kernel, lambda, Site::origin(), Site::origin(),
                     opts.quadrature) -
           1.0;
  };

  // h is strictly decreasing; h(0+) > 0 since beta* > beta_c and
  // h(beta*) <= 0 since G_lambda(0,0) <= 1/lambda.
  double lo = 1e-12, hi = beta_star;
  double hlo = h(lo);
  if (hlo <= 0) {
    if (hlo > -opts.root_rtol) return lo;
    throw BracketFailure(
        "beta* G_lambda(0,0) - 1 is nonpositive at lambda = 0+ despite "
        "beta* > beta_c");
  }
  double hhi = h(hi);
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < opts.max_bisection_iters; ++it) {
    mid = 0.5 * (lo + hi);
    double hm = h(mid);
    if (std::abs(hm) < opts.root_rtol) return mid;
    if (hm > 0) {
      lo = mid;
      hlo = hm;
    } else {
      hi = mid;
      hhi = hm;
    }
    // Secant polish once the bracket is tight.
    if (hi - lo < 1e-9 * beta_star && hhi < 0) {
      double sec = lo - hlo * (hi - lo) / (hhi - hlo);
      if (sec > lo && sec < hi) {
        double hs = h(sec);
        if (std::abs(hs) < opts.root_rtol) return sec;
        if (hs > 0)
          lo = sec, hlo = hs;
        else
          hi = sec, hhi = hs;
      }
    }
    if (hi - lo < 1e-15 * std::max(1.0, beta_star)) break;
  }
  return mid;
}

double critical_death_rate(const WalkKernel& kernel, double beta_star,
                           const SpectralOptions& opts) {
  auto l0 = lambda0(kernel, beta_star, opts);
  if (!l0)
    throw WrongRegime(
        "no isolated eigenvalue: beta* <= beta_c, the model cannot be made "
        "critical");
  return *l0;
}

RegimeReport classify(const WalkKernel& kernel, const OffspringLaw& law,
                      const SpectralOptions& opts) {
  RegimeReport report;
  report.beta_star = law.beta_star();
  report.death_rate = law.death_rate();
  report.beta_c = beta_critical(kernel, opts);
  report.critical_tolerance = opts.critical_rtol;

  if (report.beta_star == 0) {
    report.regime = Regime::PureWalk;
    return report;
  }
  if (report.beta_c > 0 &&
      std::abs(report.beta_star - report.beta_c) <=
          opts.boundary_rtol * report.beta_c) {
    report.regime = Regime::SubcriticalBoundary;
    return report;
  }
  if (report.beta_star < report.beta_c) {
    report.regime = Regime::SubcriticalWeak;
    return report;
  }

  report.lambda0 = lambda0(kernel, report.beta_star, opts);
  if (!report.lambda0) {
    // beta* > beta_c only within rounding; treat as the boundary.
    report.regime = Regime::SubcriticalBoundary;
    return report;
  }
  double le = *report.lambda0 - law.death_rate();
  report.lambda_E = le;
  double tol = opts.critical_rtol * std::max(1.0, *report.lambda0);
  if (std::abs(le) <= tol)
    report.regime = Regime::Critical;
  else if (le > 0)
    report.regime = Regime::Supercritical;
  else
    report.regime = Regime::SubcriticalEigen;
  return report;
}

}  // namespace brwlab
