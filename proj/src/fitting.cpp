#include "brwlab/fitting.hpp"

#include <array>
#include <cmath>

#include "brwlab/errors.hpp"

namespace brwlab {

namespace {

// Gaussian elimination with partial pivoting on an n x n system.
void solve_dense(std::array<std::array<double, 4>, 4>& a,
                 std::array<double, 4>& rhs, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(rhs[col], rhs[piv]);
    if (std::abs(a[col][col]) < 1e-300)
      throw DegenerateWindow("singular normal equations in the fit window");
    for (int r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    double s = rhs[col];
    for (int c = col + 1; c < n; ++c) s -= a[col][c] * rhs[c];
    rhs[col] = s / a[col][col];
  }
}

}  // namespace

GrowthFit fit_growth(const std::vector<double>& t, const std::vector<double>& v,
                     double t_min, double t_max, const FitSpec& spec) {
  if (t.size() != v.size()) throw ArityMismatch("t and v differ in length");

  // Basis columns: 1, then each free exponent in order rho, kappa, eta.
  int n_free = 1 + (spec.free_rho ? 1 : 0) + (spec.free_kappa ? 1 : 0) +
               (spec.free_eta ? 1 : 0);
  std::array<std::array<double, 4>, 4> ata{};
  std::array<double, 4> atb{};
  int points = 0;

  auto row_at = [&](double ti, std::array<double, 4>& row) {
    int j = 0;
    row[j++] = 1.0;
    if (spec.free_rho) row[j++] = ti;
    if (spec.free_kappa) row[j++] = std::log(ti);
    if (spec.free_eta) row[j++] = std::log(std::log(ti));
  };

  for (std::size_t i = 0; i < t.size(); ++i) {
    double ti = t[i];
    if (ti < t_min || ti > t_max) continue;
    if (spec.free_eta && ti <= 1.0)
      throw DegenerateWindow("log log t needs t > 1 in the fit window");
    if (ti <= 0) throw DegenerateWindow("fit window must have t > 0");
    if (!(v[i] > 0))
      throw NonPositiveValues("growth fit needs strictly positive values");
    double y = std::log(v[i]);
    if (!spec.free_rho) y -= spec.rho * ti;
    if (!spec.free_kappa) y -= spec.kappa * std::log(ti);
    if (!spec.free_eta && spec.eta != 0) y -= spec.eta * std::log(std::log(ti));
    std::array<double, 4> row{};
    row_at(ti, row);
    for (int r = 0; r < n_free; ++r) {
      for (int c = 0; c < n_free; ++c) ata[r][c] += row[r] * row[c];
      atb[r] += row[r] * y;
    }
    ++points;
  }
  if (points < n_free + 1)
    throw DegenerateWindow("fit window holds fewer points than parameters + 1");

  auto coeffs = atb;
  auto mat = ata;
  solve_dense(mat, coeffs, n_free);

  GrowthFit fit;
  fit.points = points;
  int j = 0;
  fit.log_c = coeffs[j++];
  fit.rho = spec.free_rho ? coeffs[j++] : spec.rho;
  fit.kappa = spec.free_kappa ? coeffs[j++] : spec.kappa;
  fit.eta = spec.free_eta ? coeffs[j++] : spec.eta;

  double ss = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double ti = t[i];
    if (ti < t_min || ti > t_max) continue;
    double model = fit.log_c + fit.rho * ti + fit.kappa * std::log(ti);
    if (fit.eta != 0) model += fit.eta * std::log(std::log(ti));
    double r = std::log(v[i]) - model;
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / points);
  return fit;
}

}  // namespace brwlab
