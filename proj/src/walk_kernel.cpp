#include "brwlab/walk_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

#include "brwlab/errors.hpp"

namespace brwlab {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    double ww = 2.0 / ((1.0 - t * t) * dp * dp);
    w[i] = ww;
    w[n - 1 - i] = ww;
  }
}

// Adaptive Simpson on [a,b].
double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double fa, double b, double fb, double fm,
                            double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol,
                              depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int depth = 40) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return adaptive_simpson_rec(f, a, fa, b, fb, fm, whole, tol, depth);
}

// 1 - Psi_d(v): the deficit of the spherical average of cos(theta.z) over the
// sphere |z| = v/|theta| in dimension d.
double one_minus_sphere_avg(int d, double v) {
  if (v == 0) return 0.0;
  switch (d) {
    case 1:
      return 1.0 - std::cos(v);
    case 2:
      return 1.0 - std::cyl_bessel_j(0.0, v);
    default:  // d == 3 (heavy tails in d = 4 are not used computationally)
      return 1.0 - std::sin(v) / v;
  }
}

// Upper incomplete gamma Gamma(a, z) for complex z by the Lentz continued
// fraction; used on z = -iw, away from the negative real axis.
std::complex<double> upper_gamma_cf(double a, std::complex<double> z) {
  const double tiny = 1e-300;
  std::complex<double> b = z + 1.0 - a;
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 1; i <= 2000; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    std::complex<double> del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-z) * std::pow(z, a) * h;
}

// T(w) = int_w^inf (1 - Psi_d(v)) v^{-1-alpha} dv in closed form for
// d = 1, 3: int_w^inf v^{a-1} e^{iv} dv = e^{i pi a / 2} Gamma(a, -iw).
double exact_tail_deficit(int dim, double alpha, double w) {
  auto osc = [&](double a, double ww) {
    std::complex<double> g = upper_gamma_cf(a, {0.0, -ww});
    return std::exp(std::complex<double>(0.0, kPi * a / 2.0)) * g;
  };
  auto tail_at = [&](double ww) {
    double smooth = std::pow(ww, -alpha) / alpha;
    if (dim == 1) return smooth - osc(-alpha, ww).real();
    return smooth - osc(-1.0 - alpha, ww).imag();
  };
  const double w_cf = 4.0;  // continued fraction is solid from here up
  if (w >= w_cf) return tail_at(w);
  // below w_cf integrate in log coordinates: the integrand decays like
  // e^{(2-alpha)u} towards u -> -inf, so the substitution removes the cusp
  auto f = [&](double u) {
    double v = std::exp(u);
    return one_minus_sphere_avg(dim, v) * std::pow(v, -alpha);
  };
  return tail_at(w_cf) +
         adaptive_simpson(f, std::log(w), std::log(w_cf), 1e-13);
}

double sphere_area(int d) {
  switch (d) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * kPi;
    default:
      return 4.0 * kPi;
  }
}

int64_t default_cutoff(int dim) {
  switch (dim) {
    case 1:
      return 4096;
    case 2:
      return 32;
    default:
      return 10;
  }
}

// Hermite-normal-form style check that the integer vectors generate Z^d.
bool generates_lattice(int dim, const std::vector<Jump>& pairs) {
  std::vector<std::array<int64_t, kMaxDim>> rows;
  for (const auto& j : pairs) rows.push_back(j.z.c);
  // Gaussian elimination over the integers, column by column.
  int64_t det = 1;
  int row = 0;
  for (int col = 0; col < dim; ++col) {
    // Euclidean reduction within the column.
    while (true) {
      int pivot = -1;
      for (std::size_t r = row; r < rows.size(); ++r)
        if (rows[r][col] != 0 &&
            (pivot < 0 ||
             std::abs(rows[r][col]) < std::abs(rows[pivot][col])))
          pivot = int(r);
      if (pivot < 0) return false;  // rank deficient
      std::swap(rows[row], rows[pivot]);
      bool reduced = true;
      for (std::size_t r = row + 1; r < rows.size(); ++r) {
        if (rows[r][col] == 0) continue;
        int64_t qq = rows[r][col] / rows[row][col];
        for (int k = 0; k < dim; ++k) rows[r][k] -= qq * rows[row][k];
        if (rows[r][col] != 0) reduced = false;
      }
      if (reduced) break;
    }
    det *= rows[row][col];
    ++row;
  }
  return std::abs(det) == 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// SymbolGrid

SymbolGrid::SymbolGrid(int dim, std::vector<double> nodes,
                       std::vector<double> weights, std::vector<double> symbol)
    : dim_(dim),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      symbol_(std::move(symbol)) {}

double SymbolGrid::integrate_heat(double t, const Site& delta) const {
  return integrate(delta, [t](double s) { return std::exp(t * s); });
}

double SymbolGrid::integrate_resolvent(double lambda, const Site& delta) const {
  return integrate(delta, [lambda](double s) { return 1.0 / (lambda - s); });
}

double SymbolGrid::integrate_green_split(double lambda, double horizon,
                                         const Site& delta) const {
  return integrate(delta, [lambda, horizon](double s) {
    double denom = lambda - s;
    if (denom * horizon < 1e-8) return horizon * (1.0 - 0.5 * denom * horizon);
    return (1.0 - std::exp(-horizon * denom)) / denom;
  });
}

double SymbolGrid::integrate_resolvent_sq(double lambda) const {
  return integrate(Site::origin(), [lambda](double s) {
    double d = lambda - s;
    return 1.0 / (d * d);
  });
}

// ---------------------------------------------------------------------------
// WalkKernel construction

WalkKernel WalkKernel::finite_support(int dim, const std::vector<Jump>& jumps) {
  if (dim < 1 || dim > kMaxDim) throw Error("dimension must be in [1,4]");
  if (jumps.empty()) throw ZeroSupport("empty jump support");
  std::map<Site, double> table;
  for (const auto& j : jumps) {
    if (j.z.is_origin()) throw Error("a(0) is determined by the jump rates");
    if (j.rate < 0) throw NegativeIntensity("a(z) < 0");
    for (int k = dim; k < kMaxDim; ++k)
      if (j.z.c[k] != 0) throw Error("jump uses coordinates beyond d");
    table[j.z] += j.rate;
  }
  WalkKernel kernel;
  kernel.dim_ = dim;
  kernel.variant_ = Variant::FiniteSupport;
  double q = 0;
  std::map<Site, double> seen = table;
  while (!seen.empty()) {
    auto [z, r] = *seen.begin();
    seen.erase(seen.begin());
    auto mirror = seen.find(-z);
    if (mirror == seen.end())
      throw AsymmetricKernel("a(z) != a(-z) at z = " + z.label(dim));
    if (std::abs(mirror->second - r) >
        1e-12 * std::max(1.0, std::abs(r)))
      throw AsymmetricKernel("a(z) != a(-z) at z = " + z.label(dim));
    seen.erase(mirror);
    if (r > 0) kernel.pairs_.push_back({z, r});
    q += 2 * r;
  }
  if (kernel.pairs_.empty()) throw ZeroSupport("all jump rates are zero");
  if (!generates_lattice(dim, kernel.pairs_))
    throw ZeroSupport("jump support does not generate Z^d");
  kernel.total_rate_ = q;
  return kernel;
}

WalkKernel WalkKernel::simple(int dim) {
  std::vector<Jump> jumps;
  for (int k = 0; k < dim; ++k) {
    jumps.push_back({Site::unit(k, 1), 1.0 / (2 * dim)});
    jumps.push_back({Site::unit(k, -1), 1.0 / (2 * dim)});
  }
  return finite_support(dim, jumps);
}

WalkKernel WalkKernel::heavy_tail_with_scale(int dim, double alpha,
                                             double scale, int64_t cutoff) {
  if (dim < 1 || dim > 3)
    throw Error("heavy-tail kernels are computed for d <= 3");
  if (!(alpha > 0 && alpha < 2))
    throw TailDivergence("alpha must lie in (0,2)");
  if (!(scale > 0)) throw NegativeIntensity("scale must be positive");
  if (cutoff <= 0) cutoff = default_cutoff(dim);

  WalkKernel kernel;
  kernel.dim_ = dim;
  kernel.variant_ = Variant::HeavyTail;
  kernel.alpha_ = alpha;
  kernel.scale_ = scale;
  kernel.cutoff_ = cutoff;

  // One representative per symmetric pair over 0 < |z| <= cutoff.
  double sum = 0;  // full symmetric sum of a(z) over the enumerated ball
  const double cut2 = double(cutoff) * double(cutoff);
  if (dim == 1) {
    for (int64_t z = 1; z <= cutoff; ++z) {
      double r = scale * std::pow(double(z), -(1.0 + alpha));
      kernel.pairs_.push_back({Site{z}, r});
      sum += 2 * r;
    }
  } else {
    // Lexicographically positive representatives.
    Site z;
    auto push = [&](const Site& s) {
      double n2 = double(s.norm2_sq());
      if (n2 == 0 || n2 > cut2) return;
      double r = scale * std::pow(n2, -0.5 * (dim + alpha));
      kernel.pairs_.push_back({s, r});
      sum += 2 * r;
    };
    if (dim == 2) {
      for (int64_t x0 = 1; x0 <= cutoff; ++x0)
        for (int64_t x1 = -cutoff; x1 <= cutoff; ++x1) push(Site{x0, x1});
      for (int64_t x1 = 1; x1 <= cutoff; ++x1) push(Site{0, x1});
    } else {
      for (int64_t x0 = 1; x0 <= cutoff; ++x0)
        for (int64_t x1 = -cutoff; x1 <= cutoff; ++x1)
          for (int64_t x2 = -cutoff; x2 <= cutoff; ++x2)
            push(Site{x0, x1, x2});
      for (int64_t x1 = 1; x1 <= cutoff; ++x1)
        for (int64_t x2 = -cutoff; x2 <= cutoff; ++x2) push(Site{0, x1, x2});
      for (int64_t x2 = 1; x2 <= cutoff; ++x2) push(Site{0, 0, x2});
    }
  }

  // Midpoint-continuity integral estimate of the mass beyond the cutoff.
  const double edge = double(cutoff) + 0.5;
  kernel.tail_rate_beyond_cutoff_ =
      scale * sphere_area(dim) * std::pow(edge, -alpha) / alpha;
  kernel.total_rate_ = sum + kernel.tail_rate_beyond_cutoff_;

  // d = 2 evaluates T(w) = int_w^inf (1 - Psi_d(v)) v^{-1-alpha} dv from a
  // precomputed log grid (the Bessel tail has no elementary closed form);
  // d = 1 and 3 use the exact incomplete-gamma route at evaluation time.
  if (dim == 2) {
    auto table = std::make_shared<std::vector<std::pair<double, double>>>();
    const double w_lo = 1e-14, w_hi = 1e7;
    const int per_decade = 64;
    const int n = int(per_decade * std::log10(w_hi / w_lo)) + 1;
    std::vector<double> ws(n);
    for (int i = 0; i < n; ++i)
      ws[i] = w_lo * std::pow(w_hi / w_lo, double(i) / (n - 1));
    // At w_hi the oscillatory part is negligible: T(w) ~ w^{-alpha}/alpha.
    std::vector<double> T(n);
    T[n - 1] = std::pow(w_hi, -alpha) / alpha;
    auto f = [dim, alpha](double v) {
      return one_minus_sphere_avg(dim, v) * std::pow(v, -1.0 - alpha);
    };
    for (int i = n - 2; i >= 0; --i)
      T[i] = T[i + 1] + adaptive_simpson(f, ws[i], ws[i + 1], 1e-13);
    table->resize(n);
    for (int i = 0; i < n; ++i) (*table)[i] = {std::log(ws[i]), T[i]};
    kernel.tail_table_ = std::move(table);
  }
  return kernel;
}

WalkKernel WalkKernel::heavy_tail(int dim, double alpha, double total_rate,
                                  int64_t cutoff) {
  if (!(total_rate > 0)) throw NegativeIntensity("total rate must be positive");
  WalkKernel probe = heavy_tail_with_scale(dim, alpha, 1.0, cutoff);
  return heavy_tail_with_scale(dim, alpha, total_rate / probe.total_rate_,
                               cutoff);
}

// ---------------------------------------------------------------------------
// Pointwise queries

double WalkKernel::rate(const Site& z) const {
  if (z.is_origin()) return -total_rate_;
  if (variant_ == Variant::HeavyTail)
    return scale_ * std::pow(double(z.norm2_sq()), -0.5 * (dim_ + alpha_));
  for (const auto& j : pairs_)
    if (j.z == z || j.z == -z) return j.rate;
  return 0.0;
}

double WalkKernel::tail_rate(double radius) const {
  double sum = 0;
  for (const auto& j : pairs_)
    if (j.z.norm2() > radius) sum += 2 * j.rate;
  if (variant_ == Variant::HeavyTail) {
    double edge = std::max(radius, double(cutoff_)) + 0.5;
    if (radius <= double(cutoff_)) {
      sum += tail_rate_beyond_cutoff_;
    } else {
      sum += scale_ * sphere_area(dim_) * std::pow(edge, -alpha_) / alpha_;
    }
  }
  return sum;
}

double WalkKernel::coordinate_variance_rate(int axis) const {
  if (variant_ == Variant::HeavyTail)
    throw Error("jump variance is infinite for heavy-tail kernels");
  double s = 0;
  for (const auto& j : pairs_)
    s += 2 * j.rate * double(j.z.c[axis]) * double(j.z.c[axis]);
  return s;
}

double WalkKernel::heavy_symbol_tail(double theta_norm) const {
  if (theta_norm == 0) return 0.0;
  const double edge = double(cutoff_) + 0.5;
  const double w = theta_norm * edge;
  double Tw;
  if (dim_ != 2) {
    Tw = exact_tail_deficit(dim_, alpha_, w);
    return scale_ * sphere_area(dim_) * std::pow(theta_norm, alpha_) * Tw;
  }
  const auto& tab = *tail_table_;
  if (w <= std::exp(tab.front().first)) {
    // (1 - Psi) ~ v^2 / (2d) below the table: the contribution is negligible
    // next to T(w_lo) itself.
    Tw = tab.front().second;
  } else if (w >= std::exp(tab.back().first)) {
    Tw = std::pow(w, -alpha_) / alpha_;
  } else {
    double lw = std::log(w);
    auto it = std::lower_bound(
        tab.begin(), tab.end(), lw,
        [](const std::pair<double, double>& p, double v) { return p.first < v; });
    std::size_t i = std::size_t(it - tab.begin());
    if (i == 0) i = 1;
    // Cubic (4-point Lagrange) interpolation on the log grid.
    std::size_t i0 = std::min(std::max<std::size_t>(i, 2) - 2, tab.size() - 4);
    double r = 0;
    for (std::size_t a = i0; a < i0 + 4; ++a) {
      double term = tab[a].second;
      for (std::size_t b = i0; b < i0 + 4; ++b)
        if (b != a) term *= (lw - tab[b].first) / (tab[a].first - tab[b].first);
      r += term;
    }
    Tw = r;
  }
  return scale_ * sphere_area(dim_) * std::pow(theta_norm, alpha_) * Tw;
}

double WalkKernel::symbol(const std::array<double, kMaxDim>& theta) const {
  double deficit = 0;
  for (const auto& j : pairs_) {
    double dot = 0;
    for (int k = 0; k < dim_; ++k) dot += theta[k] * double(j.z.c[k]);
    deficit += 2 * j.rate * (1.0 - std::cos(dot));
  }
  if (variant_ == Variant::HeavyTail) {
    double n2 = 0;
    for (int k = 0; k < dim_; ++k) n2 += theta[k] * theta[k];
    deficit += heavy_symbol_tail(std::sqrt(n2));
  }
  return -deficit;
}

// ---------------------------------------------------------------------------
// Grid construction and caching

const SymbolGrid& WalkKernel::grid(int level,
                                   const QuadratureOptions& opts) const {
  {
    std::lock_guard<std::mutex> lock(*grid_mutex_);
    if (level < int(grids_.size()) && grids_[level]) return *grids_[level];
  }

  std::vector<double> nodes, weights;
  if (variant_ == Variant::FiniteSupport) {
    std::size_t n = std::size_t(32) << level;
    nodes.resize(n);
    weights.assign(n, 1.0 / double(n));
    for (std::size_t j = 0; j < n; ++j)
      nodes[j] = -kPi + (double(j) + 0.5) * 2.0 * kPi / double(n);
  } else {
    // Geometric panels [pi 2^{-k-1}, pi 2^{-k}] mirrored about 0, composite
    // Gauss-Legendre inside each panel.
    const int octaves = dim_ == 1 ? 56 : 36;
    const int order = 6 + 4 * level;
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    auto add_panel = [&](double a, double b) {
      for (int i = 0; i < order; ++i) {
        nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[i]);
        weights.push_back(0.5 * (b - a) * gw[i] / (2.0 * kPi));
      }
    };
    double hi = kPi;
    for (int k = 0; k < octaves; ++k) {
      add_panel(hi / 2, hi);
      add_panel(-hi, -hi / 2);
      hi /= 2;
    }
    add_panel(0.0, hi);
    add_panel(-hi, 0.0);
    // keep node order sorted for reproducibility
    std::vector<std::size_t> perm(nodes.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
    std::vector<double> ns(nodes.size()), ws(nodes.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      ns[i] = nodes[perm[i]];
      ws[i] = weights[perm[i]];
    }
    nodes = std::move(ns);
    weights = std::move(ws);
  }

  std::size_t per_dim = nodes.size();
  std::size_t total = 1;
  for (int k = 0; k < dim_; ++k) {
    if (total > opts.max_nodes / per_dim)
      throw QuadratureNotConverged("refinement exceeds the node budget");
    total *= per_dim;
  }

  std::vector<double> sym(total);
  std::array<std::size_t, kMaxDim> idx{0, 0, 0, 0};
  std::array<double, kMaxDim> theta{0, 0, 0, 0};
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (int k = 0; k < dim_; ++k) theta[k] = nodes[idx[k]];
    sym[flat] = symbol(theta);
    for (int k = dim_ - 1; k >= 0; --k) {
      if (++idx[k] < per_dim) break;
      idx[k] = 0;
    }
  }

  auto g = std::make_shared<const SymbolGrid>(dim_, std::move(nodes),
                                              std::move(weights),
                                              std::move(sym));
  std::lock_guard<std::mutex> lock(*grid_mutex_);
  if (level >= int(grids_.size())) grids_.resize(level + 1);
  if (!grids_[level]) grids_[level] = std::move(g);
  return *grids_[level];
}

// ---------------------------------------------------------------------------
// p, G and transience

bool is_transient(const WalkKernel& kernel) {
  int d = kernel.dimension();
  if (kernel.variant() == WalkKernel::Variant::FiniteSupport) return d >= 3;
  return (d == 1 && kernel.alpha() < 1.0) || d >= 2;
}

namespace {

// Dyadic refinement driver shared by all spectral integrals.
template <class Eval>
double refine(const WalkKernel& kernel, const QuadratureOptions& opts,
              Eval&& eval, const char* what) {
  double prev = 0;
  bool have_prev = false;
  double rtol = std::max(opts.rtol, kernel.quadrature_noise_floor());
  for (int level = 0; level <= opts.max_level; ++level) {
    double cur;
    try {
      cur = eval(kernel.grid(level, opts));
    } catch (const QuadratureNotConverged&) {
      if (have_prev) return prev;  // budget hit after at least one estimate
      throw;
    }
    if (have_prev &&
        std::abs(cur - prev) <= std::max(rtol * std::abs(cur), opts.atol))
      return cur;
    prev = cur;
    have_prev = true;
  }
  throw QuadratureNotConverged(std::string(what) +
                               ": refinement did not converge");
}

}  // namespace

double transition_probability(const WalkKernel& kernel, double t,
                              const Site& x, const Site& y,
                              const QuadratureOptions& opts) {
  if (t < 0) throw Error("t must be nonnegative");
  Site delta = y - x;
  if (t == 0) return delta.is_origin() ? 1.0 : 0.0;
  double p = refine(
      kernel, opts,
      [&](const SymbolGrid& g) { return g.integrate_heat(t, delta); },
      "transition_probability");
  return std::clamp(p, 0.0, 1.0);
}

namespace {

// int_T^inf e^{-lambda t} p(t) dt from a three-point power-law fit
// p(t) ~ t^{-gamma} (c0 + c1/t + c2/t^2) anchored at t in {T/2, 3T/4, T}.
double green_tail_estimate(const WalkKernel& kernel, double lambda,
                           const Site& delta, double T,
                           const QuadratureOptions& opts) {
  double gamma = kernel.finite_variance()
                     ? 0.5 * kernel.dimension()
                     : kernel.dimension() / kernel.alpha();
  QuadratureOptions local = opts;
  local.rtol = std::max(opts.rtol, 1e-10);
  double ts[3] = {0.5 * T, 0.75 * T, T};
  double ps[3];
  for (int i = 0; i < 3; ++i)
    ps[i] = transition_probability(kernel, ts[i], Site::origin(), delta, local);
  // Solve for c0,c1,c2 in p t^gamma = c0 + c1/t + c2/t^2.
  double A[3][4];
  for (int i = 0; i < 3; ++i) {
    A[i][0] = 1.0;
    A[i][1] = 1.0 / ts[i];
    A[i][2] = 1.0 / (ts[i] * ts[i]);
    A[i][3] = ps[i] * std::pow(ts[i], gamma);
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c || A[c][c] == 0) continue;
      double f = A[r][c] / A[c][c];
      for (int k = c; k < 4; ++k) A[r][k] -= f * A[c][k];
    }
  }
  double c0 = A[0][3] / A[0][0], c1 = A[1][3] / A[1][1],
         c2 = A[2][3] / A[2][2];
  // Integrate (c0 t^-g + c1 t^-g-1 + c2 t^-g-2) e^{-lambda t} on a log grid.
  auto integrand = [&](double t) {
    return std::exp(-lambda * t) * std::pow(t, -gamma) *
           (c0 + c1 / t + c2 / (t * t));
  };
  double tail = 0;
  double a = T;
  const double grow = std::pow(10.0, 1.0 / 48.0);
  for (int step = 0; step < 48 * 14; ++step) {
    double b = a * grow;
    double fa = integrand(a), fm = integrand(0.5 * (a + b)),
           fb = integrand(b);
    tail += (b - a) / 6.0 * (fa + 4 * fm + fb);
    a = b;
    if (fb * a < 1e-18 * std::max(tail, 1e-30)) break;
  }
  return tail;
}

}  // namespace

double green(const WalkKernel& kernel, double lambda, const Site& x,
             const Site& y, const QuadratureOptions& opts) {
  if (lambda < 0) throw Error("lambda must be nonnegative");
  Site delta = y - x;
  if (lambda == 0 && !is_transient(kernel))
    return std::numeric_limits<double>::infinity();

  const double q = kernel.total_rate();
  if (lambda >= 0.05 * q) {
    return refine(
        kernel, opts,
        [&](const SymbolGrid& g) { return g.integrate_resolvent(lambda, delta); },
        "green");
  }

  // Small lambda on a transient kernel: split G into a finite-horizon part
  // (smooth on the torus) and an asymptotic tail.
  double T = kernel.finite_variance() ? (kernel.dimension() >= 3 ? 60.0 : 40.0)
                                      : 80.0;
  double head = refine(
      kernel, opts,
      [&](const SymbolGrid& g) {
        return g.integrate_green_split(lambda, T, delta);
      },
      "green");
  return head + green_tail_estimate(kernel, lambda, delta, T, opts);
}

double green_norm_sq(const WalkKernel& kernel, double lambda,
                     const QuadratureOptions& opts) {
  if (!(lambda > 0)) throw Error("lambda must be positive");
  return refine(
      kernel, opts,
      [&](const SymbolGrid& g) { return g.integrate_resolvent_sq(lambda); },
      "green_norm_sq");
}

}  // namespace brwlab
