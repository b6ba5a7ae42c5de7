#include "brwlab/moment_solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "brwlab/errors.hpp"

namespace brwlab {

std::string to_string(MomentVariant v) {
  return v == MomentVariant::Local ? "local" : "total";
}

MomentVariant moment_variant_from_string(const std::string& s) {
  if (s == "local") return MomentVariant::Local;
  if (s == "total") return MomentVariant::Total;
  throw Error("unknown moment variant: " + s);
}

std::size_t MomentTrajectory::site_index(const Site& s) const {
  for (std::size_t i = 0; i < tracked_sites.size(); ++i)
    if (tracked_sites[i] == s) return i;
  throw Error("site " + s.label(kMaxDim) + " is not tracked");
}

std::vector<double> MomentTrajectory::series(int order, const Site& s) const {
  if (order < 1 || order > orders) throw Error("moment order out of range");
  std::size_t si = site_index(s);
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    out[i] = values[order - 1][i][si];
  return out;
}

const std::vector<double>& MomentTrajectory::total_series(int order) const {
  if (order < 1 || order > orders) throw Error("moment order out of range");
  return totals[order - 1];
}

namespace {

std::vector<double> output_grid(const SolveOptions& opts) {
  std::set<double> ts;
  ts.insert(0.0);
  ts.insert(opts.horizon);
  double ratio = std::pow(10.0, 1.0 / std::max(1, opts.outputs_per_decade));
  for (double t = opts.first_output; t < opts.horizon; t *= ratio)
    ts.insert(t);
  for (double t : opts.checkpoints)
    if (t > 0 && t <= opts.horizon) ts.insert(t);
  // collapse near-duplicates so step clipping never produces a zero step
  std::vector<double> out;
  for (double t : ts)
    if (out.empty() || t - out.back() > 1e-12 * std::max(1.0, opts.horizon))
      out.push_back(t);
  if (out.back() != opts.horizon) out.back() = opts.horizon;
  return out;
}

}  // namespace

MomentTrajectory solve_moments(const WalkKernel& kernel,
                               const OffspringLaw& law,
                               const SolveOptions& opts) {
  if (opts.orders < 1) throw Error("orders must be >= 1");
  if (opts.horizon <= 0) throw Error("horizon must be positive");
  if (opts.track_radius > opts.radius)
    throw Error("track radius exceeds the box radius");

  const double b0 = law.death_rate();
  TruncatedOperator op(kernel, law.beta_star(), 0.0, opts.radius,
                       opts.threads);
  const Box& box = op.box();
  const std::size_t N = box.size();
  const int F = opts.orders + (opts.variant == MomentVariant::Total ? 1 : 0);
  const std::size_t M = std::size_t(F) * N;
  const int companion = opts.orders;  // delta field index for Total runs

  // State in u = m e^{b0 t}; the operator then carries no death term.
  std::vector<double> y(M, 0.0);
  if (opts.variant == MomentVariant::Local) {
    for (int f = 0; f < F; ++f) y[std::size_t(f) * N + box.origin_index()] = 1;
  } else {
    for (int n = 0; n < opts.orders; ++n)
      std::fill(y.begin() + std::size_t(n) * N,
                y.begin() + std::size_t(n + 1) * N, 1.0);
    y[std::size_t(companion) * N + box.origin_index()] = 1;
  }

  // scratch argument lists: g_n takes the n-1 lower moments at the origin
  std::vector<std::vector<double>> lower;
  for (int n = 2; n <= opts.orders; ++n) lower.emplace_back(n - 1);
  auto rhs = [&](double t, const std::vector<double>& u,
                 std::vector<double>& du) {
    for (int f = 0; f < F; ++f)
      op.apply(u.data() + std::size_t(f) * N, du.data() + std::size_t(f) * N);
    if (opts.orders >= 2) {
      double damp = std::exp(-b0 * t);
      for (int n = 2; n <= opts.orders; ++n) {
        auto& args = lower[n - 2];
        for (int k = 1; k < n; ++k)
          args[k - 1] = u[std::size_t(k - 1) * N + box.origin_index()] * damp;
        du[std::size_t(n - 1) * N + box.origin_index()] +=
            law.g(n, args) / damp;
      }
    }
  };

  // Dormand-Prince 5(4), FSAL.
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

  std::vector<double> k1(M), k2(M), k3(M), k4(M), k5(M), k6(M), k7(M), yt(M),
      ynew(M);

  MomentTrajectory traj;
  traj.variant = opts.variant;
  traj.orders = opts.orders;
  traj.dimension = kernel.dimension();
  traj.radius = opts.radius;
  traj.times = output_grid(opts);

  // tracked site box indices
  std::vector<std::size_t> tracked;
  {
    int64_t r = opts.track_radius;
    Site s = Site::origin();
    for (int k = 0; k < box.dimension(); ++k) s.c[k] = -r;
    while (true) {
      traj.tracked_sites.push_back(s);
      tracked.push_back(std::size_t(box.index(s)));
      int k = box.dimension() - 1;
      for (; k >= 0; --k) {
        if (++s.c[k] <= r) break;
        s.c[k] = -r;
      }
      if (k < 0) break;
    }
  }
  traj.values.assign(opts.orders, {});
  traj.totals.assign(opts.orders, {});

  auto record = [&](double t, const std::vector<double>& u) {
    double damp = std::exp(-b0 * t);
    for (int n = 0; n < opts.orders; ++n) {
      const double* field = u.data() + std::size_t(n) * N;
      std::vector<double> row(tracked.size());
      for (std::size_t s = 0; s < tracked.size(); ++s)
        row[s] = field[tracked[s]] * damp;
      traj.values[n].push_back(std::move(row));
      double sum = 0;
      for (std::size_t i = 0; i < N; ++i) sum += field[i];
      traj.totals[n].push_back(sum * damp);
    }
  };

  record(0.0, y);

  double t = 0;
  double h = std::min(opts.first_output, 0.01);
  std::size_t next_out = 1;
  const double h_min = 1e-12 * std::max(1.0, opts.horizon);
  const long max_steps = 5'000'000;
  bool fsal_valid = false;

  while (next_out < traj.times.size()) {
    double target = traj.times[next_out];
    if (t + h >= target) h = target - t;
    if (!fsal_valid) rhs(t, y, k1);

    for (std::size_t i = 0; i < M; ++i) yt[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, yt, k2);
    for (std::size_t i = 0; i < M; ++i)
      yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, yt, k3);
    for (std::size_t i = 0; i < M; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, yt, k4);
    for (std::size_t i = 0; i < M; ++i)
      yt[i] = y[i] +
              h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, yt, k5);
    for (std::size_t i = 0; i < M; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                          a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, yt, k6);
    for (std::size_t i = 0; i < M; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                            b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, ynew, k7);

    double err2 = 0;
    for (std::size_t i = 0; i < M; ++i) {
      double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                      e6 * k6[i] + e7 * k7[i]);
      double sc =
          opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err2 += (e / sc) * (e / sc);
    }
    double err = std::sqrt(err2 / double(M));

    if (err <= 1.0 || h <= h_min) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);
      fsal_valid = true;
      if (++traj.steps_taken > max_steps)
        throw StiffnessFailure("step budget exhausted before the horizon");
      if (t >= target - 1e-14 * std::max(1.0, target)) {
        t = target;
        record(t, y);
        ++next_out;
      }
    } else {
      fsal_valid = true;  // rejected step leaves k1 = f(t, y) intact
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::clamp(fac, 0.2, 5.0);
    if (h < h_min) h = h_min;
  }

  // boundary leak from the origin-seeded first-moment field
  {
    const double* w =
        y.data() + std::size_t(opts.variant == MomentVariant::Local
                                   ? 0
                                   : companion) *
                       N;
    double edge = 0, all = 0;
    for (std::size_t i = 0; i < N; ++i) {
      all += w[i];
      if (box.on_boundary(i)) edge += w[i];
    }
    traj.boundary_leak = all > 0 ? edge / all : 0.0;
    if (traj.boundary_leak > opts.leak_tol)
      throw TruncationTooSmall(
          "boundary layer holds " + std::to_string(traj.boundary_leak) +
          " of the origin-seeded mass at the horizon; enlarge the box");
  }

  double damp = std::exp(-b0 * opts.horizon);
  traj.final_slice.assign(opts.orders, std::vector<double>(N));
  for (int n = 0; n < opts.orders; ++n)
    for (std::size_t i = 0; i < N; ++i)
      traj.final_slice[n][i] = y[std::size_t(n) * N + i] * damp;

  return traj;
}

}  // namespace brwlab
