#include "brwlab/truncated_operator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "brwlab/errors.hpp"

namespace brwlab {

Box::Box(int dim, int64_t radius) : dim_(dim), radius_(radius) {
  if (dim < 1 || dim > kMaxDim) throw Error("box dimension must be in [1,4]");
  if (radius < 1) throw Error("box radius must be >= 1");
  side_ = 2 * radius + 1;
  size_ = 1;
  for (int k = 0; k < dim; ++k) {
    if (size_ > std::size_t(1) << 40) throw Error("box too large");
    size_ *= std::size_t(side_);
  }
  origin_ = index(Site::origin());
}

std::ptrdiff_t Box::index(const Site& s) const {
  std::size_t idx = 0;
  for (int k = 0; k < dim_; ++k) {
    int64_t c = s.c[k];
    if (c < -radius_ || c > radius_) return -1;
    idx = idx * std::size_t(side_) + std::size_t(c + radius_);
  }
  return std::ptrdiff_t(idx);
}

Site Box::site(std::size_t index) const {
  Site s;
  for (int k = dim_ - 1; k >= 0; --k) {
    s.c[k] = int64_t(index % std::size_t(side_)) - radius_;
    index /= std::size_t(side_);
  }
  return s;
}

bool Box::on_boundary(std::size_t index) const {
  Site s = site(index);
  for (int k = 0; k < dim_; ++k)
    if (std::abs(s.c[k]) == radius_) return true;
  return false;
}

TruncatedOperator::TruncatedOperator(const WalkKernel& kernel,
                                     double beta_star, double b0,
                                     int64_t radius, int threads)
    : box_(kernel.dimension(), radius),
      beta_star_(beta_star),
      b0_(b0),
      q_(kernel.total_rate()),
      threads_(threads) {
  const int d = kernel.dimension();
  if (kernel.variant() == WalkKernel::Variant::FiniteSupport) {
    for (const auto& j : kernel.support_pairs()) {
      offsets_.push_back(j.z);
      offset_rates_.push_back(j.rate);
    }
  } else {
    // Exact power-law couplings for every displacement reachable inside the
    // box (|z|_inf <= 2 radius componentwise), capped for d >= 2.
    int64_t reach = 2 * radius;
    if (d >= 2) reach = std::min<int64_t>(reach, std::max(kernel.cutoff(), 64l));
    auto push = [&](const Site& z) {
      if (z.is_origin()) return;
      offsets_.push_back(z);
      offset_rates_.push_back(kernel.rate(z));
    };
    if (d == 1) {
      for (int64_t z = 1; z <= reach; ++z) push(Site{z});
    } else if (d == 2) {
      for (int64_t x0 = 1; x0 <= reach; ++x0)
        for (int64_t x1 = -reach; x1 <= reach; ++x1) push(Site{x0, x1});
      for (int64_t x1 = 1; x1 <= reach; ++x1) push(Site{0, x1});
    } else {
      for (int64_t x0 = 1; x0 <= reach; ++x0)
        for (int64_t x1 = -reach; x1 <= reach; ++x1)
          for (int64_t x2 = -reach; x2 <= reach; ++x2) push(Site{x0, x1, x2});
      for (int64_t x1 = 1; x1 <= reach; ++x1)
        for (int64_t x2 = -reach; x2 <= reach; ++x2) push(Site{0, x1, x2});
      for (int64_t x2 = 1; x2 <= reach; ++x2) push(Site{0, 0, x2});
    }
  }
  // Flat-index stride of each offset (valid only after bounds checks).
  const int64_t side = 2 * radius + 1;
  for (const auto& z : offsets_) {
    std::ptrdiff_t s = 0;
    for (int k = 0; k < d; ++k) s = s * side + z.c[k];
    offset_strides_.push_back(s);
  }
}

void TruncatedOperator::apply(const std::vector<double>& in,
                              std::vector<double>& out) const {
  out.resize(box_.size());
  apply(in.data(), out.data());
}

void TruncatedOperator::apply(const double* in, double* out) const {
  const std::size_t n = box_.size();
  const int d = box_.dimension();
  const int64_t L = box_.radius();
  const double diag = -q_ - b0_;
  const std::size_t m = offsets_.size();

  auto run_rows = [&](std::size_t row_begin, std::size_t row_end) {
    Site x = box_.site(row_begin);
    for (std::size_t i = row_begin; i < row_end; ++i) {
      double acc = diag * in[i];
      for (std::size_t j = 0; j < m; ++j) {
        const Site& z = offsets_[j];
        bool fwd = true, bwd = true;
        for (int k = 0; k < d; ++k) {
          int64_t c = x.c[k] + z.c[k];
          if (c < -L || c > L) fwd = false;
          c = x.c[k] - z.c[k];
          if (c < -L || c > L) bwd = false;
        }
        if (fwd) acc += offset_rates_[j] * in[i + offset_strides_[j]];
        if (bwd) acc += offset_rates_[j] * in[i - offset_strides_[j]];
      }
      out[i] = acc;
      // advance x to the next row-major site
      for (int k = d - 1; k >= 0; --k) {
        if (++x.c[k] <= L) break;
        x.c[k] = -L;
      }
    }
  };

  std::size_t work = n * std::max<std::size_t>(m, 1);
  int threads = threads_;
  if (threads <= 0)
    threads = int(std::min<unsigned>(std::thread::hardware_concurrency(), 8));
  if (threads > 1 && work > 2'000'000) {
    std::vector<std::thread> pool;
    std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::size_t b = std::size_t(t) * chunk;
      std::size_t e = std::min(n, b + chunk);
      if (b >= e) break;
      pool.emplace_back(run_rows, b, e);
    }
    for (auto& th : pool) th.join();
  } else {
    run_rows(0, n);
  }

  out[box_.origin_index()] += beta_star_ * in[box_.origin_index()];
}

double TruncatedOperator::entry(const Site& x, const Site& y) const {
  if (box_.index(x) < 0 || box_.index(y) < 0)
    throw Error("site outside the box");
  double v = 0;
  Site z = y - x;
  if (z.is_origin()) {
    v = -q_ - b0_;
    if (x.is_origin()) v += beta_star_;
  } else {
    for (std::size_t j = 0; j < offsets_.size(); ++j)
      if (offsets_[j] == z || offsets_[j] == -z) v = offset_rates_[j];
  }
  return v;
}

EigenPair leading_eigenpair(const TruncatedOperator& op, double tol,
                            int max_iters) {
  const std::size_t n = op.box().size();
  // Shift making the iteration matrix entrywise nonnegative.
  const double shift = op.total_rate() + op.death_rate();
  std::vector<double> v(n, 1.0 / std::sqrt(double(n))), w(n);
  double lambda = 0;
  int it = 0;
  for (; it < max_iters; ++it) {
    op.apply(v, w);
    double ray = 0, nw2 = 0;
    for (std::size_t i = 0; i < n; ++i) ray += v[i] * w[i];
    lambda = ray;
    double res2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = w[i] - lambda * v[i];
      res2 += r * r;
    }
    if (std::sqrt(res2) < tol)
      return {lambda, v, std::sqrt(res2), it};
    for (std::size_t i = 0; i < n; ++i) w[i] += shift * v[i];
    nw2 = 0;
    for (std::size_t i = 0; i < n; ++i) nw2 += w[i] * w[i];
    double nw = std::sqrt(nw2);
    if (nw == 0) throw NoConvergence("power iteration collapsed to zero");
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  throw NoConvergence("power iteration did not reach the residual target");
}

}  // namespace brwlab
