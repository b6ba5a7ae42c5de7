#include "brwlab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>
#include <thread>

#include "brwlab/errors.hpp"

namespace brwlab {

namespace {

std::vector<double> sampler_weights(const WalkKernel& kernel,
                                    std::vector<Site>& jumps, bool& has_tail) {
  std::vector<double> w;
  double covered = 0;
  for (const auto& j : kernel.support_pairs()) {
    jumps.push_back(j.z);
    w.push_back(j.rate);
    jumps.push_back(-j.z);
    w.push_back(j.rate);
    covered += 2 * j.rate;
  }
  double tail = kernel.total_rate() - covered;
  has_tail = kernel.variant() == WalkKernel::Variant::HeavyTail && tail > 0;
  if (has_tail) w.push_back(tail);
  return w;
}

}  // namespace

JumpSampler::JumpSampler(const WalkKernel& kernel)
    : kernel_(&kernel), table_(sampler_weights(kernel, jumps_, has_tail_)) {}

Site JumpSampler::sample(Philox& rng) const {
  std::size_t idx = table_.sample(rng);
  if (has_tail_ && idx == jumps_.size()) return sample_tail(rng);
  return jumps_[idx];
}

Site JumpSampler::sample_tail(Philox& rng) const {
  const double alpha = kernel_->alpha();
  const double edge = double(kernel_->cutoff()) + 0.5;
  const int d = kernel_->dimension();
  for (;;) {
    double v = edge * std::pow(rng.uniform(), -1.0 / alpha);
    if (v > 9e15) continue;  // keep llround well-defined
    if (d == 1) {
      // Exact: target P(k) proportional to k^{-1-alpha}; proposal mass of the
      // rounding cell is its integral, which dominates the midpoint value.
      int64_t k = std::llround(v);
      double cell = std::pow(k - 0.5, -alpha) - std::pow(k + 0.5, -alpha);
      double accept = alpha * std::pow(double(k), -1.0 - alpha) / cell;
      if (rng.uniform() >= accept) continue;
      return Site{rng.uniform() < 0.5 ? k : -k};
    }
    // d >= 2: round a continuous isotropic power-law radius onto the lattice.
    Site z;
    if (d == 2) {
      double phi = 2 * std::numbers::pi * rng.uniform();
      z = Site{std::llround(v * std::cos(phi)), std::llround(v * std::sin(phi))};
    } else {
      double c = 2 * rng.uniform() - 1;
      double s = std::sqrt(std::max(0.0, 1 - c * c));
      double phi = 2 * std::numbers::pi * rng.uniform();
      z = Site{std::llround(v * s * std::cos(phi)),
               std::llround(v * s * std::sin(phi)), std::llround(v * c)};
    }
    double cut = double(kernel_->cutoff());
    if (double(z.norm2_sq()) <= cut * cut) continue;  // alias table territory
    return z;
  }
}

std::vector<Site> tracked_window(int dim, int64_t radius) {
  std::vector<Site> sites;
  Site s = Site::origin();
  for (int k = 0; k < dim; ++k) s.c[k] = -radius;
  while (true) {
    sites.push_back(s);
    int k = dim - 1;
    for (; k >= 0; --k) {
      if (++s.c[k] <= radius) break;
      s.c[k] = -radius;
    }
    if (k < 0) break;
  }
  return sites;
}

namespace {

// Flat index of a site in the tracked cube, or -1 outside it.
inline std::ptrdiff_t window_slot(const Site& s, int dim, int64_t r) {
  std::size_t idx = 0;
  for (int k = 0; k < dim; ++k) {
    int64_t c = s.c[k];
    if (c < -r || c > r) return -1;
    idx = idx * std::size_t(2 * r + 1) + std::size_t(c + r);
  }
  return std::ptrdiff_t(idx);
}

}  // namespace

ReplicaRecord simulate_replica(const WalkKernel& kernel,
                               const OffspringLaw& law, const SimOptions& opts,
                               uint64_t replica_index) {
  std::vector<double> checkpoints = opts.checkpoints;
  if (checkpoints.empty()) checkpoints = {opts.horizon};
  for (double c : checkpoints)
    if (c < 0 || c > opts.horizon)
      throw Error("checkpoints must lie in [0, horizon]");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
    throw Error("checkpoints must be ascending");

  const int d = kernel.dimension();
  const double q = kernel.total_rate();
  const double b0 = law.death_rate();

  // offspring counts n >= 2 with their intensities
  std::vector<int> branch_n;
  std::vector<double> branch_w;
  double branch_rate = 0;
  for (int n = 2; n <= law.max_offspring(); ++n) {
    double bn = law.intensity(n);
    if (bn > 0) {
      branch_n.push_back(n);
      branch_w.push_back(bn);
      branch_rate += bn;
    }
  }
  const double r_origin = q + b0 + branch_rate;
  const double r_other = q + b0;

  static thread_local const WalkKernel* cached_kernel = nullptr;
  static thread_local std::unique_ptr<JumpSampler> cached_sampler;
  if (cached_kernel != &kernel) {
    cached_sampler = std::make_unique<JumpSampler>(kernel);
    cached_kernel = &kernel;
  }
  const JumpSampler& sampler = *cached_sampler;

  Philox rng(opts.seed, replica_index);

  uint64_t at_origin = 1;
  std::vector<Site> others;  // particles away from the origin
  double t = 0;
  ReplicaRecord rec;
  const std::size_t n_slots =
      tracked_window(d, opts.track_radius).size();

  auto snapshot = [&]() {
    std::vector<uint64_t> counts(n_slots, 0);
    counts[std::size_t(window_slot(Site::origin(), d, opts.track_radius))] +=
        at_origin;
    for (const auto& s : others) {
      auto slot = window_slot(s, d, opts.track_radius);
      if (slot >= 0) ++counts[std::size_t(slot)];
    }
    rec.counts.push_back(std::move(counts));
    rec.totals.push_back(at_origin + others.size());
  };

  std::size_t cp = 0;
  for (;;) {
    uint64_t population = at_origin + others.size();
    if (population == 0) {
      while (cp < checkpoints.size()) snapshot(), ++cp;
      break;
    }
    if (population > opts.max_population || rec.events > opts.max_events) {
      rec.truncated = true;
      while (cp < checkpoints.size()) snapshot(), ++cp;
      break;
    }
    double total_rate =
        double(at_origin) * r_origin + double(others.size()) * r_other;
    double t_next = t + rng.exponential(total_rate);
    while (cp < checkpoints.size() && checkpoints[cp] <= t_next) {
      snapshot();
      ++cp;
    }
    if (cp == checkpoints.size()) break;
    t = t_next;
    ++rec.events;

    double pick = rng.uniform() * total_rate;
    if (pick < double(at_origin) * r_origin) {
      double w = rng.uniform() * r_origin;
      if (w < q) {
        Site z = sampler.sample(rng);
        --at_origin;
        others.push_back(z);
      } else if (w < q + b0) {
        --at_origin;
      } else {
        w -= q + b0;
        std::size_t j = 0;
        while (j + 1 < branch_w.size() && w >= branch_w[j]) w -= branch_w[j++];
        at_origin += uint64_t(branch_n[j] - 1);  // offspring born at the source
      }
    } else {
      std::size_t i = rng.uniform_index(others.size());
      double w = rng.uniform() * r_other;
      if (w < q) {
        Site pos = others[i] + sampler.sample(rng);
        if (pos.is_origin()) {
          ++at_origin;
          others[i] = others.back();
          others.pop_back();
        } else {
          others[i] = pos;
        }
      } else {
        others[i] = others.back();
        others.pop_back();
      }
    }
  }
  return rec;
}

std::vector<ReplicaRecord> run_replicas(const WalkKernel& kernel,
                                        const OffspringLaw& law,
                                        const SimOptions& opts) {
  std::vector<ReplicaRecord> out(opts.replicas);
  int threads = opts.threads;
  if (threads <= 0)
    threads = int(std::min<unsigned>(std::thread::hardware_concurrency(), 16));
  threads = std::max(1, std::min<int>(threads, int(opts.replicas)));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t r = next.fetch_add(1);
      if (r >= opts.replicas) return;
      out[r] = simulate_replica(kernel, law, opts, r);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

SimulationSummary estimate_moments(const std::vector<ReplicaRecord>& records,
                                   const WalkKernel& kernel,
                                   const SimOptions& opts) {
  if (records.size() < 2) throw Error("need at least two replicas");
  SimulationSummary sum;
  sum.replicas = records.size();
  sum.checkpoints = opts.checkpoints.empty() ? std::vector<double>{opts.horizon}
                                             : opts.checkpoints;
  sum.tracked_sites = tracked_window(kernel.dimension(), opts.track_radius);

  const std::size_t C = sum.checkpoints.size();
  const std::size_t S = sum.tracked_sites.size();
  const int N = opts.orders;

  std::size_t used = 0;
  for (const auto& r : records)
    if (!r.truncated) ++used;
  sum.truncated = records.size() - used;
  if (used < 2)
    throw Error("fewer than two untruncated replicas; raise the caps");

  sum.local_mean.assign(N, std::vector<std::vector<double>>(
                               C, std::vector<double>(S, 0)));
  sum.local_se = sum.local_mean;
  sum.total_mean.assign(N, std::vector<double>(C, 0));
  sum.total_se = sum.total_mean;
  sum.extinction_fraction.assign(C, 0);

  // two-pass mean/variance per (order, checkpoint, site)
  std::vector<double> acc(S), acc2(S);
  for (int n = 1; n <= N; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      std::fill(acc.begin(), acc.end(), 0.0);
      std::fill(acc2.begin(), acc2.end(), 0.0);
      double tacc = 0, tacc2 = 0;
      for (const auto& r : records) {
        if (r.truncated) continue;
        for (std::size_t s = 0; s < S; ++s) {
          double v = std::pow(double(r.counts[c][s]), n);
          acc[s] += v;
          acc2[s] += v * v;
        }
        double v = std::pow(double(r.totals[c]), n);
        tacc += v;
        tacc2 += v * v;
      }
      for (std::size_t s = 0; s < S; ++s) {
        double mean = acc[s] / double(used);
        double var =
            std::max(0.0, acc2[s] / double(used) - mean * mean) *
            double(used) / double(used - 1);
        sum.local_mean[n - 1][c][s] = mean;
        sum.local_se[n - 1][c][s] = std::sqrt(var / double(used));
      }
      double mean = tacc / double(used);
      double var = std::max(0.0, tacc2 / double(used) - mean * mean) *
                   double(used) / double(used - 1);
      sum.total_mean[n - 1][c] = mean;
      sum.total_se[n - 1][c] = std::sqrt(var / double(used));
    }
  }
  for (std::size_t c = 0; c < C; ++c) {
    std::size_t extinct = 0;
    for (const auto& r : records)
      if (!r.truncated && r.totals[c] == 0) ++extinct;
    sum.extinction_fraction[c] = double(extinct) / double(used);
  }
  return sum;
}

LimitLawSample sample_limit_law(const WalkKernel& kernel,
                                const OffspringLaw& law,
                                const RegimeReport& report, double t_large,
                                const SimOptions& opts) {
  if (report.regime != Regime::Supercritical || !report.lambda_E)
    throw WrongRegime("the rescaled limit law needs a supercritical model");
  const double le = *report.lambda_E;

  SimOptions run = opts;
  run.horizon = 1.5 * t_large;
  run.checkpoints = {t_large, 1.5 * t_large};
  auto records = run_replicas(kernel, law, run);

  LimitLawSample out;
  out.lambda_e = le;
  out.t_primary = t_large;
  out.t_secondary = 1.5 * t_large;
  out.tracked_sites = tracked_window(kernel.dimension(), opts.track_radius);

  const std::size_t S = out.tracked_sites.size();
  std::vector<double> loc1(S, 0), loc2(S, 0);
  double w1 = std::exp(-le * out.t_primary);
  double w2 = std::exp(-le * out.t_secondary);
  std::size_t used = 0, zeros = 0;
  double s1 = 0, s1sq = 0, s2 = 0;
  for (const auto& r : records) {
    if (r.truncated) continue;
    ++used;
    double v1 = double(r.totals[0]) * w1;
    double v2 = double(r.totals[1]) * w2;
    out.rescaled_primary.push_back(v1);
    out.rescaled_secondary.push_back(v2);
    s1 += v1;
    s1sq += v1 * v1;
    s2 += v2;
    if (r.totals[0] == 0) ++zeros;
    for (std::size_t s = 0; s < S; ++s) {
      loc1[s] += double(r.counts[0][s]) * w1;
      loc2[s] += double(r.counts[1][s]) * w2;
    }
  }
  if (used < 2) throw Error("fewer than two untruncated replicas");
  out.mean_primary = s1 / double(used);
  out.mean_secondary = s2 / double(used);
  out.variance_primary =
      std::max(0.0, s1sq / double(used) - out.mean_primary * out.mean_primary);
  out.zero_fraction_primary = double(zeros) / double(used);
  out.psi_primary.resize(S);
  out.psi_secondary.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    out.psi_primary[s] = loc1[s] / std::max(s1, 1e-300);
    out.psi_secondary[s] = loc2[s] / std::max(s2, 1e-300);
  }
  return out;
}

}  // namespace brwlab
