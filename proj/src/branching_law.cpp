#include "brwlab/branching_law.hpp"

#include <cmath>
#include <functional>

#include "brwlab/errors.hpp"

namespace brwlab {

namespace {

double factorial(int n) {
  double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Enumerate partitions of n into r parts (each >= 1), as multiplicity
// vectors over part sizes 1..n-1.
void enumerate_partitions(int n, int r, int max_part, std::vector<int>& parts,
                          const std::function<void(const std::vector<int>&)>& emit) {
  if (r == 0) {
    if (n == 0) emit(parts);
    return;
  }
  for (int p = std::min(max_part, n - (r - 1)); p >= 1; --p) {
    parts.push_back(p);
    enumerate_partitions(n - p, r - 1, p, parts, emit);
    parts.pop_back();
  }
}

}  // namespace

OffspringLaw::OffspringLaw(const std::map<int, double>& b, int n_max)
    : n_max_(n_max) {
  double sum = 0;
  for (auto [n, rate] : b) {
    if (n == 1) throw Error("b_1 is implied by sum_n b_n = 0");
    if (n < 0) throw Error("negative offspring count");
    if (rate < 0) throw NegativeIntensity("b_n < 0 for n != 1");
    if (rate == 0) continue;
    b_[n] = rate;
    sum += rate;
    max_n_ = std::max(max_n_, n);
  }
  b0_ = b_.count(0) ? b_.at(0) : 0.0;
  b1_ = -sum;
  for (auto [n, rate] : b_)
    if (n > 1) beta_star_ += (n - 1) * rate;

  // Cache g_n coefficient tables: compositions of n into r ordered parts are
  // grouped by partition, with r!/prod(mult!) orderings each.
  g_terms_.assign(std::max(0, n_max_ - 1), {});
  for (int n = 2; n <= n_max_; ++n) {
    auto& terms = g_terms_[n - 2];
    for (int r = 2; r <= n; ++r) {
      double beta_r = factorial_moment(r);
      if (beta_r == 0) continue;
      std::vector<int> parts;
      enumerate_partitions(n, r, n - 1, parts, [&](const std::vector<int>& p) {
        Term t;
        t.counts.assign(n, 0);  // counts[i] = multiplicity of part size i
        double denom = 1;       // prod i_k!
        for (int part : p) {
          t.counts[part]++;
          denom *= factorial(part);
        }
        double orderings = factorial(r);
        for (int i = 1; i < n; ++i) orderings /= factorial(t.counts[i]);
        t.coefficient =
            beta_r / factorial(r) * factorial(n) / denom * orderings;
        terms.push_back(std::move(t));
      });
    }
  }
}

double OffspringLaw::intensity(int n) const {
  if (n == 1) return b1_;
  auto it = b_.find(n);
  return it == b_.end() ? 0.0 : it->second;
}

double OffspringLaw::factorial_moment(int r) const {
  if (r < 1) throw Error("factorial moment order must be >= 1");
  double s = b1_;  // n = 1 contributes b_1 only for r = 1
  if (r > 1) s = 0;
  for (auto [n, rate] : b_) {
    if (n < r) continue;
    double fall = 1;
    for (int k = 0; k < r; ++k) fall *= (n - k);
    s += fall * rate;
  }
  return s;
}

double OffspringLaw::generating_function(double u) const {
  double s = b1_ * u;
  for (auto [n, rate] : b_) s += rate * std::pow(u, n);
  return s;
}

double OffspringLaw::g(int n, const std::vector<double>& lower) const {
  if (n < 2) throw Error("g_n is defined for n >= 2");
  if (int(lower.size()) != n - 1)
    throw ArityMismatch("g_n expects exactly n-1 lower moments");
  if (n > n_max_) throw Error("g_n order exceeds the cached table");
  double total = 0;
  for (const auto& t : g_terms_[n - 2]) {
    double prod = t.coefficient;
    for (int i = 1; i < n; ++i)
      for (int k = 0; k < t.counts[i]; ++k) prod *= lower[i - 1];
    total += prod;
  }
  return total;
}

}  // namespace brwlab
