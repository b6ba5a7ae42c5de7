#include "brwlab/rng.hpp"

#include <cmath>

#include "brwlab/errors.hpp"

namespace brwlab {

namespace {

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = uint64_t(a) * b;
  hi = uint32_t(p >> 32);
  lo = uint32_t(p);
}

}  // namespace

Philox::Philox(uint64_t seed, uint64_t stream) {
  key_ = {uint32_t(seed), uint32_t(seed >> 32)};
  counter_ = {0, 0, uint32_t(stream), uint32_t(stream >> 32)};
}

void Philox::refill() {
  std::array<uint32_t, 4> x = counter_;
  uint32_t k0 = key_[0], k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(0xD2511F53u, x[0], hi0, lo0);
    mulhilo(0xCD9E8D57u, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
  }
  block_ = x;
  pos_ = 0;
  if (++counter_[0] == 0) ++counter_[1];  // 64-bit counter per stream
}

uint32_t Philox::next32() {
  if (pos_ == 4) refill();
  return block_[pos_++];
}

uint64_t Philox::next64() {
  uint64_t hi = next32();
  return (hi << 32) | next32();
}

double Philox::uniform() {
  // 53 random bits into (0,1); never returns 0 or 1
  return (double(next64() >> 11) + 0.5) * 0x1p-53;
}

double Philox::exponential(double rate) {
  if (rate <= 0) throw Error("exponential rate must be positive");
  return -std::log(uniform()) / rate;
}

uint64_t Philox::uniform_index(uint64_t n) {
  if (n == 0) throw Error("uniform_index over an empty range");
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = next64();
  } while (v >= limit);
  return v % n;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw Error("alias table over an empty distribution");
  double total = 0;
  for (double w : weights) {
    if (w < 0) throw NegativeIntensity("alias table weight < 0");
    total += w;
  }
  if (total <= 0) throw Error("alias table weights sum to zero");

  prob_.assign(n, 0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * double(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(uint32_t(i));
  }
  while (!small.empty() && !large.empty()) {
    uint32_t s = small.back(), l = large.back();
    small.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (uint32_t i : large) prob_[i] = 1.0;
  for (uint32_t i : small) prob_[i] = 1.0;  // numerical leftovers
}

std::size_t AliasTable::sample(Philox& rng) const {
  std::size_t i = rng.uniform_index(prob_.size());
  return rng.uniform() < prob_[i] ? i : alias_[i];
}

}  // namespace brwlab
