#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace brwlab {

// Philox4x32-10 counter RNG. Streams keyed by (seed, stream) are independent,
// so replicas can run on any thread layout and still reproduce bit-for-bit.
class Philox {
 public:
  Philox(uint64_t seed, uint64_t stream);

  uint32_t next32();
  uint64_t next64();
  double uniform();                   // (0,1), 53-bit mantissa
  double exponential(double rate);    // mean 1/rate
  uint64_t uniform_index(uint64_t n); // unbiased in [0, n)

 private:
  void refill();

  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> counter_;
  std::array<uint32_t, 4> block_;
  int pos_ = 4;  // forces a refill on first use
};

// Vose alias method: O(1) sampling from a fixed finite distribution.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights);

  std::size_t sample(Philox& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<uint32_t> alias_;
};

}  // namespace brwlab
