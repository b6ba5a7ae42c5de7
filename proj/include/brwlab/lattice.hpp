#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

namespace brwlab {

inline constexpr int kMaxDim = 4;

// A point of Z^d. Only the first `dim` coordinates of a model are ever
// meaningful; the rest stay zero.
struct Site {
  std::array<int64_t, kMaxDim> c{0, 0, 0, 0};

  Site() = default;
  Site(std::initializer_list<int64_t> xs) {
    int i = 0;
    for (int64_t x : xs) {
      if (i < kMaxDim) c[i++] = x;
    }
  }

  int64_t& operator[](int i) { return c[i]; }
  int64_t operator[](int i) const { return c[i]; }

  friend bool operator==(const Site& a, const Site& b) { return a.c == b.c; }
  friend bool operator!=(const Site& a, const Site& b) { return !(a == b); }
  friend bool operator<(const Site& a, const Site& b) { return a.c < b.c; }

  friend Site operator+(const Site& a, const Site& b) {
    Site r;
    for (int i = 0; i < kMaxDim; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
  }
  friend Site operator-(const Site& a, const Site& b) {
    Site r;
    for (int i = 0; i < kMaxDim; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
  }
  Site operator-() const {
    Site r;
    for (int i = 0; i < kMaxDim; ++i) r.c[i] = -c[i];
    return r;
  }

  bool is_origin() const {
    for (int i = 0; i < kMaxDim; ++i)
      if (c[i] != 0) return false;
    return true;
  }

  int64_t norm_inf() const {
    int64_t m = 0;
    for (int i = 0; i < kMaxDim; ++i) m = std::max(m, std::abs(c[i]));
    return m;
  }
  double norm2() const {
    double s = 0;
    for (int i = 0; i < kMaxDim; ++i) s += double(c[i]) * double(c[i]);
    return std::sqrt(s);
  }
  int64_t norm2_sq() const {
    int64_t s = 0;
    for (int i = 0; i < kMaxDim; ++i) s += c[i] * c[i];
    return s;
  }

  static Site origin() { return Site{}; }
  static Site unit(int axis, int64_t v = 1) {
    Site r;
    r.c[axis] = v;
    return r;
  }

  // "x;y;z" rendering used by the CLI and CSV headers.
  std::string label(int dim) const {
    std::string s;
    for (int i = 0; i < dim; ++i) {
      if (i) s += ';';
      s += std::to_string(c[i]);
    }
    return s;
  }
};

struct SiteHash {
  std::size_t operator()(const Site& s) const {
    uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < kMaxDim; ++i) {
      h ^= static_cast<uint64_t>(s.c[i]);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace brwlab
