#pragma once

// Truncated formal power series c_0 + c_1 z + ... + c_K z^K.

#include "freemult/errors.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace freemult {

template <class T>
class BasicPowerSeries {
public:
  BasicPowerSeries() : c_(1, T(0)) {}
  explicit BasicPowerSeries(int order) : c_(checked(order) + 1, T(0)) {}
  BasicPowerSeries(int order, std::vector<T> coeffs) : c_(std::move(coeffs)) {
    c_.resize(checked(order) + 1, T(0));
  }

  static BasicPowerSeries constant(int order, T value) {
    BasicPowerSeries s(order);
    s.c_[0] = value;
    return s;
  }
  /// The series z.
  static BasicPowerSeries identity(int order) {
    BasicPowerSeries s(order);
    if (order >= 1) s.c_[1] = T(1);
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  T const& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  T& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  std::vector<T> const& coeffs() const { return c_; }

  BasicPowerSeries truncated(int order) const {
    return BasicPowerSeries(order, std::vector<T>(c_.begin(), c_.begin() + std::min<std::ptrdiff_t>(order + 1, c_.size())));
  }

  friend BasicPowerSeries operator+(BasicPowerSeries a, BasicPowerSeries const& b) {
    same_order(a, b);
    for (int i = 0; i <= a.order(); ++i) a[i] += b[i];
    return a;
  }
  friend BasicPowerSeries operator-(BasicPowerSeries a, BasicPowerSeries const& b) {
    same_order(a, b);
    for (int i = 0; i <= a.order(); ++i) a[i] -= b[i];
    return a;
  }
  friend BasicPowerSeries operator*(BasicPowerSeries a, T const& s) {
    for (auto& x : a.c_) x *= s;
    return a;
  }
  friend BasicPowerSeries operator*(BasicPowerSeries const& a, BasicPowerSeries const& b) {
    same_order(a, b);
    int const K = a.order();
    BasicPowerSeries r(K);
    for (int i = 0; i <= K; ++i) {
      if (a[i] == T(0)) continue;
      for (int j = 0; i + j <= K; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
  }

  BasicPowerSeries derivative() const {
    int const K = order();
    BasicPowerSeries r(K);
    for (int i = 1; i <= K; ++i) r[i - 1] = c_[i] * T(i);
    return r;
  }

  /// 1/s; requires s_0 != 0.
  BasicPowerSeries reciprocal() const {
    if (c_[0] == T(0)) throw SingularTransformError("reciprocal: constant term is zero");
    int const K = order();
    BasicPowerSeries r(K);
    r[0] = T(1) / c_[0];
    for (int n = 1; n <= K; ++n) {
      T acc(0);
      for (int i = 1; i <= n; ++i) acc += c_[i] * r[n - i];
      r[n] = -acc / c_[0];
    }
    return r;
  }

  /// this(inner(z)); requires inner_0 = 0. Horner evaluation.
  BasicPowerSeries compose(BasicPowerSeries const& inner) const {
    same_order(*this, inner);
    if (inner[0] != T(0)) throw InvalidArgument("compose: inner series has nonzero constant term");
    int const K = order();
    BasicPowerSeries r = constant(K, c_[K]);
    for (int i = K - 1; i >= 0; --i) {
      r = r * inner;
      r[0] += c_[i];
    }
    return r;
  }

  /// Non-negative integer power by repeated squaring.
  BasicPowerSeries pow(unsigned long long e) const {
    BasicPowerSeries base = *this;
    BasicPowerSeries r = constant(order(), T(1));
    while (e > 0) {
      if (e & 1ULL) r = r * base;
      e >>= 1ULL;
      if (e > 0) base = base * base;
    }
    return r;
  }

  /// Compositional inverse g with f(g(z)) = z; requires f_0 = 0, f_1 != 0.
  /// Newton iteration g <- g - (f(g) - z) / f'(g).
  BasicPowerSeries reversion() const {
    if (c_[0] != T(0)) throw InvalidArgument("reversion: constant term must vanish");
    if (order() >= 1 && c_[1] == T(0)) throw SingularTransformError("reversion: linear coefficient is zero");
    int const K = order();
    BasicPowerSeries g(K);
    if (K == 0) return g;
    g[1] = T(1) / c_[1];
    BasicPowerSeries const df = derivative();
    BasicPowerSeries const z = identity(K);
    for (int exact = 2; exact <= K; exact *= 2) {
      BasicPowerSeries const resid = compose(g) - z;
      g = g - resid * df.compose(g).reciprocal();
    }
    return g;
  }

private:
  static std::size_t checked(int order) {
    if (order < 0) throw InvalidArgument("power series order must be non-negative");
    return static_cast<std::size_t>(order);
  }
  static void same_order(BasicPowerSeries const& a, BasicPowerSeries const& b) {
    if (a.order() != b.order())
      throw DimensionError("power series orders differ: " + std::to_string(a.order()) + " vs " +
                           std::to_string(b.order()));
  }

  std::vector<T> c_;
};

using PowerSeries = BasicPowerSeries<double>;

} // namespace freemult
