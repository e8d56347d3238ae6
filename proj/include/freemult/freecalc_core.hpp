#pragma once

// Scalar-generic kernels behind freecalc; instantiated with double in the
// library and with exact rationals in tests.

#include "freemult/series.hpp"

#include <vector>

namespace freemult::core {

// Sequences below are 0-based vectors holding orders 1..K (v[0] is order 1).

/// Triangular solve of M(z) = C(z M(z)) for the moments.
template <class T>
std::vector<T> cumulants_to_moments(std::vector<T> const& kappa) {
  int const K = static_cast<int>(kappa.size());
  std::vector<T> m(static_cast<std::size_t>(K + 1), T(0));
  m[0] = T(1);
  // pw[s][j] = [z^j] M(z)^s
  std::vector<std::vector<T>> pw(static_cast<std::size_t>(K + 1), std::vector<T>(static_cast<std::size_t>(K + 1), T(0)));
  pw[0][0] = T(1);
  for (int n = 1; n <= K; ++n) {
    for (int s = 1; s < n; ++s) {
      int const j = n - s;
      T acc(0);
      for (int i = 0; i <= j; ++i) acc += m[i] * pw[s - 1][j - i];
      pw[s][j] = acc;
    }
    pw[n][0] = T(1);
    T acc = kappa[n - 1];
    for (int s = 1; s < n; ++s) acc += kappa[s - 1] * pw[s][n - s];
    m[n] = acc;
  }
  return std::vector<T>(m.begin() + 1, m.end());
}

template <class T>
std::vector<T> moments_to_cumulants(std::vector<T> const& mom) {
  int const K = static_cast<int>(mom.size());
  std::vector<T> m(static_cast<std::size_t>(K + 1), T(0));
  m[0] = T(1);
  for (int i = 1; i <= K; ++i) m[i] = mom[i - 1];
  std::vector<T> kappa(static_cast<std::size_t>(K), T(0));
  std::vector<std::vector<T>> pw(static_cast<std::size_t>(K + 1), std::vector<T>(static_cast<std::size_t>(K + 1), T(0)));
  pw[0][0] = T(1);
  for (int n = 1; n <= K; ++n) {
    for (int s = 1; s < n; ++s) {
      int const j = n - s;
      T acc(0);
      for (int i = 0; i <= j; ++i) acc += m[i] * pw[s - 1][j - i];
      pw[s][j] = acc;
    }
    pw[n][0] = T(1);
    T acc = m[n];
    for (int s = 1; s < n; ++s) acc -= kappa[s - 1] * pw[s][n - s];
    kappa[n - 1] = acc;
  }
  return kappa;
}

/// S(z) = chi(z)(1+z)/z with chi the inverse of psi(z) = sum m_k z^k; order K-1.
template <class T>
BasicPowerSeries<T> s_series(std::vector<T> const& mom) {
  int const K = static_cast<int>(mom.size());
  if (K < 1) throw InvalidArgument("s_series: empty moment sequence");
  if (mom[0] == T(0)) throw SingularTransformError("s_series: first moment vanishes");
  BasicPowerSeries<T> psi(K);
  for (int k = 1; k <= K; ++k) psi[k] = mom[k - 1];
  auto const chi = psi.reversion();
  BasicPowerSeries<T> s(K - 1);
  for (int j = 0; j <= K - 1; ++j) s[j] = chi[j + 1] + (j >= 1 ? chi[j] : T(0));
  return s;
}

/// Moments m_1..m_K from an S-series of order >= K-1.
template <class T>
std::vector<T> s_series_inverse(BasicPowerSeries<T> const& s, int K) {
  if (K < 1) throw InvalidArgument("s_series_inverse: K must be positive");
  if (s.order() < K - 1) throw DimensionError("s_series_inverse: S-series order below K-1");
  if (s[0] == T(0)) throw SingularTransformError("s_series_inverse: S(0) vanishes");
  BasicPowerSeries<T> chi(K);
  for (int j = 1; j <= K; ++j) {
    T acc(0);
    for (int i = 0; i <= j - 1; ++i) acc += ((j - 1 - i) % 2 == 0 ? s[i] : -s[i]);
    chi[j] = acc;
  }
  auto const psi = chi.reversion();
  std::vector<T> m(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) m[k - 1] = psi[k];
  return m;
}

/// Moments of the n-fold multiplicative free power.
template <class T>
std::vector<T> mult_power(std::vector<T> const& mom, unsigned long long n) {
  if (n == 0) return std::vector<T>(mom.size(), T(1));
  if (n == 1) return mom;
  return core::s_series_inverse(core::s_series(mom).pow(n), static_cast<int>(mom.size()));
}

} // namespace freemult::core
