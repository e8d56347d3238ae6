#pragma once

// Free moment/cumulant calculus on truncated sequences.

#include "freemult/series.hpp"

#include <vector>

namespace freemult {

inline constexpr int kDefaultOrder = 8;
inline constexpr int kMaxOrder = 16;

/// Moments m_1..m_K (m_0 = 1 implied).
class MomentSeq {
public:
  MomentSeq() = default;
  explicit MomentSeq(std::vector<double> m);
  /// Same, additionally asserting m_2 >= m_1^2 as any probability law must.
  static MomentSeq of_law(std::vector<double> m);
  /// Moments c, c^2, ..., c^K of a point mass.
  static MomentSeq point_mass(double c, int K);

  int order() const { return static_cast<int>(m_.size()); }
  double operator()(int k) const; ///< m_k, 0 <= k <= K
  std::vector<double> const& values() const& { return m_; }
  std::vector<double> values() && { return std::move(m_); }

private:
  std::vector<double> m_;
};

/// Free cumulants kappa_1..kappa_K.
class CumulantSeq {
public:
  CumulantSeq() = default;
  explicit CumulantSeq(std::vector<double> kappa);

  int order() const { return static_cast<int>(k_.size()); }
  double operator()(int k) const; ///< kappa_k, 1 <= k <= K
  std::vector<double> const& values() const& { return k_; }
  std::vector<double> values() && { return std::move(k_); }

private:
  std::vector<double> k_;
};

CumulantSeq moments_to_cumulants(MomentSeq const& m);
MomentSeq cumulants_to_moments(CumulantSeq const& k);

MomentSeq free_add_convolve(MomentSeq const& a, MomentSeq const& b);
MomentSeq free_mult_convolve(MomentSeq const& a, MomentSeq const& b);
/// n-fold multiplicative free power; n = 0 gives the point mass at 1.
MomentSeq free_mult_power(MomentSeq const& a, unsigned long long n);

PowerSeries s_series(MomentSeq const& m);
MomentSeq s_series_inverse(PowerSeries const& s, int K);

/// k-th free cumulant of a product of n free copies of a law with cumulants
/// `kappa_single`, by summation over Kreweras complements of the product
/// partitions. Throws SizeLimitError beyond the enumeration cap.
double product_cumulant(int k, CumulantSeq const& kappa_single, int n);

} // namespace freemult
