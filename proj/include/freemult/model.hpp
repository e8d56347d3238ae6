#pragma once

// Input model: a centered law for x, a function g with g(0) = 1, and the exact
// moments and free cumulants of |g|^2(x / sqrt(n)) and of the n-fold product.

#include "freemult/freecalc.hpp"

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace freemult {

/// Centered law of x.
class XLaw {
public:
  enum class Kind { rademacher, two_point, semicircle, uniform, atomic };

  static XLaw rademacher(double sigma);
  /// Weight p at a, 1-p at b; must be centered.
  static XLaw two_point(double p, double a, double b);
  static XLaw semicircle(double variance);
  /// Uniform on (-c, c).
  static XLaw uniform(double c);
  static XLaw atomic(std::vector<std::pair<double, double>> atoms_and_weights);

  Kind kind() const { return kind_; }
  std::string name() const;
  bool is_atomic() const { return !atoms_.empty(); }
  /// (atom, weight) pairs; empty for semicircle and uniform.
  std::vector<std::pair<double, double>> const& atoms() const { return atoms_; }
  double variance() const { return variance_; }
  double sigma() const;
  /// E[x^j].
  double moment(int j) const;

private:
  XLaw() = default;
  void finish_atomic();

  Kind kind_ = Kind::atomic;
  std::vector<std::pair<double, double>> atoms_;
  double param_ = 0.0;
  double variance_ = 0.0;
};

/// g with g(0) = 1: complex polynomial or exp.
class GFunc {
public:
  enum class Kind { polynomial, exp };

  /// Coefficients c_0..c_d with c_0 = 1.
  static GFunc polynomial(std::vector<std::complex<double>> coeffs);
  static GFunc polynomial_real(std::vector<double> coeffs);
  static GFunc exp();
  static GFunc constant_one() { return polynomial_real({1.0}); }

  Kind kind() const { return kind_; }
  std::string name() const;
  std::vector<std::complex<double>> const& coeffs() const { return c_; }
  /// Real coefficients of |g|^2 on the real line (polynomial kind).
  std::vector<double> const& gsq() const { return gsq_; }
  /// |g^2|'(0) = 2 Re g'(0).
  double d1() const;
  /// |g^2|''(0) = 2|g'(0)|^2 + 2 Re g''(0).
  double d2() const;
  double re_g2() const;   ///< Re g''(0)
  double abs_g1_sq() const; ///< |g'(0)|^2
  std::complex<double> operator()(std::complex<double> x) const;
  double gsq_at(double x) const; ///< |g(x)|^2
  bool is_constant_one() const;

private:
  GFunc() = default;
  Kind kind_ = Kind::polynomial;
  std::vector<std::complex<double>> c_;
  std::vector<double> gsq_;
};

struct ModelSpec {
  XLaw xlaw;
  GFunc g;
  double gamma = 1.0; ///< Hoelder exponent, metadata for rate lookup
  double sigma() const { return xlaw.sigma(); }
};

/// phi(|g|^2(x/sqrt n)^j), j = 1..K.
MomentSeq gsq_moments(ModelSpec const& spec, int n, int K);

/// phi(g(x/sqrt n)).
std::complex<double> g_mean(ModelSpec const& spec, int n);

/// Free cumulants kappa_1..kappa_K of Y_n (the n-fold multiplicative free
/// power of the law of |g|^2(x/sqrt n)) via S-series.
CumulantSeq yn_cumulants(ModelSpec const& spec, int n, int K);
double yn_cumulant(ModelSpec const& spec, int n, int k);

struct B2Row {
  int n = 0;
  double kappa1 = 0, pred1 = 0, resid1 = 0;
  double kappa2 = 0, pred2 = 0, resid2 = 0;
  std::vector<double> higher; ///< |kappa_k| for k = 3..k_max
  bool assumption3 = true;    ///< Re phi(g(x/sqrt n)) >= 1
};

struct B2Report {
  std::vector<B2Row> rows;
  double exponent1 = 0, exponent2 = 0;  ///< fitted decay exponents (inf when identically zero)
  double predicted1 = 0, predicted2 = 1.5;
  double constant1 = 0, constant2 = 0;  ///< O-constants fitted on the leading points
  std::map<int, double> higher_exponents; ///< k -> fitted exponent
  bool k1_ok = false, k2_ok = false, higher_ok = false;
  bool k1_exact_zero = false, k2_exact_zero = false;
  bool passed() const { return k1_ok && k2_ok && higher_ok; }
};

/// Checks the first- and second-cumulant expansions of |g|^2(x/sqrt n) and the
/// n^{-k/2} decay of higher cumulants (k = 3..k_max). Polynomial g only.
B2Report lemma_b2_expansion_check(ModelSpec const& spec, std::vector<int> const& n_grid, int k_max = 4);

/// Least-squares slope of -log|r| against log n, skipping zero entries.
double fitted_decay_exponent(std::vector<int> const& ns, std::vector<double> const& resid);

} // namespace freemult
