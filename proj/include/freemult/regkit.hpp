#pragma once

// Truncation f_zeta = f theta_zeta, Gaussian-Hermite smoothing kernels and the
// Fourier moments I_k of f_zeta * rho_eps.

#include "freemult/testfunction.hpp"

#include <ostream>
#include <vector>

namespace freemult {

enum class MollifierProfile {
  lipschitz_tail, ///< smooth on |s| < 1, kink at |s| = 1, 1 - theta(s) <= |s|
  smooth          ///< C-infinity step from 1 on [-1/2, 1/2] to 0 at |s| = 1
};

class Mollifier {
public:
  Mollifier(double zeta, MollifierProfile profile);
  /// lipschitz_tail for l = 0, smooth otherwise.
  static Mollifier for_class(double zeta, int ell);

  static double theta(double s, MollifierProfile profile);

  double zeta() const { return zeta_; }
  MollifierProfile profile() const { return profile_; }
  double support() const { return 1.0 / zeta_; }
  double operator()(double x) const { return theta(zeta_ * x, profile_); }

private:
  double zeta_;
  MollifierProfile profile_;
};

/// f_zeta.
class Truncated {
public:
  Truncated(TestFunction f, Mollifier m);

  TestFunction const& base() const { return f_; }
  Mollifier const& mollifier() const { return m_; }
  double support() const { return m_.support(); }
  double operator()(double x) const;
  /// Non-smooth points inside [-support, support], including the endpoints.
  std::vector<double> breakpoints() const;

private:
  TestFunction f_;
  Mollifier m_;
};

Truncated truncate(TestFunction const& f, double zeta);

/// max over nonzero grid points of |f - f_zeta| / (zeta |x|^{r+1}).
double truncation_error_scan(TestFunction const& f, double zeta, std::vector<double> const& grid);

/// rho(t) = P(t) phi(t) with P even, int rho = 1 and int t^j rho = 0 for 1 <= j <= l.
class SmoothingKernel {
public:
  static constexpr int kMaxVanishing = 8;

  SmoothingKernel(double eps, int vanishing_moments);

  double eps() const { return eps_; }
  int vanishing_moments() const { return ell_; }
  /// Coefficients of t^{2j} in P.
  std::vector<double> const& coefficients() const { return p_; }

  double profile(double t) const;
  double operator()(double x) const { return profile(x / eps_) / eps_; }
  /// Fourier transform of rho at u, with the convention int rho(t) e^{-iut} dt.
  double profile_fourier(double u) const;
  double fourier(double y) const { return profile_fourier(eps_ * y); }

  /// int t^j rho(t) dt by quadrature.
  double moment(int j) const;
  /// int |t| |rho(t)| dt.
  double abs_moment() const;
  /// |t| beyond which rho is negligible.
  double cutoff() const { return cutoff_; }
  /// |u| beyond which |u|^k |rho^(u)| < 1e-14 max|rho^|.
  double fourier_cutoff(int k) const;

private:
  double eps_;
  int ell_;
  std::vector<double> p_;
  double cutoff_ = 12.0;
};

/// (f_zeta * rho_eps)(x).
double smooth(Truncated const& fz, SmoothingKernel const& kernel, double x);

/// For r = 1: max |f_zeta - f_zeta * rho_eps| / (eps (1 + zeta |x|) int |y| rho).
/// For r > 1: max |f_zeta - f_zeta * rho_eps| / (1 + |x|^r).
double smoothing_error_scan(TestFunction const& f, double zeta, SmoothingKernel const& kernel,
                            std::vector<double> const& grid);

struct SmoothingScaling {
  double ratio_eps = 0, ratio_half = 0;
  double fitted = 0, predicted = 0; ///< base-2 log of ratio_eps / ratio_half, and r + 1 - beta
  /// |ratio_eps / ratio_half / 2^predicted - 1| <= tol.
  bool within(double tol) const;
};

/// Smoothing error at eps and eps / 2 with a kernel of l vanishing moments.
SmoothingScaling smoothing_scaling(TestFunction const& f, double zeta, double eps, std::vector<double> const& grid);

/// I_k = int |y|^k |F rho_eps(y) F f_zeta(y)| dy with F f_zeta from a discrete transform.
double fourier_moment_Ik(Truncated const& fz, SmoothingKernel const& kernel, int k);
/// Kernel with l vanishing moments, mollifier for the class of f.
double fourier_moment_Ik(TestFunction const& f, double zeta, double eps, int k);

/// Growth exponents: I_k ~ eps^{-a} zeta^{-b}.
struct IkPrediction {
  double eps_exp = 0, zeta_exp = 0;
  bool log_case = false; ///< k = r - 1: |ln eps| growth
  bool zeta_asserted = true;
};

/// Bounds for Lambda_1 (r = 1) and Lambda_r (r > 1).
IkPrediction ik_prediction(double r, int k);

struct IkRow {
  int k = 0;
  IkPrediction predicted;
  double fitted_eps = 0, fitted_zeta = 0;
  std::vector<double> values_eps, values_zeta;
  bool eps_ok = false, zeta_ok = false;
};

struct IkReport {
  double r = 1, beta = 1;
  std::vector<double> eps_grid, zeta_grid;
  double zeta_fixed = 0, eps_fixed = 0;
  std::vector<IkRow> rows;
  bool passed() const;
  void write_csv(std::ostream& os, std::string const& subcommand) const;
};

/// Fits eps-exponents at the middle zeta and zeta-exponents at the middle eps.
/// Both grids must be geometric with at least 4 points in (0, 1).
IkReport ik_scaling_report(TestFunction const& f, std::vector<int> const& ks, std::vector<double> const& eps_grid,
                           std::vector<double> const& zeta_grid);

/// Least-squares slope of -log(values) against log(xs).
double growth_exponent(std::vector<double> const& xs, std::vector<double> const& values);

} // namespace freemult
