#pragma once

// Test functions of the Zolotarev classes: f^{(l)} is beta-Hoelder with
// seminorm <= 1 and f^{(i)}(0) = 0 for i <= l.

#include <cstdint>
#include <vector>

namespace freemult {

class TestFunction {
public:
  /// h(t) = slope t + sum_i a_i (|t - c_i|^beta - |c_i|^beta), then f is the
  /// l-fold antiderivative of h vanishing to order l at 0. Rescaled so that the
  /// Hoelder seminorm of h is at most 1 (for beta < 1, slope must be 0).
  static TestFunction kinks(int ell, double beta, std::vector<double> centers, std::vector<double> amps,
                            double slope = 0.0);
  /// Piecewise-linear h through 0 with the given interval slopes (|s| <= 1)
  /// between increasing knots; slopes.size() == knots.size() + 1.
  static TestFunction piecewise_linear(int ell, std::vector<double> knots, std::vector<double> slopes);
  /// Slopes alternating +1, -1 with knots every `delta` on [-extent, extent].
  static TestFunction zigzag(int ell, double delta, double extent);
  /// f(x) = x^{l+1}/(l+1)!, i.e. h(t) = t.
  static TestFunction monomial(int ell);
  static TestFunction zero(int ell, double beta);
  /// Random kink sum with centers uniform on [-spread, spread].
  static TestFunction random(int ell, double beta, int kinks, double spread, std::uint64_t seed);

  int ell() const { return ell_; }
  double beta() const { return beta_; }
  double r() const { return ell_ + beta_; }

  double operator()(double x) const { return derivative(0, x); }
  /// f^{(j)}(x) for 0 <= j <= l (j = l gives h).
  double derivative(int j, double x) const;
  /// Points where h fails to be smooth.
  std::vector<double> const& breakpoints() const { return centers_; }
  bool is_zero() const { return amps_.empty() && slope_ == 0.0; }

  /// Largest |h(x) - h(y)| / |x - y|^beta over pairs of grid points.
  double holder_quotient(std::vector<double> const& grid) const;

private:
  TestFunction() = default;
  void normalise();

  int ell_ = 0;
  double beta_ = 1.0;
  double slope_ = 0.0;
  std::vector<double> centers_, amps_;
};

} // namespace freemult
