#pragma once

// One-dimensional distances between spectral samples and tabulated laws,
// the Kolmogorov-Wasserstein inequality, rate table lookup and rate fitting.

#include "freemult/limitlaw.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace freemult {

/// Sorted spectrum of one matrix realisation.
class SpectralSample {
public:
  SpectralSample() = default;
  explicit SpectralSample(std::vector<double> values, int n_source = 0, int N_source = 0);

  std::vector<double> const& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  int n_source() const { return n_; }
  int N_source() const { return N_; }

  double cdf(double t) const;      ///< right-continuous empirical cdf
  double cdf_left(double t) const; ///< left limit
  double quantile(double u) const; ///< x_{ceil(u size) - 1}
  SpectralSample scaled(double c) const;

private:
  std::vector<double> values_;
  int n_ = 0, N_ = 0;
};

double kolmogorov(SpectralSample const& a, SpectralSample const& b);
double kolmogorov(SpectralSample const& a, DensityTable const& b);
double kolmogorov(DensityTable const& a, SpectralSample const& b);
double kolmogorov(DensityTable const& a, DensityTable const& b);

/// W_r; exact for two samples, midpoint quantile quadrature otherwise.
double wasserstein_r(SpectralSample const& a, SpectralSample const& b, double r);
double wasserstein_r(SpectralSample const& a, DensityTable const& b, double r);
double wasserstein_r(DensityTable const& a, SpectralSample const& b, double r);
double wasserstein_r(DensityTable const& a, DensityTable const& b, double r);

struct KwResult {
  double K = 0, W1 = 0, C = 0, bound = 0;
  bool holds = false;
};

/// K <= sqrt(2 C W1) with C the density bound of the reference.
KwResult kw_bound_check(SpectralSample const& sample, DensityTable const& ref);

/// Best |E_a f - E_b f| over `trials` random test functions of order r; a
/// lower bound on the Zolotarev distance.
double zolotarev_lower_bound(SpectralSample const& a, SpectralSample const& b, double r, int trials, std::uint64_t seed);
double zolotarev_lower_bound(SpectralSample const& a, DensityTable const& b, double r, int trials, std::uint64_t seed);

enum class RateBranch { minus, plus };

struct RatePrediction {
  double beta1 = 0, beta2 = 0;
  RateBranch branch = RateBranch::minus;
  double gamma_crit = 0;
};

/// Entry of the given column of the rate table, without branch selection.
RatePrediction rate_cell(double r, double gamma, RateBranch branch);
/// Rate exponents n^{-beta1} ln(n)^{beta2}; gamma == gamma_crit takes the minus branch.
RatePrediction rate_lookup(double r, double gamma);

struct RateFit {
  double beta1 = 0, beta2 = 0, r2 = 0;
};

/// Least squares of log d on (-log n[, log log n]).
RateFit rate_fit(std::vector<double> const& ns, std::vector<double> const& ds, bool with_log);

} // namespace freemult
