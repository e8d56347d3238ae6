#pragma once

// The free multiplicative semicircular limit law.

#include "freemult/freecalc.hpp"
#include "freemult/model.hpp"

#include <ostream>
#include <vector>

namespace freemult {

/// Limit of the free cumulants kappa_k = k^{k-1}/k! c1^{2(k-1)} e^{k c2 / 2}.
///
/// The law is a dilation by lambda = e^{(c2 - c1^2)/2} of the standard law with
/// parameter sigma_ho = |c1|/2; log_scale holds log(lambda).
struct LimitParams {
  double c1 = 0;
  double c2 = 0;
  double sigma_ho = 0;
  double log_scale = 0;

  static LimitParams from_constants(double c1, double c2);
  /// c1 = |g^2|'(0) sigma, c2 = |g^2|''(0) sigma^2.
  static LimitParams from_model(ModelSpec const& spec);
  /// Parameters for g = exp: c1 = 2 sigma, c2 = 4 sigma^2.
  static LimitParams exp_normalized(double sigma);
  bool is_exp_normalized(double tol = 1e-12) const;
};

double limit_cumulant(LimitParams const& p, int k);
CumulantSeq limit_cumulants(LimitParams const& p, int K);
MomentSeq limit_moments(LimitParams const& p, int K);

/// Max relative deviation between the S-series of the limit moments and the
/// Taylor coefficients of exp(-4 sigma^2 (z + 1/2)), orders 0..K-1.
double s_transform_consistency(LimitParams const& p, int K);

/// Tabulated density; the cdf is normalised to end at 1 and `mass` keeps
/// the raw trapezoid mass.
class DensityTable {
public:
  DensityTable() = default;
  DensityTable(std::vector<double> grid, std::vector<double> pdf);

  std::vector<double> const& grid() const { return grid_; }
  std::vector<double> const& pdf() const { return pdf_; }
  std::vector<double> const& cdf_values() const { return cdf_; }
  double mass() const { return mass_; }
  double max_pdf() const;
  double lower() const { return grid_.front(); }
  double upper() const { return grid_.back(); }

  double cdf(double t) const;
  /// Generalised inverse of the cdf, linear between grid points.
  double quantile(double u) const;
  /// Trapezoid integral of f(t) pdf(t).
  double expect(double (*f)(double, double), double param) const;
  double moment(int j) const;

  void write_csv(std::ostream& os, std::string const& subcommand) const;

private:
  std::vector<double> grid_, pdf_, cdf_;
  double mass_ = 0;
};

struct DensityOptions {
  int grid_points = 2049;
  double pad = 0.5;
  std::vector<double> etas{1e-2, 5e-3, 2.5e-3};
  double tol = 1e-12;
  int max_iter = 200000;
  int workers = 1;
};

/// Density of 2 sigma s + 2 sigma^2 w with s standard semicircular and w
/// uniform on (-1, 1), free, by semicircular subordination.
DensityTable log_law_density(double sigma, DensityOptions const& opt = {});

/// Law of the singular values, the pushforward of the log-law under
/// t -> exp((t + log_scale) / 2).
DensityTable psc_singular_table(LimitParams const& p, DensityOptions const& opt = {});
std::vector<double> psc_singular_quantiles(LimitParams const& p, std::vector<double> const& probs,
                                           DensityOptions const& opt = {});
/// Same, reusing a tabulated log-law of parameter p.sigma_ho.
std::vector<double> psc_singular_quantiles(LimitParams const& p, DensityTable const& log_law,
                                           std::vector<double> const& probs);

} // namespace freemult
