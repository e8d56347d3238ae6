#include "freemult/limitlaw.hpp"

#include "freemult/errors.hpp"
#include "freemult/freecalc_core.hpp"
#include "freemult/io.hpp"
#include "freemult/parallel.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace freemult {

LimitParams LimitParams::from_constants(double c1, double c2) {
  if (!std::isfinite(c1) || !std::isfinite(c2)) throw InvalidArgument("LimitParams: non-finite constants");
  LimitParams p;
  p.c1 = c1;
  p.c2 = c2;
  p.sigma_ho = std::abs(c1) / 2.0;
  p.log_scale = (c2 - c1 * c1) / 2.0;
  return p;
}

LimitParams LimitParams::from_model(ModelSpec const& spec) {
  double const s = spec.sigma();
  return from_constants(spec.g.d1() * s, spec.g.d2() * s * s);
}

LimitParams LimitParams::exp_normalized(double sigma) {
  if (!(sigma >= 0)) throw InvalidArgument("exp_normalized: sigma must be non-negative");
  LimitParams p = from_constants(2.0 * sigma, 4.0 * sigma * sigma);
  p.log_scale = 0.0;
  return p;
}

bool LimitParams::is_exp_normalized(double tol) const {
  return std::abs(log_scale) <= tol * std::max(1.0, c2);
}

double limit_cumulant(LimitParams const& p, int k) {
  if (k < 1) throw InvalidArgument("limit_cumulant: k must be positive");
  double const lead = std::pow(static_cast<double>(k), k - 1) / std::tgamma(k + 1.0);
  return lead * std::pow(p.c1, 2 * (k - 1)) * std::exp(k * p.c2 / 2.0);
}

CumulantSeq limit_cumulants(LimitParams const& p, int K) {
  std::vector<double> k(static_cast<std::size_t>(K));
  for (int i = 1; i <= K; ++i) k[i - 1] = limit_cumulant(p, i);
  return CumulantSeq(std::move(k));
}

MomentSeq limit_moments(LimitParams const& p, int K) { return cumulants_to_moments(limit_cumulants(p, K)); }

double s_transform_consistency(LimitParams const& p, int K) {
  if (!p.is_exp_normalized()) throw InvalidArgument("s_transform_consistency: parameters are not exp-normalized");
  if (K < 1) throw InvalidArgument("s_transform_consistency: K must be positive");
  using Wide = boost::multiprecision::cpp_bin_float_50;
  Wide const c1sq = Wide(p.c1) * Wide(p.c1);
  Wide const e = boost::multiprecision::exp(Wide(p.c2) / 2);
  std::vector<Wide> kappa(static_cast<std::size_t>(K));
  Wide fact = 1;
  Wide scale = 1;
  for (int k = 1; k <= K; ++k) {
    fact *= k;
    scale *= e;
    kappa[k - 1] = boost::multiprecision::pow(Wide(k), k - 1) / fact * boost::multiprecision::pow(c1sq, k - 1) * scale;
  }
  auto const S = core::s_series(core::cumulants_to_moments(kappa));
  Wide const s2 = Wide(p.sigma_ho) * Wide(p.sigma_ho);
  Wide worst = 0;
  Wide term = boost::multiprecision::exp(-2 * s2);
  for (int j = 0; j <= K - 1; ++j) {
    if (j > 0) term *= -4 * s2 / j;
    Wide const diff = boost::multiprecision::abs(S[j] - term);
    Wide const rel = term != 0 ? Wide(diff / boost::multiprecision::abs(term)) : diff;
    if (rel > worst) worst = rel;
  }
  return static_cast<double>(worst);
}

DensityTable::DensityTable(std::vector<double> grid, std::vector<double> pdf)
    : grid_(std::move(grid)), pdf_(std::move(pdf)) {
  if (grid_.size() < 2 || grid_.size() != pdf_.size()) throw InvalidArgument("DensityTable: bad sizes");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1])) throw InvalidArgument("DensityTable: grid not strictly increasing");
  for (double v : pdf_)
    if (!(v >= 0) || !std::isfinite(v)) throw InvalidArgument("DensityTable: negative or non-finite pdf");
  cdf_.assign(grid_.size(), 0.0);
  for (std::size_t i = 1; i < grid_.size(); ++i)
    cdf_[i] = cdf_[i - 1] + 0.5 * (pdf_[i] + pdf_[i - 1]) * (grid_[i] - grid_[i - 1]);
  mass_ = cdf_.back();
  if (!(mass_ > 0)) throw InvalidArgument("DensityTable: zero mass");
  for (auto& c : cdf_) c /= mass_;
  cdf_.back() = 1.0;
}

double DensityTable::max_pdf() const { return *std::max_element(pdf_.begin(), pdf_.end()); }

double DensityTable::cdf(double t) const {
  if (t <= grid_.front()) return 0.0;
  if (t >= grid_.back()) return 1.0;
  auto const it = std::upper_bound(grid_.begin(), grid_.end(), t);
  std::size_t const i = static_cast<std::size_t>(it - grid_.begin());
  double const f = (t - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return cdf_[i - 1] + f * (cdf_[i] - cdf_[i - 1]);
}

double DensityTable::quantile(double u) const {
  if (!(u >= 0 && u <= 1)) throw InvalidArgument("quantile: probability outside [0,1]");
  if (u <= 0) return grid_.front();
  auto const it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t const i = static_cast<std::size_t>(it - cdf_.begin());
  if (i == 0) return grid_.front();
  if (i >= cdf_.size()) return grid_.back();
  double const f = (u - cdf_[i - 1]) / (cdf_[i] - cdf_[i - 1]);
  return grid_[i - 1] + f * (grid_[i] - grid_[i - 1]);
}

double DensityTable::expect(double (*f)(double, double), double param) const {
  double acc = 0;
  for (std::size_t i = 1; i < grid_.size(); ++i)
    acc += 0.5 * (f(grid_[i], param) * pdf_[i] + f(grid_[i - 1], param) * pdf_[i - 1]) * (grid_[i] - grid_[i - 1]);
  return acc;
}

double DensityTable::moment(int j) const {
  return expect([](double t, double p) { return std::pow(t, p); }, static_cast<double>(j));
}

void DensityTable::write_csv(std::ostream& os, std::string const& subcommand) const {
  CsvWriter w(os, subcommand, {"t", "pdf", "cdf"});
  for (std::size_t i = 0; i < grid_.size(); ++i) w.row(std::vector<double>{grid_[i], pdf_[i], cdf_[i]});
}

DensityTable log_law_density(double sigma, DensityOptions const& opt) {
  if (!(sigma > 0)) throw InvalidArgument("log_law_density: sigma must be positive");
  if (opt.grid_points < 3 || opt.etas.size() < 2) throw InvalidArgument("log_law_density: bad options");
  double const t = 4.0 * sigma * sigma;
  double const L = 2.0 * sigma * sigma;
  double const a = 4.0 * sigma + 2.0 * sigma * sigma + opt.pad;
  std::size_t const npts = static_cast<std::size_t>(opt.grid_points);
  std::vector<double> grid(npts);
  for (std::size_t i = 0; i < npts; ++i) grid[i] = -a + 2.0 * a * static_cast<double>(i) / static_cast<double>(npts - 1);

  auto G_U = [L](std::complex<double> w) { return std::log((w + L) / (w - L)) / (2.0 * L); };
  std::size_t const ne = opt.etas.size();
  double emean = 0;
  for (double e : opt.etas) emean += e;
  emean /= static_cast<double>(ne);
  double sxx = 0;
  for (double e : opt.etas) sxx += (e - emean) * (e - emean);

  std::vector<double> pdf(npts);
  parallel_for(npts, opt.workers, [&](std::size_t i) {
    std::complex<double> w(grid[i], opt.etas.front());
    std::vector<double> dens(ne);
    for (std::size_t e = 0; e < ne; ++e) {
      std::complex<double> const z(grid[i], opt.etas[e]);
      if (e == 0) w = z;
      bool converged = false;
      for (int it = 0; it < opt.max_iter; ++it) {
        std::complex<double> const wn = z - t * G_U(w);
        if (std::abs(wn - w) <= opt.tol) {
          w = wn;
          converged = true;
          break;
        }
        w = 0.5 * (w + wn);
      }
      if (!converged) {
        std::ostringstream os;
        os << "log_law_density: subordination did not converge at t = " << grid[i] << ", eta = " << opt.etas[e];
        throw SolverError(os.str());
      }
      dens[e] = -G_U(w).imag() / M_PI;
    }
    double dmean = 0;
    for (double d : dens) dmean += d;
    dmean /= static_cast<double>(ne);
    double sxy = 0;
    for (std::size_t e = 0; e < ne; ++e) sxy += (opt.etas[e] - emean) * (dens[e] - dmean);
    double const slope = sxy / sxx;
    pdf[i] = std::max(0.0, dmean - slope * emean);
  });
  return DensityTable(std::move(grid), std::move(pdf));
}

DensityTable psc_singular_table(LimitParams const& p, DensityOptions const& opt) {
  if (!(p.sigma_ho > 0)) throw InvalidArgument("psc_singular_table: degenerate limit law");
  auto const law = log_law_density(p.sigma_ho, opt);
  std::vector<double> s(law.grid().size()), pdf(law.grid().size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = std::exp((law.grid()[i] + p.log_scale) / 2.0);
    pdf[i] = law.pdf()[i] * 2.0 / s[i];
  }
  return DensityTable(std::move(s), std::move(pdf));
}

std::vector<double> psc_singular_quantiles(LimitParams const& p, DensityTable const& log_law,
                                           std::vector<double> const& probs) {
  std::vector<double> q;
  q.reserve(probs.size());
  for (double u : probs) {
    if (!(u > 0 && u < 1)) throw InvalidArgument("psc_singular_quantiles: probabilities must lie in (0,1)");
    double const tq = p.sigma_ho > 0 ? log_law.quantile(u) : 0.0;
    q.push_back(std::exp((tq + p.log_scale) / 2.0));
  }
  return q;
}

std::vector<double> psc_singular_quantiles(LimitParams const& p, std::vector<double> const& probs,
                                           DensityOptions const& opt) {
  if (!(p.sigma_ho > 0)) {
    for (double u : probs)
      if (!(u > 0 && u < 1)) throw InvalidArgument("psc_singular_quantiles: probabilities must lie in (0,1)");
    return std::vector<double>(probs.size(), std::exp(p.log_scale / 2.0));
  }
  return psc_singular_quantiles(p, log_law_density(p.sigma_ho, opt), probs);
}

} // namespace freemult
