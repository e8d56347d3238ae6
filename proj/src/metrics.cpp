#include "freemult/metrics.hpp"

#include "freemult/errors.hpp"
#include "freemult/quadrature.hpp"
#include "freemult/testfunction.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

namespace freemult {

namespace {

void require_nonempty(SpectralSample const& s) {
  if (s.size() == 0) throw InvalidArgument("empty spectral sample");
}

void require_r(double r) {
  if (!(r >= 1) || !std::isfinite(r)) throw InvalidArgument("Wasserstein order r must be >= 1");
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Midpoint quantile quadrature with one doubling.
double quantile_distance(std::function<double(double)> const& qa, std::function<double(double)> const& qb, double r) {
  auto run = [&](int panels) {
    double acc = 0;
    for (int k = 0; k < panels; ++k) {
      double const u = (k + 0.5) / panels;
      acc += std::pow(std::abs(qa(u) - qb(u)), r);
    }
    return acc / panels;
  };
  run(4096);
  return std::pow(run(8192), 1.0 / r);
}

// Exact integral of |c - (y0 + (y1 - y0) s)| over s in [0,1], times width.
double abs_linear_integral(double c, double y0, double y1, double width) {
  double const a = y0 - c, b = y1 - c;
  if ((a >= 0 && b >= 0) || (a <= 0 && b <= 0)) return 0.5 * (std::abs(a) + std::abs(b)) * width;
  return 0.5 * (a * a + b * b) / (std::abs(a) + std::abs(b)) * width;
}

// W1 = int |F_a - F_b| for a step cdf against the piecewise-linear table cdf.
double w1_sample_table(SpectralSample const& a, DensityTable const& b) {
  std::vector<double> pts = b.grid();
  pts.insert(pts.end(), a.values().begin(), a.values().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double const x0 = pts[i], x1 = pts[i + 1];
    total += abs_linear_integral(a.cdf(x0), b.cdf(x0), b.cdf(x1), x1 - x0);
  }
  return total;
}

// E f under the law whose cdf interpolates the table linearly.
double table_expectation(DensityTable const& t, std::function<double(double)> const& f) {
  auto const& g = gauss_legendre(7);
  auto const& x = t.grid();
  auto const& c = t.cdf_values();
  double acc = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    double const w = c[i] - c[i - 1];
    if (w == 0) continue;
    double const mid = 0.5 * (x[i] + x[i - 1]), half = 0.5 * (x[i] - x[i - 1]);
    double s = 0;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) s += g.weights[k] * f(mid + half * g.nodes[k]);
    acc += 0.5 * w * s;
  }
  return acc;
}

double sample_expectation(SpectralSample const& s, std::function<double(double)> const& f) {
  double acc = 0;
  for (double v : s.values()) acc += f(v);
  return acc / static_cast<double>(s.size());
}

double zolotarev_impl(std::function<double(std::function<double(double)> const&)> const& ea,
                      std::function<double(std::function<double(double)> const&)> const& eb, double spread, double r,
                      int trials, std::uint64_t seed) {
  require_r(r);
  if (trials < 1) throw InvalidArgument("zolotarev_lower_bound: trials must be positive");
  int const ell = static_cast<int>(std::ceil(r)) - 1;
  double const beta = r - ell;
  double best = 0;
  for (int t = 0; t < trials; ++t) {
    TestFunction f = (t == 0 && beta == 1.0)
                         ? TestFunction::monomial(ell)
                         : TestFunction::random(ell, beta, 1 + t % 4, spread, splitmix(seed + static_cast<std::uint64_t>(t)));
    auto const fn = [&f](double x) { return f(x); };
    best = std::max(best, std::abs(ea(fn) - eb(fn)));
  }
  return best;
}

} // namespace

SpectralSample::SpectralSample(std::vector<double> values, int n_source, int N_source)
    : values_(std::move(values)), n_(n_source), N_(N_source) {
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("SpectralSample: non-finite value");
  std::sort(values_.begin(), values_.end());
}

double SpectralSample::cdf(double t) const {
  auto const it = std::upper_bound(values_.begin(), values_.end(), t);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double SpectralSample::cdf_left(double t) const {
  auto const it = std::lower_bound(values_.begin(), values_.end(), t);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double SpectralSample::quantile(double u) const {
  require_nonempty(*this);
  if (!(u >= 0 && u <= 1)) throw InvalidArgument("quantile: probability outside [0,1]");
  double const n = static_cast<double>(values_.size());
  auto idx = static_cast<std::size_t>(std::max(0.0, std::ceil(u * n) - 1));
  return values_[std::min(idx, values_.size() - 1)];
}

SpectralSample SpectralSample::scaled(double c) const {
  std::vector<double> v(values_);
  for (auto& x : v) x *= c;
  return SpectralSample(std::move(v), n_, N_);
}

double kolmogorov(SpectralSample const& a, SpectralSample const& b) {
  require_nonempty(a);
  require_nonempty(b);
  auto const& x = a.values();
  auto const& y = b.values();
  double const na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double best = 0;
  while (i < x.size() || j < y.size()) {
    double const t = (j >= y.size() || (i < x.size() && x[i] <= y[j])) ? x[i] : y[j];
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

double kolmogorov(SpectralSample const& a, DensityTable const& b) {
  require_nonempty(a);
  auto const& x = a.values();
  double const n = static_cast<double>(x.size());
  double best = 0;
  std::size_t i = 0;
  while (i < x.size()) {
    double const t = x[i];
    double const left = static_cast<double>(i) / n;
    while (i < x.size() && x[i] == t) ++i;
    double const right = static_cast<double>(i) / n;
    double const f = b.cdf(t);
    best = std::max({best, std::abs(f - left), std::abs(f - right)});
  }
  return best;
}

double kolmogorov(DensityTable const& a, SpectralSample const& b) { return kolmogorov(b, a); }

double kolmogorov(DensityTable const& a, DensityTable const& b) {
  double best = 0;
  for (double t : a.grid()) best = std::max(best, std::abs(a.cdf(t) - b.cdf(t)));
  for (double t : b.grid()) best = std::max(best, std::abs(a.cdf(t) - b.cdf(t)));
  return best;
}

double wasserstein_r(SpectralSample const& a, SpectralSample const& b, double r) {
  require_r(r);
  require_nonempty(a);
  require_nonempty(b);
  auto const& x = a.values();
  auto const& y = b.values();
  unsigned long long const na = x.size(), nb = y.size();
  // Walk the merged u-breakpoints i/na and j/nb with integer comparisons.
  unsigned long long i = 0, j = 0;
  double acc = 0, u_prev = 0;
  while (i < na && j < nb) {
    unsigned long long const lhs = (i + 1) * nb, rhs = (j + 1) * na;
    double const u_next = lhs <= rhs ? static_cast<double>(i + 1) / static_cast<double>(na)
                                     : static_cast<double>(j + 1) / static_cast<double>(nb);
    acc += (u_next - u_prev) * std::pow(std::abs(x[i] - y[j]), r);
    u_prev = u_next;
    if (lhs <= rhs) ++i;
    if (rhs <= lhs) ++j;
  }
  return std::pow(acc, 1.0 / r);
}

double wasserstein_r(SpectralSample const& a, DensityTable const& b, double r) {
  require_r(r);
  require_nonempty(a);
  if (r == 1.0) return w1_sample_table(a, b);
  return quantile_distance([&](double u) { return a.quantile(u); }, [&](double u) { return b.quantile(u); }, r);
}

double wasserstein_r(DensityTable const& a, SpectralSample const& b, double r) { return wasserstein_r(b, a, r); }

double wasserstein_r(DensityTable const& a, DensityTable const& b, double r) {
  require_r(r);
  return quantile_distance([&](double u) { return a.quantile(u); }, [&](double u) { return b.quantile(u); }, r);
}

KwResult kw_bound_check(SpectralSample const& sample, DensityTable const& ref) {
  KwResult res;
  auto const& g = ref.grid();
  auto const& c = ref.cdf_values();
  for (std::size_t i = 1; i < g.size(); ++i) res.C = std::max(res.C, (c[i] - c[i - 1]) / (g[i] - g[i - 1]));
  res.K = kolmogorov(sample, ref);
  res.W1 = wasserstein_r(sample, ref, 1.0);
  res.bound = std::sqrt(2.0 * res.C * res.W1);
  res.holds = res.K <= res.bound * (1 + 1e-9);
  return res;
}

double zolotarev_lower_bound(SpectralSample const& a, SpectralSample const& b, double r, int trials,
                             std::uint64_t seed) {
  require_nonempty(a);
  require_nonempty(b);
  double const spread = std::max({std::abs(a.values().front()), std::abs(a.values().back()),
                                  std::abs(b.values().front()), std::abs(b.values().back()), 1e-12});
  return zolotarev_impl([&](auto const& f) { return sample_expectation(a, f); },
                        [&](auto const& f) { return sample_expectation(b, f); }, spread, r, trials, seed);
}

double zolotarev_lower_bound(SpectralSample const& a, DensityTable const& b, double r, int trials,
                             std::uint64_t seed) {
  require_nonempty(a);
  double const spread = std::max({std::abs(a.values().front()), std::abs(a.values().back()), std::abs(b.lower()),
                                  std::abs(b.upper())});
  return zolotarev_impl([&](auto const& f) { return sample_expectation(a, f); },
                        [&](auto const& f) { return table_expectation(b, f); }, spread, r, trials, seed);
}

RatePrediction rate_cell(double r, double gamma, RateBranch branch) {
  if (!(r >= 1) || !std::isfinite(r)) throw InvalidArgument("rate_lookup: r must be >= 1");
  if (!(gamma > 0 && gamma <= 1)) throw InvalidArgument("rate_lookup: gamma must lie in (0,1]");
  RatePrediction p;
  double m1, m2, p1, p2;
  double const r2 = r * r;
  if (r == 1) {
    p.gamma_crit = 4.0 / 5;
    m1 = gamma / 8, m2 = 0, p1 = 1.0 / 10, p2 = 0;
  } else if (r < 2) {
    p.gamma_crit = (r2 + r + 2) / (r2 + r + 4);
    m1 = gamma / (2 * r2 + 2 * r + 4), m2 = 0, p1 = 1 / (2 * r2 + 2 * r + 8), p2 = 0;
  } else if (r == 2) {
    p.gamma_crit = 2.0 / 3;
    m1 = gamma / 8, m2 = 0.5, p1 = 1.0 / 12, p2 = 0;
  } else if (r < 4) {
    p.gamma_crit = (r2 + 2 * r) / (r2 + r + 4);
    m1 = gamma / (2 * r2 + 4 * r), m2 = 0, p1 = 1 / (2 * r2 + 2 * r + 8), p2 = 0;
  } else if (r == 4) {
    p.gamma_crit = 1;
    m1 = gamma / 48, m2 = 0, p1 = 1.0 / 48, p2 = 0.25;
  } else {
    p.gamma_crit = 1;
    m1 = gamma / (12 * r), m2 = 0, p1 = 1 / (12 * r), p2 = 0;
  }
  p.branch = branch;
  p.beta1 = branch == RateBranch::plus ? p1 : m1;
  p.beta2 = branch == RateBranch::plus ? p2 : m2;
  return p;
}

RatePrediction rate_lookup(double r, double gamma) {
  RatePrediction const probe = rate_cell(r, gamma, RateBranch::minus);
  return gamma > probe.gamma_crit ? rate_cell(r, gamma, RateBranch::plus) : probe;
}

RateFit rate_fit(std::vector<double> const& ns, std::vector<double> const& ds, bool with_log) {
  if (ns.size() != ds.size()) throw DimensionError("rate_fit: sizes differ");
  if (ns.size() < 4) throw InvalidArgument("rate_fit: need at least 4 points");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ds[i] > 0)) throw InvalidArgument("rate_fit: distances must be positive");
    if (i > 0 && !(ns[i] > ns[i - 1])) throw InvalidArgument("rate_fit: n must be strictly increasing");
    if (with_log && !(ns[i] > std::exp(1.0))) throw InvalidArgument("rate_fit: log-log term needs n > e");
  }
  Eigen::Index const m = static_cast<Eigen::Index>(ns.size());
  Eigen::MatrixXd A(m, with_log ? 3 : 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double const ln = std::log(ns[static_cast<std::size_t>(i)]);
    A(i, 0) = 1.0;
    A(i, 1) = -ln;
    if (with_log) A(i, 2) = std::log(ln);
    y(i) = std::log(ds[static_cast<std::size_t>(i)]);
  }
  Eigen::VectorXd const coef = A.colPivHouseholderQr().solve(y);
  Eigen::VectorXd const resid = y - A * coef;
  double const ss_tot = (y.array() - y.mean()).square().sum();
  RateFit f;
  f.beta1 = coef(1);
  f.beta2 = with_log ? coef(2) : 0.0;
  f.r2 = ss_tot > 0 ? 1.0 - resid.squaredNorm() / ss_tot : 1.0;
  return f;
}

} // namespace freemult
