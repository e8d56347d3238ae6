#include "freemult/model.hpp"

#include "freemult/errors.hpp"
#include "freemult/freecalc_core.hpp"
#include "freemult/ncpart.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace freemult {

namespace {

// n^{-i/2}, with even powers formed as exact reciprocals.
double inv_sqrt_pow(int n, int i) {
  double const even = 1.0 / std::pow(static_cast<double>(n), i / 2);
  return (i % 2 == 0) ? even : even / std::sqrt(static_cast<double>(n));
}

std::vector<double> poly_mul(std::vector<double> const& a, std::vector<double> const& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

} // namespace

XLaw XLaw::rademacher(double sigma) {
  if (!(sigma > 0)) throw InvalidArgument("rademacher: sigma must be positive");
  XLaw l;
  l.kind_ = Kind::rademacher;
  l.param_ = sigma;
  l.atoms_ = {{-sigma, 0.5}, {sigma, 0.5}};
  l.finish_atomic();
  return l;
}

XLaw XLaw::two_point(double p, double a, double b) {
  if (!(p > 0 && p < 1)) throw InvalidArgument("two_point: p must lie in (0,1)");
  XLaw l;
  l.kind_ = Kind::two_point;
  l.param_ = p;
  l.atoms_ = {{a, p}, {b, 1.0 - p}};
  l.finish_atomic();
  return l;
}

XLaw XLaw::semicircle(double variance) {
  if (!(variance > 0)) throw InvalidArgument("semicircle: variance must be positive");
  XLaw l;
  l.kind_ = Kind::semicircle;
  l.param_ = variance;
  l.variance_ = variance;
  return l;
}

XLaw XLaw::uniform(double c) {
  if (!(c > 0)) throw InvalidArgument("uniform: half-width must be positive");
  XLaw l;
  l.kind_ = Kind::uniform;
  l.param_ = c;
  l.variance_ = c * c / 3.0;
  return l;
}

XLaw XLaw::atomic(std::vector<std::pair<double, double>> atoms_and_weights) {
  if (atoms_and_weights.empty()) throw InvalidArgument("atomic: no atoms");
  XLaw l;
  l.kind_ = Kind::atomic;
  l.atoms_ = std::move(atoms_and_weights);
  l.finish_atomic();
  return l;
}

void XLaw::finish_atomic() {
  double total = 0, mean = 0, scale = 0;
  for (auto [a, w] : atoms_) {
    if (!std::isfinite(a) || !(w >= 0)) throw InvalidArgument("atomic law: bad atom or weight");
    total += w;
    mean += w * a;
    scale = std::max(scale, std::abs(a));
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("atomic law: weights do not sum to 1");
  if (std::abs(mean) > 1e-14 * std::max(1.0, scale))
    throw InvalidArgument("x-law must be centered, mean = " + fmt(mean));
  variance_ = 0;
  for (auto [a, w] : atoms_) variance_ += w * a * a;
  if (!(variance_ > 0)) throw InvalidArgument("x-law has zero variance");
}

std::string XLaw::name() const {
  switch (kind_) {
  case Kind::rademacher: return "rademacher(" + fmt(param_) + ")";
  case Kind::two_point:
    return "two_point(" + fmt(param_) + "," + fmt(atoms_[0].first) + "," + fmt(atoms_[1].first) + ")";
  case Kind::semicircle: return "semicircle(" + fmt(param_) + ")";
  case Kind::uniform: return "uniform(" + fmt(param_) + ")";
  case Kind::atomic: return "atomic(" + std::to_string(atoms_.size()) + ")";
  }
  return "?";
}

double XLaw::sigma() const { return std::sqrt(variance_); }

double XLaw::moment(int j) const {
  if (j < 0) throw InvalidArgument("moment: negative order");
  if (j == 0) return 1.0;
  if (is_atomic()) {
    double s = 0;
    for (auto [a, w] : atoms_) s += w * std::pow(a, j);
    return s;
  }
  if (j % 2 == 1) return 0.0;
  if (kind_ == Kind::semicircle)
    return static_cast<double>(catalan(j / 2)) * std::pow(param_, j / 2);
  return std::pow(param_, j) / (j + 1);
}

GFunc GFunc::polynomial(std::vector<std::complex<double>> coeffs) {
  if (coeffs.empty() || std::abs(coeffs[0] - std::complex<double>(1.0)) > 1e-14)
    throw InvalidArgument("polynomial g must satisfy g(0) = 1");
  while (coeffs.size() > 1 && coeffs.back() == std::complex<double>(0.0)) coeffs.pop_back();
  GFunc g;
  g.kind_ = Kind::polynomial;
  g.c_ = std::move(coeffs);
  std::size_t const d = g.c_.size() - 1;
  g.gsq_.assign(2 * d + 1, 0.0);
  for (std::size_t i = 0; i <= d; ++i)
    for (std::size_t j = 0; j <= d; ++j) g.gsq_[i + j] += (g.c_[i] * std::conj(g.c_[j])).real();
  return g;
}

GFunc GFunc::polynomial_real(std::vector<double> coeffs) {
  return polynomial(std::vector<std::complex<double>>(coeffs.begin(), coeffs.end()));
}

GFunc GFunc::exp() {
  GFunc g;
  g.kind_ = Kind::exp;
  return g;
}

std::string GFunc::name() const {
  if (kind_ == Kind::exp) return "exp";
  std::string s = "poly(";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) s += ",";
    s += fmt(c_[i].real());
    if (c_[i].imag() != 0) s += (c_[i].imag() > 0 ? "+" : "") + fmt(c_[i].imag()) + "i";
  }
  return s + ")";
}

double GFunc::re_g2() const {
  if (kind_ == Kind::exp) return 1.0;
  return c_.size() > 2 ? 2.0 * c_[2].real() : 0.0;
}

double GFunc::abs_g1_sq() const {
  if (kind_ == Kind::exp) return 1.0;
  return c_.size() > 1 ? std::norm(c_[1]) : 0.0;
}

double GFunc::d1() const {
  if (kind_ == Kind::exp) return 2.0;
  return c_.size() > 1 ? 2.0 * c_[1].real() : 0.0;
}

double GFunc::d2() const { return 2.0 * abs_g1_sq() + 2.0 * re_g2(); }

std::complex<double> GFunc::operator()(std::complex<double> x) const {
  if (kind_ == Kind::exp) return std::exp(x);
  std::complex<double> acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double GFunc::gsq_at(double x) const {
  if (kind_ == Kind::exp) return std::exp(2.0 * x);
  double acc = 0;
  for (auto it = gsq_.rbegin(); it != gsq_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

bool GFunc::is_constant_one() const { return kind_ == Kind::polynomial && c_.size() == 1; }

MomentSeq gsq_moments(ModelSpec const& spec, int n, int K) {
  if (n < 1) throw InvalidArgument("gsq_moments: n must be positive");
  if (K < 1 || K > kMaxOrder) throw SizeLimitError("gsq_moments: order outside [1, 16]");
  std::vector<double> m(static_cast<std::size_t>(K));
  if (spec.g.kind() == GFunc::Kind::exp) {
    if (!spec.xlaw.is_atomic())
      throw UnsupportedModelError("g = exp requires an atomic x-law, got " + spec.xlaw.name());
    double const s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 1; j <= K; ++j) {
      double acc = 0;
      for (auto [a, w] : spec.xlaw.atoms()) acc += w * std::exp(2.0 * j * a * s);
      m[j - 1] = acc;
    }
    return MomentSeq(std::move(m));
  }
  std::vector<double> power{1.0};
  for (int j = 1; j <= K; ++j) {
    power = poly_mul(power, spec.g.gsq());
    double acc = 0;
    for (std::size_t i = 0; i < power.size(); ++i) {
      if (power[i] == 0.0) continue;
      acc += power[i] * inv_sqrt_pow(n, static_cast<int>(i)) * spec.xlaw.moment(static_cast<int>(i));
    }
    m[j - 1] = acc;
  }
  return MomentSeq(std::move(m));
}

std::complex<double> g_mean(ModelSpec const& spec, int n) {
  if (n < 1) throw InvalidArgument("g_mean: n must be positive");
  if (spec.g.kind() == GFunc::Kind::exp) {
    if (!spec.xlaw.is_atomic())
      throw UnsupportedModelError("g = exp requires an atomic x-law, got " + spec.xlaw.name());
    double acc = 0;
    for (auto [a, w] : spec.xlaw.atoms()) acc += w * std::exp(a / std::sqrt(static_cast<double>(n)));
    return acc;
  }
  std::complex<double> acc = 0;
  auto const& c = spec.g.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    acc += c[i] * inv_sqrt_pow(n, static_cast<int>(i)) * spec.xlaw.moment(static_cast<int>(i));
  return acc;
}

CumulantSeq yn_cumulants(ModelSpec const& spec, int n, int K) {
  using Wide = boost::multiprecision::cpp_bin_float_50;
  auto const m = gsq_moments(spec, n, K);
  std::vector<Wide> wide(m.values().begin(), m.values().end());
  auto const kappa = core::moments_to_cumulants(core::mult_power(wide, static_cast<unsigned long long>(n)));
  std::vector<double> out;
  out.reserve(kappa.size());
  for (auto const& v : kappa) out.push_back(static_cast<double>(v));
  return CumulantSeq(std::move(out));
}

double yn_cumulant(ModelSpec const& spec, int n, int k) {
  if (k < 1) throw InvalidArgument("yn_cumulant: k must be positive");
  return yn_cumulants(spec, n, k)(k);
}

double fitted_decay_exponent(std::vector<int> const& ns, std::vector<double> const& resid) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (resid[i] == 0.0) continue;
    xs.push_back(std::log(static_cast<double>(ns[i])));
    ys.push_back(-std::log(std::abs(resid[i])));
  }
  if (xs.size() < 2) return std::numeric_limits<double>::infinity();
  double const nx = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= nx;
  my /= nx;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

namespace {

// Fits C on the two smallest n and checks |r(n)| <= C n^{-p} on all rows.
bool bound_holds(std::vector<int> const& ns, std::vector<double> const& r, double p, double& C) {
  C = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(2, ns.size()); ++i)
    C = std::max(C, std::abs(r[i]) * std::pow(static_cast<double>(ns[i]), p));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    double const bound = C * std::pow(static_cast<double>(ns[i]), -p);
    if (std::abs(r[i]) > bound * (1 + 1e-9) + 1e-15) return false;
  }
  return true;
}

} // namespace

B2Report lemma_b2_expansion_check(ModelSpec const& spec, std::vector<int> const& n_grid, int k_max) {
  if (spec.g.kind() != GFunc::Kind::polynomial)
    throw UnsupportedModelError("lemma_b2_expansion_check: polynomial g required");
  if (n_grid.size() < 3) throw InvalidArgument("lemma_b2_expansion_check: need at least 3 grid points");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()))
    throw InvalidArgument("lemma_b2_expansion_check: n grid must be increasing");
  k_max = std::max(k_max, 2);
  B2Report rep;
  rep.predicted1 = 1.0 + spec.gamma / 2.0;
  double const var = spec.xlaw.variance();
  double const a1 = spec.g.re_g2() + spec.g.abs_g1_sq();
  double const d1 = spec.g.d1();
  std::vector<double> r1, r2;
  std::vector<std::vector<double>> hk(static_cast<std::size_t>(k_max - 2));
  for (int n : n_grid) {
    auto const kap = moments_to_cumulants(gsq_moments(spec, n, k_max));
    B2Row row;
    row.n = n;
    double const inv_n = 1.0 / n;
    row.kappa1 = kap(1);
    row.pred1 = 1.0 + a1 * var * inv_n;
    row.resid1 = row.kappa1 - row.pred1;
    row.kappa2 = kap(2);
    row.pred2 = var * d1 * d1 * inv_n;
    row.resid2 = row.kappa2 - row.pred2;
    for (int k = 3; k <= k_max; ++k) {
      row.higher.push_back(std::abs(kap(k)));
      hk[static_cast<std::size_t>(k - 3)].push_back(kap(k));
    }
    row.assumption3 = g_mean(spec, n).real() >= 1.0;
    r1.push_back(row.resid1);
    r2.push_back(row.resid2);
    rep.rows.push_back(std::move(row));
  }
  rep.exponent1 = fitted_decay_exponent(n_grid, r1);
  rep.exponent2 = fitted_decay_exponent(n_grid, r2);
  rep.k1_exact_zero = std::all_of(r1.begin(), r1.end(), [](double x) { return x == 0.0; });
  rep.k2_exact_zero = std::all_of(r2.begin(), r2.end(), [](double x) { return x == 0.0; });
  rep.k1_ok = bound_holds(n_grid, r1, rep.predicted1, rep.constant1);
  rep.k2_ok = bound_holds(n_grid, r2, rep.predicted2, rep.constant2);
  rep.higher_ok = true;
  for (int k = 3; k <= k_max; ++k) {
    auto const& v = hk[static_cast<std::size_t>(k - 3)];
    rep.higher_exponents[k] = fitted_decay_exponent(n_grid, v);
    double C = 0;
    if (!bound_holds(n_grid, v, k / 2.0, C)) rep.higher_ok = false;
  }
  return rep;
}

} // namespace freemult
