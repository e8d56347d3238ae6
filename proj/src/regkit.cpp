#include "freemult/regkit.hpp"

#include "freemult/errors.hpp"
#include "freemult/io.hpp"
#include "freemult/quadrature.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>

namespace freemult {

namespace {

constexpr std::size_t kMaxFftPoints = std::size_t{1} << 24;
constexpr double kOversample = 4.0;
constexpr int kPad = 8;

double step_h(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }

// C-infinity step: 1 on [0, 1/2], 0 on [1, inf).
double smooth_step(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  double const a = step_h(1.0 - s), b = step_h(s - 0.5);
  return a / (a + b);
}

void check_zeta(double zeta) {
  if (!(zeta > 0 && zeta <= 1)) throw InvalidArgument("zeta must lie in (0, 1]");
}

// Probabilists' Hermite polynomial He_n(u).
double hermite_e(int n, double u) {
  double h0 = 1, h1 = u;
  if (n == 0) return h0;
  for (int i = 1; i < n; ++i) {
    double const h2 = u * h1 - i * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// Magnitude of the transform of f_zeta on y_m = m dy, m = 0..count-1.
struct Spectrum {
  double dy = 0;
  std::vector<double> magnitude;
};

Spectrum spectrum_of(Truncated const& fz, double y_max) {
  double const L = fz.support();
  double const dx = std::numbers::pi / (kOversample * y_max);
  double const samples = 2 * L / dx;
  if (!(samples < static_cast<double>(kMaxFftPoints) / kPad))
    throw ResolutionError("fourier_moment_Ik: grid resolving frequency " + fmt_num(y_max) + " on support " +
                          fmt_num(L) + " exceeds the transform size limit");
  std::size_t const J = static_cast<std::size_t>(std::ceil(samples)) + 1;
  double const h = 2 * L / static_cast<double>(J - 1);
  std::size_t const M = kPad * J;
  std::unique_ptr<double, decltype(&fftw_free)> in(fftw_alloc_real(M), &fftw_free);
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(fftw_alloc_complex(M / 2 + 1), &fftw_free);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(M), in.get(), out.get(), FFTW_ESTIMATE);
  for (std::size_t j = 0; j < M; ++j) in.get()[j] = j < J ? fz(-L + static_cast<double>(j) * h) : 0.0;
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  Spectrum s;
  s.dy = 2 * std::numbers::pi / (static_cast<double>(M) * h);
  std::size_t const count = std::min(M / 2 + 1, static_cast<std::size_t>(std::ceil(y_max / s.dy)) + 1);
  s.magnitude.resize(count);
  for (std::size_t m = 0; m < count; ++m) {
    double const y = static_cast<double>(m) * s.dy;
    double const half = 0.5 * y * h;
    // Transform of the piecewise-linear interpolant: DFT times sinc^2.
    double const sinc = half == 0 ? 1.0 : std::sin(half) / half;
    s.magnitude[m] = h * sinc * sinc * std::hypot(out.get()[m][0], out.get()[m][1]);
  }
  return s;
}

double ik_from_spectrum(Spectrum const& s, SmoothingKernel const& kernel, int k, double y_max) {
  double acc = 0;
  std::size_t const count = s.magnitude.size();
  for (std::size_t m = 0; m < count; ++m) {
    double const y = static_cast<double>(m) * s.dy;
    if (y > y_max) break;
    double const w = (m == 0 || m + 1 == count) ? 0.5 : 1.0;
    acc += w * std::pow(y, k) * std::abs(kernel.fourier(y)) * s.magnitude[m];
  }
  return 2 * acc * s.dy;
}

double y_limit(SmoothingKernel const& kernel, int k) { return kernel.fourier_cutoff(k) / kernel.eps(); }

void check_geometric(std::vector<double> const& g, char const* what) {
  if (g.size() < 4) throw InvalidArgument(std::string(what) + " grid needs at least 4 points");
  for (double v : g)
    if (!(v > 0 && v < 1)) throw InvalidArgument(std::string(what) + " grid values must lie in (0, 1)");
  double const q = g[1] / g[0];
  for (std::size_t i = 1; i < g.size(); ++i)
    if (std::abs(g[i] / g[i - 1] - q) > 1e-9 * q || q == 1.0)
      throw InvalidArgument(std::string(what) + " grid must be geometric");
}

} // namespace

Mollifier::Mollifier(double zeta, MollifierProfile profile) : zeta_(zeta), profile_(profile) { check_zeta(zeta); }

Mollifier Mollifier::for_class(double zeta, int ell) {
  return Mollifier(zeta, ell == 0 ? MollifierProfile::lipschitz_tail : MollifierProfile::smooth);
}

double Mollifier::theta(double s, MollifierProfile profile) {
  double const a = std::abs(s);
  if (a >= 1.0) return 0.0;
  double const tau = smooth_step(a);
  return profile == MollifierProfile::smooth ? tau : 1.0 - (1.0 - tau) * a;
}

Truncated::Truncated(TestFunction f, Mollifier m) : f_(std::move(f)), m_(m) {}

double Truncated::operator()(double x) const {
  double const t = m_(x);
  return t == 0.0 ? 0.0 : f_(x) * t;
}

std::vector<double> Truncated::breakpoints() const {
  double const L = support();
  std::vector<double> b{-L};
  for (double c : f_.breakpoints())
    if (c > -L && c < L) b.push_back(c);
  b.push_back(L);
  std::sort(b.begin(), b.end());
  return b;
}

Truncated truncate(TestFunction const& f, double zeta) { return Truncated(f, Mollifier::for_class(zeta, f.ell())); }

double truncation_error_scan(TestFunction const& f, double zeta, std::vector<double> const& grid) {
  auto const fz = truncate(f, zeta);
  double worst = 0;
  for (double x : grid) {
    if (x == 0.0) continue;
    worst = std::max(worst, std::abs(f(x) - fz(x)) / (zeta * std::pow(std::abs(x), f.r() + 1)));
  }
  return worst;
}

SmoothingKernel::SmoothingKernel(double eps, int vanishing_moments) : eps_(eps), ell_(vanishing_moments) {
  if (!(eps > 0) || !std::isfinite(eps)) throw InvalidArgument("SmoothingKernel: eps must be positive");
  if (ell_ < 0 || ell_ > kMaxVanishing) throw InvalidArgument("SmoothingKernel: vanishing moments outside [0, 8]");
  using boost::multiprecision::cpp_rational;
  int const q = ell_ / 2 + 1;
  auto dfact = [](int n) {
    cpp_rational v = 1;
    for (int i = n; i > 1; i -= 2) v *= i;
    return v;
  };
  // Moment system sum_j p_j (2i + 2j - 1)!! = [i == 0], solved exactly.
  std::vector<std::vector<cpp_rational>> a(static_cast<std::size_t>(q), std::vector<cpp_rational>(q + 1));
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) a[i][j] = dfact(2 * i + 2 * j - 1);
    a[i][q] = i == 0 ? 1 : 0;
  }
  for (int c = 0; c < q; ++c) {
    int piv = c;
    while (a[piv][c] == 0) ++piv;
    std::swap(a[piv], a[c]);
    for (int i = 0; i < q; ++i) {
      if (i == c || a[i][c] == 0) continue;
      cpp_rational const f = a[i][c] / a[c][c];
      for (int j = c; j <= q; ++j) a[i][j] -= f * a[c][j];
    }
  }
  for (int i = 0; i < q; ++i) p_.push_back(static_cast<double>(a[i][q] / a[i][i]));
  cutoff_ = 12.0 + 2.0 * q;
}

double SmoothingKernel::profile(double t) const {
  double poly = 0, tp = 1;
  for (double c : p_) {
    poly += c * tp;
    tp *= t * t;
  }
  return poly * std::exp(-0.5 * t * t) / std::sqrt(2 * std::numbers::pi);
}

double SmoothingKernel::profile_fourier(double u) const {
  double acc = 0;
  for (std::size_t j = 0; j < p_.size(); ++j)
    acc += (j % 2 == 0 ? 1.0 : -1.0) * p_[j] * hermite_e(static_cast<int>(2 * j), u);
  return acc * std::exp(-0.5 * u * u);
}

double SmoothingKernel::moment(int j) const {
  if (j < 0) throw InvalidArgument("SmoothingKernel::moment: negative order");
  return integrate_panels([&](double t) { return std::pow(t, j) * profile(t); }, -cutoff_, cutoff_, 64, 20);
}

double SmoothingKernel::abs_moment() const {
  return 2 * integrate_panels([&](double t) { return t * std::abs(profile(t)); }, 0.0, cutoff_, 64, 20);
}

double SmoothingKernel::fourier_cutoff(int k) const {
  double peak = 0;
  for (double u = 0; u <= 8; u += 0.01) peak = std::max(peak, std::abs(profile_fourier(u)));
  double last = 0;
  for (double u = 0.25; u <= 80; u += 0.25)
    if (std::pow(u, k) * std::abs(profile_fourier(u)) >= 1e-14 * peak) last = u;
  return last + 0.25;
}

double smooth(Truncated const& fz, SmoothingKernel const& kernel, double x) {
  double const eps = kernel.eps(), T = kernel.cutoff() * eps;
  std::vector<double> breaks{0.0};
  for (double c : fz.breakpoints()) breaks.push_back(x - c);
  return integrate_with_breaks([&](double y) { return fz(x - y) * kernel(y); }, -T, T, breaks, 8, 20);
}

double smoothing_error_scan(TestFunction const& f, double zeta, SmoothingKernel const& kernel,
                            std::vector<double> const& grid) {
  if (kernel.vanishing_moments() < f.ell())
    throw ClassMismatchError("smoothing: kernel has " + std::to_string(kernel.vanishing_moments()) +
                             " vanishing moments, class needs " + std::to_string(f.ell()));
  auto const fz = truncate(f, zeta);
  bool const lipschitz = f.r() == 1.0;
  double const c1 = lipschitz ? kernel.abs_moment() : 0.0;
  double worst = 0;
  for (double x : grid) {
    double const err = std::abs(fz(x) - smooth(fz, kernel, x));
    double const scale = lipschitz ? kernel.eps() * (1 + zeta * std::abs(x)) * c1 : 1 + std::pow(std::abs(x), f.r());
    worst = std::max(worst, err / scale);
  }
  return worst;
}

bool SmoothingScaling::within(double tol) const {
  return ratio_half > 0 && std::abs(ratio_eps / ratio_half / std::exp2(predicted) - 1) <= tol;
}

SmoothingScaling smoothing_scaling(TestFunction const& f, double zeta, double eps, std::vector<double> const& grid) {
  SmoothingScaling s;
  s.ratio_eps = smoothing_error_scan(f, zeta, SmoothingKernel(eps, f.ell()), grid);
  s.ratio_half = smoothing_error_scan(f, zeta, SmoothingKernel(eps / 2, f.ell()), grid);
  s.fitted = s.ratio_half > 0 ? std::log2(s.ratio_eps / s.ratio_half) : 0.0;
  s.predicted = f.r() + 1 - f.beta();
  return s;
}

double fourier_moment_Ik(Truncated const& fz, SmoothingKernel const& kernel, int k) {
  if (k < 0) throw InvalidArgument("fourier_moment_Ik: k must be non-negative");
  if (fz.base().is_zero()) return 0.0;
  double const y_max = y_limit(kernel, k);
  return ik_from_spectrum(spectrum_of(fz, y_max), kernel, k, y_max);
}

double fourier_moment_Ik(TestFunction const& f, double zeta, double eps, int k) {
  return fourier_moment_Ik(truncate(f, zeta), SmoothingKernel(eps, f.ell()), k);
}

IkPrediction ik_prediction(double r, int k) {
  if (!(r >= 1)) throw InvalidArgument("ik_prediction: r must be >= 1");
  if (k < 0) throw InvalidArgument("ik_prediction: k must be non-negative");
  IkPrediction p;
  if (r == 1.0 && k >= 1) {
    p.eps_exp = k;
    p.zeta_exp = k <= 2 ? 2.0 : -1.0;
    p.zeta_asserted = k <= 2;
    return p;
  }
  p.zeta_exp = r + 1;
  if (k > r - 1) {
    p.eps_exp = k - r + 1;
  } else if (k == r - 1) {
    p.log_case = true;
  }
  return p;
}

double growth_exponent(std::vector<double> const& xs, std::vector<double> const& values) {
  if (xs.size() != values.size() || xs.size() < 2) throw InvalidArgument("growth_exponent: need matching grids");
  double mx = 0, my = 0;
  std::size_t const n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(values[i] > 0)) throw InvalidArgument("growth_exponent: values must be positive");
    mx += std::log(xs[i]) / static_cast<double>(n);
    my += std::log(values[i]) / static_cast<double>(n);
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double const dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(values[i]) - my);
    sxx += dx * dx;
  }
  return -sxy / sxx;
}

bool IkReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](IkRow const& r) { return r.eps_ok && r.zeta_ok; });
}

void IkReport::write_csv(std::ostream& os, std::string const& subcommand) const {
  CsvWriter w(os, subcommand,
              {"r", "k", "predicted_eps_exp", "fitted_eps_exp", "predicted_zeta_exp", "fitted_zeta_exp", "log_case",
               "eps_ok", "zeta_ok"});
  for (auto const& row : rows)
    w.row({fmt_num(r), std::to_string(row.k), fmt_num(row.predicted.eps_exp), fmt_num(row.fitted_eps),
           fmt_num(row.predicted.zeta_exp), fmt_num(row.fitted_zeta), row.predicted.log_case ? "1" : "0",
           row.eps_ok ? "1" : "0", row.zeta_ok ? "1" : "0"});
}

IkReport ik_scaling_report(TestFunction const& f, std::vector<int> const& ks, std::vector<double> const& eps_grid,
                           std::vector<double> const& zeta_grid) {
  check_geometric(eps_grid, "eps");
  check_geometric(zeta_grid, "zeta");
  IkReport rep;
  rep.r = f.r();
  rep.beta = f.beta();
  rep.eps_grid = eps_grid;
  rep.zeta_grid = zeta_grid;
  rep.zeta_fixed = zeta_grid[zeta_grid.size() / 2];
  rep.eps_fixed = eps_grid[eps_grid.size() / 2];
  int const kmax = *std::max_element(ks.begin(), ks.end());
  double const eps_min = *std::min_element(eps_grid.begin(), eps_grid.end());
  std::vector<SmoothingKernel> kernels;
  for (double e : eps_grid) kernels.emplace_back(e, f.ell());
  SmoothingKernel const fixed_kernel(rep.eps_fixed, f.ell());

  // One spectrum per zeta, resolved for the smallest eps.
  double const y_max = y_limit(SmoothingKernel(eps_min, f.ell()), kmax);
  Spectrum const base = spectrum_of(truncate(f, rep.zeta_fixed), y_max);
  std::vector<Spectrum> by_zeta;
  for (double z : zeta_grid) by_zeta.push_back(spectrum_of(truncate(f, z), y_limit(fixed_kernel, kmax)));

  for (int k : ks) {
    IkRow row;
    row.k = k;
    row.predicted = ik_prediction(f.r(), k);
    for (auto const& kern : kernels) row.values_eps.push_back(ik_from_spectrum(base, kern, k, y_limit(kern, k)));
    for (auto const& s : by_zeta) row.values_zeta.push_back(ik_from_spectrum(s, fixed_kernel, k, y_limit(fixed_kernel, k)));
    if (row.predicted.log_case) {
      std::vector<double> scaled;
      for (std::size_t i = 0; i < eps_grid.size(); ++i) scaled.push_back(row.values_eps[i] / std::abs(std::log(eps_grid[i])));
      row.fitted_eps = growth_exponent(eps_grid, scaled);
      row.eps_ok = row.fitted_eps <= 0.15;
    } else {
      row.fitted_eps = growth_exponent(eps_grid, row.values_eps);
      row.eps_ok = row.fitted_eps <= row.predicted.eps_exp + 0.4;
    }
    row.fitted_zeta = growth_exponent(zeta_grid, row.values_zeta);
    row.zeta_ok = !row.predicted.zeta_asserted || row.fitted_zeta <= row.predicted.zeta_exp + 0.4;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

} // namespace freemult
