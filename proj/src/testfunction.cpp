#include "freemult/testfunction.hpp"

#include "freemult/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace freemult {

namespace {

// j-th antiderivative of |u|^beta: sgn(u)^j |u|^{beta+j} / ((beta+1)...(beta+j)).
double abs_pow_antiderivative(int j, double beta, double u) {
  if (u == 0.0) return 0.0;
  double denom = 1.0;
  for (int i = 1; i <= j; ++i) denom *= beta + i;
  double const v = std::pow(std::abs(u), beta + j) / denom;
  return (j % 2 == 1 && u < 0) ? -v : v;
}

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_class(int ell, double beta) {
  if (ell < 0) throw InvalidArgument("TestFunction: l must be non-negative");
  if (!(beta > 0 && beta <= 1)) throw InvalidArgument("TestFunction: beta must lie in (0,1]");
}

} // namespace

TestFunction TestFunction::kinks(int ell, double beta, std::vector<double> centers, std::vector<double> amps,
                                 double slope) {
  check_class(ell, beta);
  if (centers.size() != amps.size()) throw InvalidArgument("TestFunction: centers and amplitudes differ in size");
  if (beta < 1 && slope != 0.0) throw InvalidArgument("TestFunction: a linear term is not Hoelder for beta < 1");
  TestFunction f;
  f.ell_ = ell;
  f.beta_ = beta;
  f.slope_ = slope;
  std::vector<std::size_t> order(centers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return centers[a] < centers[b]; });
  for (auto i : order) {
    if (amps[i] == 0.0) continue;
    f.centers_.push_back(centers[i]);
    f.amps_.push_back(amps[i]);
  }
  f.normalise();
  return f;
}

TestFunction TestFunction::piecewise_linear(int ell, std::vector<double> knots, std::vector<double> slopes) {
  if (slopes.size() != knots.size() + 1) throw InvalidArgument("piecewise_linear: need one more slope than knots");
  if (!std::is_sorted(knots.begin(), knots.end())) throw InvalidArgument("piecewise_linear: knots must increase");
  for (double s : slopes)
    if (std::abs(s) > 1.0) throw InvalidArgument("piecewise_linear: slopes must lie in [-1, 1]");
  std::vector<double> amps(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) amps[i] = 0.5 * (slopes[i + 1] - slopes[i]);
  return kinks(ell, 1.0, std::move(knots), std::move(amps), 0.5 * (slopes.front() + slopes.back()));
}

TestFunction TestFunction::zigzag(int ell, double delta, double extent) {
  if (!(delta > 0) || !(extent > 0)) throw InvalidArgument("zigzag: delta and extent must be positive");
  int const m = static_cast<int>(std::floor(extent / delta));
  std::vector<double> knots, slopes{1.0};
  for (int i = -m; i <= m; ++i) {
    knots.push_back((i + 0.5) * delta);
    slopes.push_back(-slopes.back());
  }
  return piecewise_linear(ell, std::move(knots), std::move(slopes));
}

TestFunction TestFunction::monomial(int ell) { return kinks(ell, 1.0, {}, {}, 1.0); }

TestFunction TestFunction::zero(int ell, double beta) { return kinks(ell, beta, {}, {}, 0.0); }

TestFunction TestFunction::random(int ell, double beta, int kinks_count, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-spread, spread), a(-1.0, 1.0);
  std::vector<double> centers, amps;
  for (int i = 0; i < kinks_count; ++i) {
    centers.push_back(c(rng));
    amps.push_back(a(rng));
  }
  double const slope = beta == 1.0 ? a(rng) : 0.0;
  return kinks(ell, beta, std::move(centers), std::move(amps), slope);
}

void TestFunction::normalise() {
  double seminorm = 0;
  if (beta_ == 1.0) {
    // Lipschitz constant = largest |slope| over the intervals between kinks.
    double s = slope_;
    for (double a : amps_) s -= a;
    seminorm = std::abs(s);
    for (double a : amps_) {
      s += 2 * a;
      seminorm = std::max(seminorm, std::abs(s));
    }
  } else {
    for (double a : amps_) seminorm += std::abs(a);
  }
  if (seminorm > 1.0) {
    slope_ /= seminorm;
    for (auto& a : amps_) a /= seminorm;
  }
}

double TestFunction::derivative(int j, double x) const {
  if (j < 0 || j > ell_) throw InvalidArgument("TestFunction: derivative order outside [0, l]");
  int const q = ell_ - j; // number of integrations still applied to h
  double v = slope_ * std::pow(x, q + 1) / factorial(q + 1);
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    double const c = centers_[i];
    double term = abs_pow_antiderivative(q, beta_, x - c);
    double xp = 1.0;
    for (int t = 0; t < q; ++t) {
      term -= abs_pow_antiderivative(q - t, beta_, -c) * xp / factorial(t);
      xp *= x;
    }
    term -= std::pow(std::abs(c), beta_) * xp / factorial(q);
    v += amps_[i] * term;
  }
  return v;
}

double TestFunction::holder_quotient(std::vector<double> const& grid) const {
  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) h[i] = derivative(ell_, grid[i]);
  double worst = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t k = i + 1; k < grid.size(); ++k) {
      double const d = std::abs(grid[k] - grid[i]);
      if (d == 0) continue;
      worst = std::max(worst, std::abs(h[k] - h[i]) / std::pow(d, beta_));
    }
  return worst;
}

} // namespace freemult
