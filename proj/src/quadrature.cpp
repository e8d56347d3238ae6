#include "freemult/quadrature.hpp"

#include "freemult/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <string>

namespace freemult {

namespace {

template <unsigned N>
GaussRule build() {
  using Q = boost::math::quadrature::gauss<double, N>;
  auto const& x = Q::abscissa();
  auto const& w = Q::weights();
  GaussRule r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      r.nodes.push_back(0.0);
      r.weights.push_back(w[i]);
      continue;
    }
    r.nodes.push_back(-x[i]);
    r.weights.push_back(w[i]);
    r.nodes.push_back(x[i]);
    r.weights.push_back(w[i]);
  }
  return r;
}

} // namespace

GaussRule const& gauss_legendre(int points) {
  static GaussRule const r7 = build<7>(), r10 = build<10>(), r15 = build<15>(), r20 = build<20>(),
                         r25 = build<25>(), r30 = build<30>();
  switch (points) {
  case 7: return r7;
  case 10: return r10;
  case 15: return r15;
  case 20: return r20;
  case 25: return r25;
  case 30: return r30;
  default: throw InvalidArgument("gauss_legendre: unsupported order " + std::to_string(points));
  }
}

double integrate_panels(std::function<double(double)> const& f, double a, double b, int panels, int points) {
  if (panels < 1) throw InvalidArgument("integrate_panels: need at least one panel");
  auto const& g = gauss_legendre(points);
  double const h = (b - a) / panels;
  double total = 0;
  for (int p = 0; p < panels; ++p) {
    double const mid = a + (p + 0.5) * h;
    double acc = 0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) acc += g.weights[i] * f(mid + 0.5 * h * g.nodes[i]);
    total += 0.5 * h * acc;
  }
  return total;
}

double integrate_with_breaks(std::function<double(double)> const& f, double a, double b, std::vector<double> breaks,
                             int panels_per_piece, int points) {
  std::vector<double> cuts{a};
  std::sort(breaks.begin(), breaks.end());
  for (double c : breaks)
    if (c > cuts.back() && c < b) cuts.push_back(c);
  cuts.push_back(b);
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate_panels(f, cuts[i], cuts[i + 1], panels_per_piece, points);
  return total;
}

} // namespace freemult
