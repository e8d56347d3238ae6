#pragma once

#include <functional>
#include <vector>

namespace freemult {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Supported orders: 7, 10, 15, 20, 25, 30.
GaussRule const& gauss_legendre(int points);

/// Integral of f over [a, b] split into `panels` equal panels.
double integrate_panels(std::function<double(double)> const& f, double a, double b, int panels, int points = 20);

/// Same, with additional forced breakpoints inside (a, b).
double integrate_with_breaks(std::function<double(double)> const& f, double a, double b, std::vector<double> breaks,
                             int panels_per_piece, int points = 20);

} // namespace freemult
