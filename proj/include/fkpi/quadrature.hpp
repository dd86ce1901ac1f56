#pragma once

#include <span>
#include <vector>

namespace fkpi {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule from Newton iteration on P_n; exact for polynomials of degree 2n - 1.
GaussRule gauss_legendre(int n);

/// The rule mapped onto the panels [b0, b1], [b1, b2], ... (breakpoints ascending;
/// zero-width panels are skipped).
GaussRule composite_rule(const GaussRule& base, std::span<const double> breakpoints);

/// Equally spaced composite Simpson weights on n + 1 nodes with spacing h
/// (n even; n odd falls back to Simpson 3/8 on the last three intervals, n = 1 to the trapezoid).
std::vector<double> simpson_weights(int intervals, double h);

/// Ordinary least-squares slope of y against x; needs at least two distinct x values.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace fkpi
