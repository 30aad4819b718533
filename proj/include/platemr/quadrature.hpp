#pragma once

#include <span>

#include "platemr/grid.hpp"

namespace platemr {

enum class WeightReference { halfspace_x1, domain_boundary_distance };

// Power weight dist(x, boundary)^gamma. For halfspace_x1 the boundary is the
// lower end of the grid interval; domain_boundary_distance uses both ends.
struct WeightSpec {
  double gamma = 0.0;
  WeightReference reference = WeightReference::halfspace_x1;
};

double weight_value(const WeightSpec& w, double x, double lower, double upper);

// Integral over [a, b] of P(x) |x - s|^gamma where P interpolates `values`
// at `nodes` and the singular point s lies outside (a, b). Moments of the
// power weight are exact near s, Gauss-Legendre otherwise.
double weighted_cell_integral(std::span<const double> nodes, std::span<const double> values,
                              double a, double b, double singular_point, double gamma);

// Integral over [lower, upper] of the piecewise-polynomial interpolant of the
// nodal values times the weight. `degree` is 1 or 3; cells outside the first
// and last node are covered by extrapolating the end interpolant.
double weighted_integral(const Grid1D& grid, std::span<const double> nodal, const WeightSpec& weight,
                         int degree = 3);

// Tensor version: unweighted along axis 1, weighted along axis 0.
double weighted_integral(const GridTensor& grid, std::span<const double> nodal,
                         const WeightSpec& weight0, int degree = 3);

// Exact mean of x^beta over [a, b] with 0 <= a < b (infinite when it diverges).
double power_mean(double beta, double a, double b);

}  // namespace platemr
