#include "platemr/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "platemr/errors.hpp"

namespace platemr {

namespace {

using boost::math::quadrature::gauss;

double lagrange_eval(std::span<const double> t, std::span<const double> v, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double l = 1.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j != i) l *= (x - t[j]) / (t[i] - t[j]);
    }
    s += l * v[i];
  }
  return s;
}

// Monomial coefficients of the interpolant through (t_i, v_i).
std::array<double, 4> monomial_coefficients(std::span<const double> t, std::span<const double> v) {
  const std::size_t n = t.size();
  std::array<double, 4> dd{};
  for (std::size_t i = 0; i < n; ++i) dd[i] = v[i];
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = n - 1; i >= j; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (t[i] - t[i - j]);
      if (i == j) break;
    }
  }
  // Expand the Newton form from the innermost term.
  std::array<double, 4> c{};
  c[0] = dd[n - 1];
  std::size_t deg = 0;
  for (std::size_t k = n - 1; k-- > 0;) {
    // c <- c * (x - t_k) + dd[k]
    std::array<double, 4> nc{};
    for (std::size_t m = 0; m <= deg; ++m) {
      nc[m + 1] += c[m];
      nc[m] -= c[m] * t[k];
    }
    nc[0] += dd[k];
    c = nc;
    ++deg;
  }
  return c;
}

// J_k = int_r^{r+1} s^{g+k} ds
double shifted_moment(double r, double g, int k) {
  const double e = g + k + 1.0;
  if (std::abs(e) < 1e-14) return std::log((r + 1.0) / r);
  if (r == 0.0) {
    if (e <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / e;
  }
  return (std::pow(r + 1.0, e) - std::pow(r, e)) / e;
}

// int_0^1 P(tau) (r + tau)^g dtau, P given by nodes/values in tau.
double unit_cell(std::span<const double> tau, std::span<const double> v, double r, double g) {
  if (g == 0.0 || r >= 2.0) {
    auto f = [&](double x) { return lagrange_eval(tau, v, x) * (g == 0.0 ? 1.0 : std::pow(r + x, g)); };
    return gauss<double, 20>::integrate(f, 0.0, 1.0);
  }
  const auto c = monomial_coefficients(tau, v);
  static constexpr std::array<std::array<double, 4>, 4> binom{{{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}}};
  double total = 0.0;
  for (std::size_t m = 0; m < tau.size(); ++m) {
    if (c[m] == 0.0) continue;
    double im = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
      const double coef = binom[m][k] * std::pow(-r, static_cast<double>(m - k));
      if (coef == 0.0) continue;
      im += coef * shifted_moment(r, g, static_cast<int>(k));
    }
    total += c[m] * im;
  }
  return total;
}

}  // namespace

double weight_value(const WeightSpec& w, double x, double lower, double upper) {
  double d = x - lower;
  if (w.reference == WeightReference::domain_boundary_distance) d = std::min(d, upper - x);
  return std::pow(d, w.gamma);
}

double weighted_cell_integral(std::span<const double> nodes, std::span<const double> values,
                              double a, double b, double s, double gamma) {
  const double h = b - a;
  if (!(h > 0.0)) return 0.0;
  std::array<double, 4> tau{};
  const std::size_t n = nodes.size();
  if (n == 0 || n > 4) throw ArgumentError("cell interpolant needs 1..4 nodes");
  double r;
  if (s <= a) {
    r = (a - s) / h;
    for (std::size_t i = 0; i < n; ++i) tau[i] = (nodes[i] - a) / h;
  } else if (s >= b) {
    r = (s - b) / h;
    for (std::size_t i = 0; i < n; ++i) tau[i] = (b - nodes[i]) / h;
  } else {
    throw ArgumentError("singular point inside integration cell");
  }
  return std::pow(h, gamma + 1.0) * unit_cell(std::span<const double>(tau.data(), n), values, r, gamma);
}

double weighted_integral(const Grid1D& grid, std::span<const double> nodal, const WeightSpec& weight,
                         int degree) {
  const std::size_t n = grid.size();
  if (nodal.size() != n) throw ArgumentError("nodal values do not match grid size");
  if (n == 0) return 0.0;
  if (degree != 1 && degree != 3) throw ArgumentError("interpolation degree must be 1 or 3");
  const std::size_t npts = std::min<std::size_t>(static_cast<std::size_t>(degree) + 1, n);
  auto x = grid.nodes();
  const double lo = grid.lower();
  const double hi = grid.upper();
  const bool two_sided = weight.reference == WeightReference::domain_boundary_distance;
  const double mid = 0.5 * (lo + hi);

  auto stencil_start = [&](std::size_t cell_left) -> std::size_t {
    // cell_left: index of node at left of the cell; npts nodes centered on the cell
    std::ptrdiff_t s = static_cast<std::ptrdiff_t>(cell_left) - static_cast<std::ptrdiff_t>((npts - 1) / 2);
    if (s < 0) s = 0;
    if (static_cast<std::size_t>(s) + npts > n) s = static_cast<std::ptrdiff_t>(n - npts);
    return static_cast<std::size_t>(s);
  };

  auto integrate_piece = [&](std::size_t start, double a, double b) {
    auto xs = x.subspan(start, npts);
    auto vs = nodal.subspan(start, npts);
    if (!two_sided) return weighted_cell_integral(xs, vs, a, b, lo, weight.gamma);
    if (b <= mid) return weighted_cell_integral(xs, vs, a, b, lo, weight.gamma);
    if (a >= mid) return weighted_cell_integral(xs, vs, a, b, hi, weight.gamma);
    return weighted_cell_integral(xs, vs, a, mid, lo, weight.gamma) +
           weighted_cell_integral(xs, vs, mid, b, hi, weight.gamma);
  };

  double total = 0.0;
  if (x[0] > lo) total += integrate_piece(0, lo, x[0]);
  for (std::size_t j = 0; j + 1 < n; ++j) total += integrate_piece(stencil_start(j), x[j], x[j + 1]);
  if (x[n - 1] < hi) total += integrate_piece(n - npts, x[n - 1], hi);
  return total;
}

double weighted_integral(const GridTensor& grid, std::span<const double> nodal, const WeightSpec& weight0,
                         int degree) {
  const std::size_t n0 = grid.axis0.size();
  const std::size_t n1 = grid.axis1.size();
  if (nodal.size() != n0 * n1) throw ArgumentError("tensor nodal values size mismatch");
  std::vector<double> line(n0);
  const WeightSpec flat{0.0, WeightReference::halfspace_x1};
  for (std::size_t i = 0; i < n0; ++i) {
    line[i] = weighted_integral(grid.axis1, nodal.subspan(i * n1, n1), flat, degree);
  }
  return weighted_integral(grid.axis0, line, weight0, degree);
}

double power_mean(double beta, double a, double b) {
  if (!(b > a) || a < 0.0) throw ArgumentError("power_mean needs 0 <= a < b");
  const std::array<double, 1> node{a};
  const std::array<double, 1> one{1.0};
  return weighted_cell_integral(node, one, a, b, 0.0, beta) / (b - a);
}

}  // namespace platemr
