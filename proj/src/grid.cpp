#include "platemr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "platemr/errors.hpp"

namespace platemr {

Grid1D::Grid1D(double lower, double upper, std::vector<double> nodes, double grading)
    : lower_(lower), upper_(upper), grading_(grading), nodes_(std::move(nodes)) {
  if (!(upper > lower)) throw ArgumentError("grid interval must satisfy lower < upper");
  if (grading < 1.0) throw ArgumentError("grading exponent must be >= 1");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i] < lower || nodes_[i] > upper) {
      throw ArgumentError("grid node " + std::to_string(i) + " outside [lower, upper]");
    }
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      throw ArgumentError("grid nodes must be strictly increasing");
    }
  }
}

Grid1D Grid1D::graded(double length, int n, double grading) {
  if (n < 2) throw ArgumentError("graded grid needs n >= 2 cells");
  std::vector<double> x(static_cast<std::size_t>(n - 1));
  for (int j = 1; j < n; ++j) {
    x[static_cast<std::size_t>(j - 1)] = length * std::pow(static_cast<double>(j) / n, grading);
  }
  return Grid1D(0.0, length, std::move(x), grading);
}

Grid1D Grid1D::uniform_interior(double lower, double upper, int n) {
  if (n < 1) throw ArgumentError("uniform grid needs n >= 1 nodes");
  const double h = (upper - lower) / (n + 1);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = lower + (j + 1) * h;
  return Grid1D(lower, upper, std::move(x), 1.0);
}

Grid1D Grid1D::uniform_closed(double lower, double upper, int n) {
  if (n < 1) throw ArgumentError("uniform grid needs n >= 1 cells");
  const double h = (upper - lower) / n;
  std::vector<double> x(static_cast<std::size_t>(n + 1));
  for (int j = 0; j <= n; ++j) x[static_cast<std::size_t>(j)] = lower + j * h;
  x.back() = upper;
  return Grid1D(lower, upper, std::move(x), 1.0);
}

std::vector<double> fd_weights(double x0, std::span<const double> stencil, int order) {
  const int n = static_cast<int>(stencil.size()) - 1;
  if (order > n) throw ArgumentError("stencil too small for derivative order");
  // c[i][k]: weight of node i for derivative k.
  std::vector<std::vector<double>> c(stencil.size(), std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = stencil[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = stencil[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = stencil[i] - stencil[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(stencil.size());
  for (std::size_t i = 0; i < stencil.size(); ++i) w[i] = c[i][order];
  return w;
}

Eigen::SparseMatrix<double> diff_matrix(const Grid1D& grid, int order) {
  const int n = static_cast<int>(grid.size());
  Eigen::SparseMatrix<double> d(n, n);
  if (order == 0) {
    d.setIdentity();
    return d;
  }
  const int width = 2 * ((order + 1) / 2) + 1;
  if (n < width + 1) {
    throw ArgumentError("grid has " + std::to_string(n) + " nodes, derivative of order " +
                        std::to_string(order) + " needs at least " + std::to_string(width + 1));
  }
  const int half = width / 2;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (width + 1));
  auto nodes = grid.nodes();
  for (int i = 0; i < n; ++i) {
    int start = i - half;
    int len = width;
    if (start < 0) {
      start = 0;
      len = width + 1;
    } else if (start + width > n) {
      len = width + 1;
      start = n - len;
    }
    auto w = fd_weights(nodes[i], nodes.subspan(static_cast<std::size_t>(start), static_cast<std::size_t>(len)),
                        order);
    for (int j = 0; j < len; ++j) trips.emplace_back(i, start + j, w[static_cast<std::size_t>(j)]);
  }
  d.setFromTriplets(trips.begin(), trips.end());
  return d;
}

std::vector<double> tensor_derivative(const GridTensor& grid, std::span<const double> values,
                                      int order0, int order1) {
  const std::size_t n0 = grid.axis0.size();
  const std::size_t n1 = grid.axis1.size();
  if (values.size() != n0 * n1) throw ArgumentError("tensor field size mismatch");
  Eigen::Map<const Eigen::MatrixXd> in(values.data(), static_cast<Eigen::Index>(n1),
                                       static_cast<Eigen::Index>(n0));
  // Column-major map of the row-major field: column i0 holds the x1-line.
  Eigen::MatrixXd out = in;
  if (order1 > 0) {
    Eigen::SparseMatrix<double> d1 = diff_matrix(grid.axis1, order1);
    out = d1 * out;
  }
  if (order0 > 0) {
    Eigen::SparseMatrix<double> d0 = diff_matrix(grid.axis0, order0);
    Eigen::MatrixXd t = out.transpose();
    out = (d0 * t).transpose();
  }
  return std::vector<double>(out.data(), out.data() + out.size());
}

}  // namespace platemr
