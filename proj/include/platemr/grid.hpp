#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <span>
#include <vector>

namespace platemr {

// Ordered sample nodes on [lower, upper]. Graded grids cluster nodes toward
// `lower` as x_j = lower + (upper - lower) (j/n)^g and keep every node
// strictly inside the interval.
class Grid1D {
 public:
  Grid1D(double lower, double upper, std::vector<double> nodes, double grading = 1.0);

  // n cells, nodes j = 1..n-1 (strictly interior).
  static Grid1D graded(double length, int n, double grading = 2.0);
  // Uniform interior nodes lower + j h, j = 1..n, h = (upper - lower)/(n + 1).
  static Grid1D uniform_interior(double lower, double upper, int n);
  // Uniform nodes including both endpoints, n + 1 nodes.
  static Grid1D uniform_closed(double lower, double upper, int n);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double grading() const { return grading_; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }

 private:
  double lower_;
  double upper_;
  double grading_;
  std::vector<double> nodes_;
};

// Tensor product grid, axis 0 is the normal direction x1.
struct GridTensor {
  Grid1D axis0;
  Grid1D axis1;
  std::size_t size() const { return axis0.size() * axis1.size(); }
  std::size_t index(std::size_t i0, std::size_t i1) const { return i0 * axis1.size() + i1; }
};

// Finite-difference weights for d^order/dx^order at x0 from `stencil`
// (Fornberg's recursion).
std::vector<double> fd_weights(double x0, std::span<const double> stencil, int order);

// Sparse derivative matrix of the given order on the grid nodes: centered
// stencils of second-order accuracy, shifted one-sided near the ends.
Eigen::SparseMatrix<double> diff_matrix(const Grid1D& grid, int order);

// Derivative along one axis of a tensor field (row-major, axis1 fastest).
std::vector<double> tensor_derivative(const GridTensor& grid, std::span<const double> values,
                                      int order0, int order1);

}  // namespace platemr
