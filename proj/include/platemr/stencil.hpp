#pragma once

// Finite-difference Laplacian (Dirichlet) and bi-Laplacian (clamped) on the
// unit interval / square with n uniform interior nodes per axis,
// h = length / (n + 1). 2D unknowns are ordered row-major (axis 1 fastest).

#include <Eigen/SparseCore>

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace platemr {

using SparseOperator = Eigen::SparseMatrix<double>;

struct RectGrid {
  int dim = 1;
  int n = 0;
  double length = 1.0;

  double h() const { return length / (n + 1); }
  std::size_t size() const {
    return dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
  // Coordinates of interior node k.
  std::array<double, 2> node(std::size_t k) const;
};

RectGrid make_rect_grid(int dim, int n, double length = 1.0);

// 3-point / 5-point stencil, u = 0 on the boundary.
SparseOperator laplacian_dirichlet(const RectGrid& grid);

// 5-point / 13-point stencil for Delta^2 with u = 0 and du/dn = 0 enforced
// by the ghost reflection u_{-1} = u_1.
SparseOperator biharmonic_clamped(const RectGrid& grid);

// Matrix-free application of the clamped bi-Laplacian.
void apply_biharmonic(const RectGrid& grid, std::span<const double> u, std::span<double> out);
void apply_biharmonic_serial(const RectGrid& grid, std::span<const double> u, std::span<double> out);

// Samples f at the interior nodes.
std::vector<double> sample_interior(const RectGrid& grid, const std::function<double(double, double)>& f);

}  // namespace platemr
