#pragma once

// Perturbation B = A^Phi - A where A^Phi = Phi_* A (Phi^{-1})_* is the plate
// operator transported to the half-space by the boundary-straightening map.
// With a_j = d_j h2, the transported derivatives are
//   D_1 = (1 + a_1)^{-1} d_1,   D_2 = d_2 - a_2 (1 + a_1)^{-1} d_1,
// and Delta^Phi = D_1 D_1 + D_2 D_2. Only the second row of B is nonzero:
//   (B(u, w))_2 = ((Delta^Phi)^2 - Delta^2) u - rho (Delta^Phi - Delta) w.

#include <functional>
#include <string>
#include <vector>

#include "platemr/geometry.hpp"
#include "platemr/grid.hpp"
#include "platemr/stencil.hpp"

namespace platemr {

struct MappedLaplacian {
  SparseOperator plain;   // d_1 d_1 + d_2 d_2
  SparseOperator mapped;  // D_1 D_1 + D_2 D_2
};

// On a half-space tensor grid (axis 0 = y1 > 0, axis 1 = y~), both built
// from the same first-derivative stencils so that h = 0 gives identical
// matrices.
MappedLaplacian mapped_laplacian(const GridTensor& grid, const PullbackMap& map);

struct DefectField {
  std::string name;
  std::function<double(double, double)> u;  // clamped: u = d1 u = 0 at y1 = 0
  std::function<double(double, double)> w;
};

std::vector<DefectField> defect_field_suite();

struct DefectOptions {
  int k = 2;
  double p = 2.0;
  double gamma = 0.5;
};

struct DefectReport {
  double ratio;                 // max over the suite
  std::vector<double> per_field;
};

// max over the suite of |B(u, w)|_X / |(u, w)|_D with
//   X second component W^{k-2,p}(w_{gamma+kp}),
//   D = W^{k+2,p}(w_{gamma+kp}) x W^{k,p}(w_{gamma+kp}).
DefectReport mapped_operator_defect(const GridTensor& grid, const PullbackMap& map, double rho,
                                    const std::vector<DefectField>& suite, const DefectOptions& options = {});

struct ScalingFit {
  double slope;
  std::vector<double> seminorms;
  std::vector<double> ratios;
};

// Log-log slope of the defect against the seminorm of a scaled profile.
ScalingFit defect_scaling(const GridTensor& grid, const std::string& profile, std::span<const double> seminorms,
                          double rho, double c = 0.25, const DefectOptions& options = {});

// Default half-space grid: graded y1 in (0, depth], uniform y~ in [-width, width].
GridTensor defect_grid(int n1, int n2, double depth = 8.0, double width = 4.0);

}  // namespace platemr
