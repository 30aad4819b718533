#pragma once

// Block operator A_eta = [[0, -I], [eta I + B, -rho L]] on (u, w) built from
// the discrete Dirichlet Laplacian L and clamped bi-Laplacian B, its spectrum
// and resolvent estimates along rays.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "platemr/pencil.hpp"
#include "platemr/stencil.hpp"

namespace platemr {

struct BlockOperatorA {
  SparseOperator L;
  SparseOperator B;
  double rho = 1.0;
  double eta = 0.0;
  SparseOperator matrix;  // 2N x 2N

  Eigen::Index block_size() const { return L.rows(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix * x; }
};

BlockOperatorA assemble_A(const SparseOperator& L, const SparseOperator& B, double rho, double eta = 0.0);
BlockOperatorA assemble_A(const RectGrid& grid, double rho, double eta = 0.0);

struct SpectrumReport {
  std::vector<Complex> eigenvalues;  // ascending real part, then imaginary part
  double min_real;
  double conjugate_pairing_residual;  // max_i min_j |lambda_j - conj(lambda_i)| / max(1, |lambda_i|)
  std::size_t dimension;
};

// Complete dense eigensolve (dimension <= 4000); returns the `count`
// eigenvalues of smallest real part (all when count == 0).
SpectrumReport spectrum(const BlockOperatorA& a, std::size_t count = 0);

// Smallest eigenvalues of a symmetric sparse operator by dense solve.
std::vector<double> symmetric_eigenvalues(const SparseOperator& m);

enum class ScanNorm { euclidean, energy };

ScanNorm parse_scan_norm(const std::string& name);
std::string to_string(ScanNorm n);

struct RaySample {
  Complex mu;      // r e^{+-i (pi - sigma)}
  Complex lambda;  // lambda0 + mu
  double norm;     // || mu (mu + lambda0 + A)^{-1} ||
};

struct ResolventScanReport {
  double lambda0;
  double sigma;
  ScanNorm norm;
  std::vector<RaySample> samples;
  double sup;
};

// Rays mu = r e^{+-i (pi - sigma)} for r in `magnitudes` (positive,
// increasing). The energy norm is |(u, w)|^2 = u^T B u + w^T w (grid-scaled
// constants cancel in operator norms).
ResolventScanReport resolvent_ray_scan(const BlockOperatorA& a, double lambda0, double sigma,
                                       std::span<const double> magnitudes, ScanNorm norm = ScanNorm::energy);

// Dense mu (mu + lambda0 + A)^{-1} in the coordinates of the chosen norm.
Eigen::MatrixXcd scaled_resolvent(const BlockOperatorA& a, Complex mu, double lambda0, ScanNorm norm);

}  // namespace platemr
