#pragma once

// Closed-form algebra of the damped-plate quadratic pencil
//   V(lambda) = lambda^2 + lambda * rho * sqrt(b) + b
// and of the 2x2 matrix symbol of the first-order operator
//   A = [[0, -I], [Delta^2, -rho Delta]].

#include <Eigen/Core>

#include <complex>
#include <span>

namespace platemr {

using Complex = std::complex<double>;
using SymbolMatrix = Eigen::Matrix2cd;

// Damping strength rho > 0. Construction validates the range.
class DampingParam {
 public:
  explicit DampingParam(double rho);
  double value() const { return rho_; }

 private:
  double rho_;
};

struct PencilRoots {
  Complex plus;
  Complex minus;
};

// Roots alpha_+ and alpha_- of z^2 - rho z + 1. For rho < 2 they lie on the
// unit circle, for rho >= 2 they are positive reals. The real branch is used
// at rho == 2 where both formulas give (1, 1).
PencilRoots pencil_roots(double rho);

// theta(rho) = arg(alpha_+): arctan((2/rho) sqrt(1 - rho^2/4)) below 2, zero
// from 2 on. Decreases from pi/2 (rho -> 0) to 0.
double damping_angle(double rho);

Complex pencil_value(Complex lambda, double b, double rho);

// Matrix symbol A(xi) = [[0, -1], [|xi|^4, rho |xi|^2]].
SymbolMatrix symbol(std::span<const double> xi, double rho);
SymbolMatrix symbol_from_norm2(double xi2, double rho);

// A(xi, lambda)^{-1} where A(xi, lambda) = lambda I + A(xi). Throws
// SingularityError when one of the two pencil factors
// (alpha_+/- lambda + |xi|^2) drops below 1e-300 in modulus.
SymbolMatrix symbol_resolvent(std::span<const double> xi, Complex lambda, double rho);
SymbolMatrix symbol_resolvent_from_norm2(double xi2, Complex lambda, double rho);

// det A(xi, lambda) in factored form (alpha_+ lambda + |xi|^2)(alpha_- lambda + |xi|^2).
Complex symbol_determinant(double xi2, Complex lambda, double rho);

// Eigenvalues |xi|^2 alpha_+/-  of the symbol (closed form).
PencilRoots symbol_eigenvalues(double xi2, double rho);

// Open sector {z != 0 : |arg z| < omega}, principal argument.
bool sector_contains(Complex z, double omega);

}  // namespace platemr
