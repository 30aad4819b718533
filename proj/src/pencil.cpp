#include "platemr/pencil.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "platemr/errors.hpp"

namespace platemr {

namespace {

void require_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw DomainError("damping parameter must satisfy rho > 0, got " + std::to_string(rho));
  }
}

double norm2(std::span<const double> xi) {
  double s = 0.0;
  for (double v : xi) s += v * v;
  return s;
}

constexpr double kSingularThreshold = 1e-300;

}  // namespace

DampingParam::DampingParam(double rho) : rho_(rho) { require_rho(rho); }

PencilRoots pencil_roots(double rho) {
  require_rho(rho);
  const double half = 0.5 * rho;
  if (rho < 2.0) {
    const double im = std::sqrt(1.0 - half * half);
    return {Complex(half, im), Complex(half, -im)};
  }
  // alpha_- = 1/alpha_+ avoids cancellation in rho/2 - sqrt(rho^2/4 - 1).
  const double plus = half + std::sqrt(half * half - 1.0);
  return {Complex(plus, 0.0), Complex(1.0 / plus, 0.0)};
}

double damping_angle(double rho) {
  require_rho(rho);
  if (rho >= 2.0) return 0.0;
  return std::atan((2.0 / rho) * std::sqrt(1.0 - 0.25 * rho * rho));
}

Complex pencil_value(Complex lambda, double b, double rho) {
  require_rho(rho);
  if (!(b > 0.0)) throw DomainError("pencil_value requires b > 0");
  return lambda * lambda + lambda * rho * std::sqrt(b) + b;
}

SymbolMatrix symbol_from_norm2(double xi2, double rho) {
  require_rho(rho);
  SymbolMatrix m;
  m << 0.0, -1.0, xi2 * xi2, rho * xi2;
  return m;
}

SymbolMatrix symbol(std::span<const double> xi, double rho) {
  return symbol_from_norm2(norm2(xi), rho);
}

Complex symbol_determinant(double xi2, Complex lambda, double rho) {
  const PencilRoots r = pencil_roots(rho);
  return (r.plus * lambda + xi2) * (r.minus * lambda + xi2);
}

SymbolMatrix symbol_resolvent_from_norm2(double xi2, Complex lambda, double rho) {
  const PencilRoots r = pencil_roots(rho);
  const Complex fp = r.plus * lambda + xi2;
  const Complex fm = r.minus * lambda + xi2;
  if (std::abs(fp) < kSingularThreshold) {
    throw SingularityError("symbol resolvent singular: alpha_plus*lambda + |xi|^2 = 0 at |xi|^2=" +
                           std::to_string(xi2));
  }
  if (std::abs(fm) < kSingularThreshold) {
    throw SingularityError("symbol resolvent singular: alpha_minus*lambda + |xi|^2 = 0 at |xi|^2=" +
                           std::to_string(xi2));
  }
  const Complex inv_det = 1.0 / (fp * fm);
  SymbolMatrix m;
  m << (lambda + rho * xi2) * inv_det, inv_det, -xi2 * xi2 * inv_det, lambda * inv_det;
  return m;
}

SymbolMatrix symbol_resolvent(std::span<const double> xi, Complex lambda, double rho) {
  return symbol_resolvent_from_norm2(norm2(xi), lambda, rho);
}

PencilRoots symbol_eigenvalues(double xi2, double rho) {
  const PencilRoots r = pencil_roots(rho);
  return {xi2 * r.plus, xi2 * r.minus};
}

bool sector_contains(Complex z, double omega) {
  if (z == Complex(0.0, 0.0)) return false;
  return std::abs(std::arg(z)) < omega;
}

}  // namespace platemr
