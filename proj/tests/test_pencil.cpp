#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "platemr/errors.hpp"
#include "platemr/pencil.hpp"

using namespace platemr;

namespace {

// Roots of mu^2 - t mu + d = 0 by the quadratic formula; independent of the
// pencil-root route used by the library.
std::pair<Complex, Complex> quadratic_roots(Complex t, Complex d) {
  const Complex disc = std::sqrt(t * t - 4.0 * d);
  return {(t + disc) / 2.0, (t - disc) / 2.0};
}

}  // namespace

TEST_CASE("pencil roots on both branches") {
  auto r2 = pencil_roots(2.0);
  CHECK(r2.plus == Complex(1.0, 0.0));
  CHECK(r2.minus == Complex(1.0, 0.0));

  const double s = std::sqrt(2.0);
  auto r = pencil_roots(s);
  CHECK(std::abs(r.plus - Complex(s / 2, s / 2)) < 1e-15);
  CHECK(std::abs(r.minus - Complex(s / 2, -s / 2)) < 1e-15);

  CHECK_THROWS_AS(pencil_roots(0.0), DomainError);
  CHECK_THROWS_AS(pencil_roots(-1.0), DomainError);
  CHECK_THROWS_AS(DampingParam(-0.5), DomainError);
}

TEST_CASE("pencil root identities over a sweep") {
  for (int i = 1; i <= 2000; ++i) {
    const double rho = 0.005 * i;
    auto r = pencil_roots(rho);
    CHECK(std::abs(r.plus * r.minus - 1.0) <= 1e-12);
    CHECK(std::abs(r.plus + r.minus - rho) <= 1e-12);
    if (rho < 2.0) {
      CHECK(std::abs(std::abs(r.plus) - 1.0) <= 1e-15);
      CHECK(std::abs(std::abs(r.minus) - 1.0) <= 1e-15);
    } else {
      CHECK(r.plus.imag() == 0.0);
      CHECK(r.minus.real() >= 0.0);
    }
    CHECK(std::abs(std::arg(r.plus) - damping_angle(rho)) <= 1e-12);
  }
}

TEST_CASE("damping angle values and monotonicity") {
  CHECK(damping_angle(2.0) == 0.0);
  CHECK(damping_angle(5.0) == 0.0);
  CHECK(damping_angle(std::sqrt(2.0)) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
  CHECK(damping_angle(0.01) > 1.56);
  CHECK(damping_angle(0.01) < std::numbers::pi / 2);
  double prev = damping_angle(2e-3);
  for (int i = 2; i <= 1000; ++i) {
    const double th = damping_angle(2.0 * i / 1000.0);
    if (i < 1000) CHECK(th < prev);
    prev = th;
  }
  // continuity at rho = 2 from the left
  CHECK(damping_angle(2.0 - 1e-10) < 1e-4);
  CHECK_THROWS_AS(damping_angle(0.0), DomainError);
}

TEST_CASE("pencil value and factorisation") {
  CHECK(pencil_value({0.0, 0.0}, 4.0, 1.0) == Complex(4.0, 0.0));
  CHECK(std::abs(pencil_value({1.0, 0.0}, 1.0, 2.0) - 4.0) < 1e-15);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.01, 5.0);
  for (int i = 0; i < 100; ++i) {
    const Complex lam(u(rng), u(rng));
    const double b = pos(rng);
    const double rho = pos(rng);
    auto r = pencil_roots(rho);
    const Complex v = pencil_value(lam, b, rho);
    const Complex f = (r.plus * lam + std::sqrt(b)) * (r.minus * lam + std::sqrt(b));
    CHECK(std::abs(v - f) <= 1e-12 * std::max(1.0, std::abs(v)));
  }
  CHECK_THROWS_AS(pencil_value({1.0, 0.0}, 0.0, 1.0), DomainError);
}

TEST_CASE("symbol entries and eigen-angles") {
  const double zero[2] = {0.0, 0.0};
  auto a0 = symbol(zero, 1.0);
  CHECK(a0(0, 0) == Complex(0.0));
  CHECK(a0(0, 1) == Complex(-1.0));
  CHECK(a0(1, 0) == Complex(0.0));
  CHECK(a0(1, 1) == Complex(0.0));

  const double unit[1] = {1.0};
  auto a1 = symbol(unit, 1.0);
  CHECK(a1(1, 0) == Complex(1.0));
  CHECK(a1(1, 1) == Complex(1.0));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0), rr(0.05, 1.99);
  for (int i = 0; i < 200; ++i) {
    const double xi[2] = {u(rng), u(rng)};
    const double rho = rr(rng);
    const double xi2 = xi[0] * xi[0] + xi[1] * xi[1];
    auto m = symbol(xi, rho);
    auto [e1, e2] = quadratic_roots(m.trace(), m.determinant());
    CHECK(std::abs(std::abs(std::arg(e1)) - damping_angle(rho)) <= 1e-10);
    CHECK(std::abs(std::abs(std::arg(e2)) - damping_angle(rho)) <= 1e-10);
    CHECK(std::abs(std::abs(e1) - xi2) <= 1e-12 * std::max(1.0, xi2));
    auto closed = symbol_eigenvalues(xi2, rho);
    CHECK(std::abs(closed.plus * closed.minus - e1 * e2) <= 1e-12 * std::max(1.0, xi2 * xi2));
  }
}

TEST_CASE("symbol resolvent") {
  const double zero[1] = {0.0};
  auto r = symbol_resolvent(zero, {1.0, 0.0}, 1.0);
  CHECK(std::abs(r(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(r(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(r(1, 0)) < 1e-15);
  CHECK(std::abs(r(1, 1) - 1.0) < 1e-15);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0), mag(0.1, 10.0), rr(0.05, 6.0), ang(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double xi[2] = {u(rng), u(rng)};
    const double rho = rr(rng);
    const double sigma = damping_angle(rho) + 0.05;
    const Complex lam = std::polar(mag(rng), ang(rng) * (std::numbers::pi - sigma));
    const double xi2 = xi[0] * xi[0] + xi[1] * xi[1];
    SymbolMatrix a = symbol(xi, rho) + lam * SymbolMatrix::Identity();
    SymbolMatrix inv = symbol_resolvent(xi, lam, rho);
    CHECK((a * inv - SymbolMatrix::Identity()).norm() <= 1e-12);
    // Eigen's LU inverse as the second route.
    CHECK((inv - a.inverse()).norm() <= 1e-12 * inv.norm());
    const Complex det = a.determinant();
    CHECK(std::abs(det - symbol_determinant(xi2, lam, rho)) <= 1e-12 * std::abs(det));
  }

  // rho = 2 gives alpha_+- = 1 exactly, so lambda = -|xi|^2 zeroes both factors without rounding;
  // (-1/alpha_+ at other rho only cancels to roundoff, which the 1e-300 threshold does not catch)
  const Complex bad = -1.0;
  const double one[1] = {1.0};
  CHECK_THROWS_AS(symbol_resolvent(one, bad, 2.0), SingularityError);
  try {
    symbol_resolvent(one, bad, 2.0);
  } catch (const SingularityError& e) {
    CHECK(std::string(e.what()).find("alpha_") != std::string::npos);
  }
}

TEST_CASE("sector membership") {
  CHECK(sector_contains({1.0, 0.0}, std::numbers::pi / 4));
  CHECK_FALSE(sector_contains({0.0, 1.0}, std::numbers::pi / 4));
  CHECK_FALSE(sector_contains({0.0, 0.0}, 3.0));
  CHECK_FALSE(sector_contains({0.0, 0.0}, 0.1));
  // open sector: boundary ray excluded
  CHECK_FALSE(sector_contains(std::polar(1.0, 0.5), 0.5));
  CHECK(sector_contains({-1.0, 0.0}, 3.2));
}
