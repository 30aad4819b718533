#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "platemr/errors.hpp"
#include "platemr/weighted.hpp"

using namespace platemr;

namespace {

const WeightSpec kFlat{0.0, WeightReference::halfspace_x1};

SmoothFunction2D sin_sin() {
  return {[](long double x, long double y, int a, int b) {
    // d^a sin(x) = sin(x + a pi/2)
    const long double q = std::numbers::pi_v<long double> / 2;
    return std::sin(x + a * q) * std::sin(y + b * q);
  }};
}

// x^i y^j with analytic derivatives
SmoothFunction2D monomial(int i, int j) {
  return {[=](long double x, long double y, int a, int b) -> long double {
    if (a > i || b > j) return 0.0L;
    long double cx = 1.0L, cy = 1.0L;
    for (int k = 0; k < a; ++k) cx *= (i - k);
    for (int k = 0; k < b; ++k) cy *= (j - k);
    return cx * std::pow(x, i - a) * cy * std::pow(y, j - b);
  }};
}

}  // namespace

TEST_CASE("weighted integral reproduces power moments") {
  // int_0^1 x^g x^m dx = 1/(g+m+1), exact for cubic interpolants on any grid
  for (double g : {-0.9, -0.5, 0.0, 0.5, 1.7, 4.5}) {
    Grid1D grid = Grid1D::graded(1.0, 16, 2.0);
    for (int m = 0; m <= 3; ++m) {
      auto f = GridField::sample(grid, [m](double x) { return std::pow(x, m); });
      const double v = weighted_integral(grid, f.values, {g, WeightReference::halfspace_x1});
      CHECK(v == doctest::Approx(1.0 / (g + m + 1.0)).epsilon(1e-12));
    }
  }
  // two-sided distance weight: int_0^1 min(x,1-x)^g dx = 2 (1/2)^{g+1}/(g+1)
  Grid1D u = Grid1D::uniform_interior(0.0, 1.0, 41);
  std::vector<double> ones(u.size(), 1.0);
  for (double g : {-0.5, 0.5, 4.5}) {
    const double v = weighted_integral(u, ones, {g, WeightReference::domain_boundary_distance});
    CHECK(v == doctest::Approx(2.0 * std::pow(0.5, g + 1.0) / (g + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("weighted Sobolev norm oracles for exp(-x)") {
  Grid1D grid = Grid1D::graded(40.0, 2049, 2.0);
  REQUIRE(grid.size() == 2048);
  auto f = GridField::sample(grid, [](double x) { return std::exp(-x); });
  const double n0 = weighted_sobolev_norm(f, {0, 2.0, {0.0, WeightReference::halfspace_x1}});
  CHECK(std::abs(n0 * n0 - 0.5) <= 1e-8);
  const double n1 = weighted_sobolev_norm(f, {0, 2.0, {1.0, WeightReference::halfspace_x1}});
  CHECK(std::abs(n1 * n1 - 0.25) <= 1e-8);
  // W^1: int e^{-2x} + int e^{-2x} = 1 (derivative by finite differences)
  const double w1 = weighted_sobolev_norm(f, {1, 2.0, kFlat});
  CHECK(std::abs(w1 * w1 - 1.0) <= 1e-5);

  auto zero = GridField::sample(grid, [](double) { return 0.0; });
  CHECK(weighted_sobolev_norm(zero, {2, 2.0, kFlat}) == 0.0);
  CHECK_THROWS_AS(weighted_sobolev_norm(f, {-1, 2.0, kFlat}), DomainError);
  CHECK_THROWS_AS(weighted_sobolev_norm(f, {0, 1.0, kFlat}), DomainError);
}

TEST_CASE("Hardy ratio") {
  Grid1D grid = Grid1D::graded(40.0, 2049, 2.0);
  auto f = GridField::sample(grid, [](double x) { return x * std::exp(-x); });
  const double r = hardy_ratio(f, 2.0, 0.0);
  CHECK(std::abs(r - std::sqrt(2.0)) <= 1e-3);
  CHECK(r <= 2.0);

  for (double g = -0.9; g < 0.95; g += 0.1) {
    CHECK(hardy_ratio(f, 2.0, g) <= hardy_bound(2.0, g) * (1.0 + 1e-3));
  }
  for (double p : {1.5, 3.0}) {
    for (double g : {-0.5, 0.0, 0.3}) CHECK(hardy_ratio(f, p, g) <= hardy_bound(p, g) * (1.0 + 1e-3));
  }

  auto bump = GridField::sample(grid, [](double x) {
    if (x <= 1.0 || x >= 2.0) return 0.0;
    const double t = 2.0 * x - 3.0;
    return std::exp(-1.0 / (1.0 - t * t));
  });
  const double rb = hardy_ratio(bump, 2.0, 0.0);
  CHECK(std::isfinite(rb));
  CHECK(rb <= 2.0);

  CHECK_THROWS_AS(hardy_ratio(f, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(hardy_ratio(f, 2.0, 1.5), DomainError);

  // constant nonzero quotient with flat derivative cannot happen for real
  // fields; a zero field gives ratio 0
  auto zero = GridField::sample(grid, [](double) { return 0.0; });
  CHECK(hardy_ratio(zero, 2.0, 0.0) == 0.0);
}

TEST_CASE("A_p membership") {
  std::vector<Interval> dyadic;
  for (int j = 1; j <= 20; ++j) dyadic.push_back({std::ldexp(1.0, -j), std::ldexp(1.0, -j + 1)});

  auto flat = ap_membership(0.0, 2.0, dyadic);
  CHECK(flat.verdict);
  CHECK(flat.characteristic == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ap_membership(0.0, 3.0, dyadic).characteristic == doctest::Approx(1.0).epsilon(1e-13));

  auto half = ap_membership(0.5, 2.0, dyadic);
  CHECK(half.verdict);
  CHECK(std::isfinite(half.characteristic));
  CHECK(half.characteristic < 2.0);

  // independent quadrature oracle for one interval
  boost::math::quadrature::tanh_sinh<double> ts;
  const double a = 0.25, b = 1.25;
  const double mw = ts.integrate([](double x) { return std::pow(x, 0.5); }, a, b) / (b - a);
  const double md = ts.integrate([](double x) { return std::pow(x, -0.5); }, a, b) / (b - a);
  const Interval one[1] = {{a, b}};
  CHECK(ap_membership(0.5, 2.0, one).characteristic == doctest::Approx(mw * md).epsilon(1e-12));

  CHECK_FALSE(ap_membership(1.5, 2.0, dyadic).verdict);
  CHECK_FALSE(ap_membership(-1.0, 2.0, dyadic).verdict);
  double prev = 0.0;
  for (int j = 1; j <= 8; ++j) {
    const Interval ball[1] = {{std::pow(10.0, -j), std::pow(10.0, -j) + 1.0}};
    const double c = ap_membership(1.5, 2.0, ball).characteristic;
    CHECK(c > prev);
    prev = c;
  }
  CHECK(prev > 1e3);
  const Interval touching[1] = {{0.0, 1.0}};
  CHECK(std::isinf(ap_membership(1.5, 2.0, touching).characteristic));

  CHECK_THROWS_AS(ap_membership(0.5, 2.0, std::span<const Interval>{}), ArgumentError);
}

TEST_CASE("multiplication operator") {
  Grid1D grid = Grid1D::graded(40.0, 1025, 2.0);
  auto f = GridField::sample(grid, [](double x) { return std::exp(-x) * (1.0 + std::sin(x)); });
  auto same = apply_M(f, 0.0);
  CHECK(same.values == f.values);
  auto back = apply_M(apply_M(f, 0.7), -0.7);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    CHECK(back.values[i] == doctest::Approx(f.values[i]).epsilon(1e-14));
  }
  for (double p : {1.5, 2.0, 3.0}) {
    for (double g : {-0.5, 0.0, 0.5}) {
      auto mf = apply_M(f, 1.0);
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double x = grid[i];
        const double lhs = std::pow(std::abs(mf.values[i]), p) * std::pow(x, g);
        const double rhs = std::pow(std::abs(f.values[i]), p) * std::pow(x, g + p);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
      }
      const double a = weighted_sobolev_norm(mf, {0, p, {g, WeightReference::halfspace_x1}});
      const double b = weighted_sobolev_norm(f, {0, p, {g + p, WeightReference::halfspace_x1}});
      CHECK(a == doctest::Approx(b).epsilon(1e-8));
    }
  }
}

TEST_CASE("norm monotonicity constant is refinement stable") {
  auto suite = halfline_field_suite(20);
  for (int k : {0, 1}) {
    double prev = 0.0;
    for (int n : {513, 1025, 2049}) {
      Grid1D grid = Grid1D::graded(40.0, n, 2.0);
      auto r = norm_monotonicity_ratios(grid, suite, k, 2.0, 0.5);
      CHECK(r.max < 10.0);
      if (prev > 0.0) CHECK(std::abs(r.max / prev - 1.0) < 0.05);
      prev = r.max;
    }
  }
}

TEST_CASE("multiplication equivalence constants") {
  auto suite = halfline_field_suite(20);
  Grid1D grid = Grid1D::graded(40.0, 1025, 2.0);
  for (int k : {0, 1, 2}) {
    auto r = multiplication_equivalence_ratios(grid, suite, k, 2.0, 0.5);
    const double c = std::max(r.max, 1.0 / r.min);
    CHECK(r.min > 0.0);
    CHECK(c < 20.0);
  }
}

TEST_CASE("commutator identities") {
  // [Delta, M] x^2 = 2 d1 x^2 exactly; dyadic spacing keeps the samples exact
  auto r = commutator_residual(monomial(2, 0), {0, 0}, 1, 1.0 / 16, {0.5, 0.0}, {1.0, 0.0});
  CHECK(r.res1 <= 1e-10);
  CHECK(r.res2 <= 1e-10);

  auto r2 = commutator_residual(monomial(1, 2), {0, 1}, 2, 1.0 / 16, {0.5, -0.5}, {1.0, 1.0});
  CHECK(r2.res1 <= 1e-10);
  CHECK(r2.res2 <= 1e-10);

  std::vector<double> res1, res2;
  for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
    auto c = commutator_residual(sin_sin(), {1, 0}, 2, h, {1.0, 0.0}, {1.0, 1.0});
    res1.push_back(c.res1);
    res2.push_back(c.res2);
  }
  for (std::size_t i = 0; i + 1 < res1.size(); ++i) {
    CHECK(std::log2(res1[i] / res1[i + 1]) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(res2[i] / res2[i + 1]) == doctest::Approx(2.0).epsilon(0.1));
  }

  CHECK_THROWS_AS(commutator_residual(sin_sin(), {0, 0}, 2, 0.25, {1.0, 0.0}, {1.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(commutator_residual(sin_sin(), {1, 1}, 2, 0.01, {1.0, 0.0}, {1.0, 1.0}), ArgumentError);
}

TEST_CASE("vanishing trace sets") {
  auto s = vanishing_trace_set(2, 2.0, 0.0);
  CHECK(s.size() == 3);  // (0,0), (1,0), (0,1)
  for (auto& a : s) CHECK(a[0] + a[1] <= 1);
  CHECK(vanishing_trace_set(2, 2.0, 4.5).empty());
  CHECK(vanishing_trace_set(0, 2.0, 0.0).empty());
  CHECK(vanishing_trace_set(2, 2.0, 0.0, 1).size() == 2);
  CHECK_THROWS_AS(vanishing_trace_set(2, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(vanishing_trace_set(2, 3.0, 5.0), DomainError);

  // antitone in gamma, monotone in k
  for (int k = 0; k <= 4; ++k) {
    std::size_t prev = 1000;
    for (double g = -0.95; g < 8.0; g += 0.13) {
      if (std::abs((g + 1.0) / 2.0 - std::round((g + 1.0) / 2.0)) < 1e-9) continue;
      const auto sz = vanishing_trace_set(k, 2.0, g).size();
      CHECK(sz <= prev);
      prev = sz;
      if (k > 0) CHECK(vanishing_trace_set(k - 1, 2.0, g).size() <= sz);
    }
  }
}
