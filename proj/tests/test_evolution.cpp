#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "platemr/errors.hpp"
#include "platemr/evolution.hpp"

using namespace platemr;

namespace {

double quartic(double x) { return x * x * (1 - x) * (1 - x); }

Eigen::VectorXd beam_mode_state(const BlockOperatorA& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(a.B)};
  Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * a.block_size());
  v.head(a.block_size()) = es.eigenvectors().col(0);
  return v;
}

// u* = (1 - cos t) q(x): both time derivatives vanish at t = 0.
SourceFn cosine_source(double rho) {
  return [rho](double t, double x, double) {
    const double qxx = 2.0 - 12.0 * x + 12.0 * x * x;
    return std::cos(t) * quartic(x) + 24.0 * (1.0 - std::cos(t)) - rho * std::sin(t) * qxx;
  };
}

double final_error(const Trajectory& tr, const std::function<double(double, double)>& exact) {
  const auto last = tr.states.size() - 1;
  const Eigen::VectorXd u = tr.u(last);
  double err = 0.0;
  for (std::size_t k = 0; k < tr.grid.size(); ++k) {
    err = std::max(err, std::abs(u(static_cast<Eigen::Index>(k)) - exact(tr.time.horizon, tr.grid.node(k)[0])));
  }
  return err;
}

}  // namespace

TEST_CASE("time grid validation") {
  CHECK(make_time_grid(2.0, 8).dt() == 0.25);
  CHECK_THROWS_AS(make_time_grid(1.0, 1), ArgumentError);
  CHECK_THROWS_AS(make_time_grid(0.0, 4), DomainError);
}

TEST_CASE("theta step on eigenmodes") {
  auto g = make_rect_grid(1, 12);
  auto a = assemble_A(g, 1.3);
  Eigen::EigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(a.matrix)};
  const double dt = 0.01;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(12);
  CHECK(step_theta(a, Eigen::VectorXd::Zero(24), zero, dt, 0.5).norm() == 0.0);
  for (double theta : {1.0, 0.5}) {
    ThetaStepper st(a, dt, theta);
    for (Eigen::Index k = 0; k < 24; k += 5) {
      const Complex lam = es.eigenvalues()(k);
      const Eigen::VectorXcd phi = es.eigenvectors().col(k);
      const Eigen::VectorXcd next = st.step(phi.real(), zero).cast<Complex>() +
                                    Complex(0.0, 1.0) * st.step(phi.imag(), zero).cast<Complex>();
      const Complex z = lam * dt;
      const Complex amp = theta == 1.0 ? 1.0 / (1.0 + z) : (1.0 - z / 2.0) / (1.0 + z / 2.0);
      CHECK((next - amp * phi).norm() <= 1e-9 * phi.norm());
      CHECK(std::abs(amp) <= 1.0);
    }
  }
  CHECK_THROWS_AS(ThetaStepper(a, dt, 0.4), DomainError);
  CHECK_THROWS_AS(ThetaStepper(a, -dt, 0.5), DomainError);

  // 1x1 blocks with L = 2 > 0: A = [[0, -1], [4, -4]] has the double eigenvalue -2
  SparseOperator l1(1, 1), b1(1, 1);
  l1.insert(0, 0) = 2.0;
  b1.insert(0, 0) = 4.0;
  auto bad = assemble_A(l1, b1, 2.0);
  CHECK_THROWS_AS(ThetaStepper(bad, 1.0, 0.5), NumericError);
}

TEST_CASE("zero source and zero data give the zero trajectory") {
  auto g = make_rect_grid(2, 8);
  auto a = assemble_A(g, 1.0);
  auto tr = solve_cauchy(a, g, make_source("zero", 2).f, make_time_grid(0.5, 10), 0.5);
  CHECK(tr.states.size() == 11);
  for (const auto& v : tr.states) CHECK(v.norm() == 0.0);
  auto e = energy_dissipation_check(tr);
  for (double x : e.energy) CHECK(x == 0.0);
  CHECK(decay_rate(e).verdict == Verdict::skipped);
  CHECK(tr.scheme() == "crank-nicolson");
}

TEST_CASE("manufactured solution t^2 q converges at second order") {
  const double rho = 1.0;
  auto src = make_source("manufactured", 1, rho);
  auto exact = [](double t, double x) { return t * t * quartic(x); };
  std::vector<double> err;
  for (int n : {31, 63}) {
    auto g = make_rect_grid(1, n);
    auto tr = solve_cauchy(assemble_A(g, rho), g, src.f, make_time_grid(1.0, n + 1), 0.5);
    err.push_back(final_error(tr, exact));
  }
  CHECK(err[0] <= 1e-3);
  CHECK(err[0] / err[1] >= 3.5);
}

TEST_CASE("temporal order of the theta schemes") {
  const double rho = 1.0;
  auto g = make_rect_grid(1, 63);
  auto a = assemble_A(g, rho);
  // self-convergence against a fine-step run on the same grid removes the spatial error
  auto final_u = [&](double theta, int steps) {
    auto tr = solve_cauchy(a, g, cosine_source(rho), make_time_grid(1.0, steps), theta);
    return Eigen::VectorXd(tr.u(tr.states.size() - 1));
  };
  const Eigen::VectorXd ref = final_u(0.5, 2048);
  auto err = [&](double theta, int steps) { return (final_u(theta, steps) - ref).cwiseAbs().maxCoeff(); };
  const double ie = err(1.0, 20) / err(1.0, 40);
  CHECK(ie >= 1.7);
  CHECK(ie <= 2.3);
  const double cn = err(0.5, 16) / err(0.5, 32);
  CHECK(cn >= 3.5);
  CHECK(cn <= 4.5);

  // the velocity component is the centred difference of u to O(dt^2)
  auto consistency = [&](int steps) {
    auto tr = solve_cauchy(a, g, cosine_source(rho), make_time_grid(1.0, steps), 0.5);
    double worst = 0.0;
    for (std::size_t n = 1; n + 1 < tr.states.size(); ++n) {
      const Eigen::VectorXd c = (tr.u(n + 1) - tr.u(n - 1)) / (2.0 * tr.time.dt());
      worst = std::max(worst, (tr.w(n) - c).cwiseAbs().maxCoeff());
    }
    return worst;
  };
  CHECK(consistency(16) / consistency(32) >= 3.5);
}

TEST_CASE("discrete energy identity") {
  auto g = make_rect_grid(1, 100);
  auto a = assemble_A(g, 1.0);
  const Eigen::VectorXd v0 = slow_mode_state(a, 6, 7);
  auto ie = energy_dissipation_check(solve_cauchy(a, g, {}, make_time_grid(0.1, 100), 1.0, v0));
  CHECK(ie.monotone);
  CHECK(ie.max_increase <= 1e-12);
  CHECK(ie.energy.back() < ie.energy.front());
  CHECK(ie.tail_energy == ie.energy.back());

  std::vector<double> res;
  for (int steps : {100, 200, 400}) {
    res.push_back(energy_dissipation_check(solve_cauchy(a, g, {}, make_time_grid(0.1, steps), 0.5, v0)).balance_residual);
  }
  CHECK(res[0] / res[1] >= 3.5);
  CHECK(res[1] / res[2] >= 3.5);

  // forced runs: the source work term keeps the balance second order
  std::vector<double> forced;
  for (int steps : {50, 100}) {
    auto tr = solve_cauchy(a, g, make_source("sine-quartic", 1).f, make_time_grid(0.5, steps), 0.5, v0);
    forced.push_back(energy_dissipation_check(tr).balance_residual);
  }
  CHECK(forced[0] / forced[1] >= 3.0);
}

TEST_CASE("implicit euler is monotone even for rough initial data and large steps") {
  auto g = make_rect_grid(2, 12);
  auto a = assemble_A(g, 0.5);
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(2 * a.block_size());
  for (Eigen::Index i = 0; i < v0.size(); ++i) v0(i) = std::sin(1.7 * static_cast<double>(i * i));
  auto e = energy_dissipation_check(solve_cauchy(a, g, {}, make_time_grid(5.0, 10), 1.0, v0));
  CHECK(e.monotone);
}

TEST_CASE("energy decay rate matches the spectral abscissa") {
  for (double rho : {0.5, 1.0, 2.0, 4.0}) {
    auto g = make_rect_grid(1, 100);
    auto a = assemble_A(g, rho);
    const double min_re = spectrum(a, 2).min_real;
    auto tr = solve_cauchy(a, g, {}, make_time_grid(10.0 / min_re, 4000), 0.5, beam_mode_state(a));
    auto fit = decay_rate(energy_dissipation_check(tr));
    CHECK(fit.verdict == Verdict::pass);
    CHECK(fit.e_foldings >= 3.0);
    CHECK(fit.rate == doctest::Approx(2.0 * min_re).epsilon(0.1));
  }
}

TEST_CASE("non-decaying energy is a failed fit") {
  EnergyReport e;
  e.times = {0.0, 1.0, 2.0};
  e.energy = {1.0, 2.0, 3.0};
  CHECK(decay_rate(e, 0.0).verdict == Verdict::fail);
}

TEST_CASE("boundary lifts") {
  auto g = make_rect_grid(1, 31);
  auto a = assemble_A(g, 1.0);
  auto time = make_time_grid(1.0, 32);
  auto src = make_source("sine-quartic", 1).f;

  auto plain = solve_cauchy(a, g, src, time, 0.5);
  auto zero = solve_inhomogeneous(a, g, src, make_lift("zero", 1), time);
  for (std::size_t n = 0; n < plain.states.size(); ++n) CHECK((zero.u[n] - plain.u(n)).norm() == 0.0);

  auto both = solve_inhomogeneous(a, g, src, make_lift("ramp", 1), time);
  auto lift_only = solve_inhomogeneous(a, g, {}, make_lift("ramp", 1), time);
  for (std::size_t n = 0; n < plain.states.size(); ++n) {
    CHECK((both.u[n] - plain.u(n) - lift_only.u[n]).norm() <= 1e-12 * (1.0 + both.u[n].norm()));
  }

  // u* = (1 - cos t) q + t^2 x solves the problem with g0 = t^2 x, g1 = -+t^2
  auto exact = [](double t, double x) { return (1.0 - std::cos(t)) * quartic(x) + t * t * x; };
  SourceFn f = [base = cosine_source(1.0)](double t, double x, double y) { return base(t, x, y) + 2.0 * x; };
  std::vector<double> err, bres;
  for (int n : {31, 63}) {
    auto gn = make_rect_grid(1, n);
    auto sol = solve_inhomogeneous(assemble_A(gn, 1.0), gn, f, make_lift("ramp", 1), make_time_grid(1.0, n + 1));
    double e = 0.0;
    for (int k = 0; k < n; ++k) e = std::max(e, std::abs(sol.u.back()(k) - exact(1.0, gn.node(static_cast<std::size_t>(k))[0])));
    err.push_back(e);
    bres.push_back(*std::max_element(sol.boundary_residual.begin(), sol.boundary_residual.end()));
  }
  CHECK(err[0] <= 1e-3);
  CHECK(err[0] / err[1] >= 3.5);
  CHECK(bres[0] / bres[1] >= 3.5);

  // cutoff: eta = 1 with vanishing normal derivative on the boundary, also in 2D
  auto cut = make_lift("cutoff", 2);
  CHECK(cut.value(1.0, 0.0, 0.3) == doctest::Approx(std::pow(1.0 - 64.0 * std::pow(0.3 * 0.7, 3), 1)));
  CHECK(cut.gradient(1.0, 0.0, 0.3)[0] == doctest::Approx(0.0));
  std::vector<double> b2;
  for (int n : {31, 63}) {
    auto gn = make_rect_grid(2, n);
    auto sol = solve_inhomogeneous(assemble_A(gn, 1.0), gn, {}, cut, make_time_grid(0.5, 8));
    b2.push_back(*std::max_element(sol.boundary_residual.begin(), sol.boundary_residual.end()));
  }
  CHECK(b2[0] / b2[1] >= 3.0);

  BoundaryLift bad = make_lift("ramp", 1);
  bad.value = [](double t, double x, double) { return (1.0 + t * t) * x; };
  CHECK_THROWS_AS(solve_inhomogeneous(a, g, {}, bad, time), ArgumentError);
  CHECK_THROWS_AS(make_lift("spiral", 1), ArgumentError);
}

TEST_CASE("weighted norm pieces") {
  auto g = make_rect_grid(1, 255);
  Eigen::VectorXd u(255);
  for (int k = 0; k < 255; ++k) u(k) = quartic(g.node(static_cast<std::size_t>(k))[0]);
  const double beta = 4.5;
  auto dist = [&](double x) { return std::pow(std::min(x, 1.0 - x), beta); };
  using Q = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto integral = [&](auto f) { return Q::integrate(f, 0.0, 0.5, 12) + Q::integrate(f, 0.5, 1.0, 12); };
  const double l2 = std::sqrt(integral([&](double x) { return quartic(x) * quartic(x) * dist(x); }));
  CHECK(clamped_sobolev_norm(g, u, 0, 2.0, beta) == doctest::Approx(l2).epsilon(1e-4));
  auto d = [](double x, int j) {
    switch (j) {
      case 0: return quartic(x);
      case 1: return 2 * x - 6 * x * x + 4 * x * x * x;
      case 2: return 2 - 12 * x + 12 * x * x;
      case 3: return -12 + 24 * x;
      default: return 24.0;
    }
  };
  const double w4 = std::sqrt(integral([&](double x) {
    double s = 0.0;
    for (int j = 0; j <= 4; ++j) s += d(x, j) * d(x, j);
    return s * dist(x);
  }));
  CHECK(clamped_sobolev_norm(g, u, 4, 2.0, beta) == doctest::Approx(w4).epsilon(1e-3));
  CHECK_THROWS_AS(clamped_sobolev_norm(g, u, 5, 2.0, beta), DomainError);

  // piecewise-linear moments are exact for constants: int_0^T t^mu dt
  auto tg = make_time_grid(2.0, 7);
  std::vector<double> ones(8, 1.0);
  CHECK(temporal_norm(tg, ones, 2.0, -0.5) == doctest::Approx(std::sqrt(std::pow(2.0, 0.5) / 0.5)).epsilon(1e-12));
}

TEST_CASE("maximal-regularity ratios stay bounded under refinement") {
  for (double mu : {0.0, 0.5}) {
    NormSpec spec;
    spec.mu = mu;
    auto rep = mr_ratio_report(mr_source_suite(1), spec, {63, 127, 255});
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.max_drift < 0.2);
    for (const auto& f : rep.fields) {
      CHECK(f.refinements.size() == 3);
      for (const auto& r : f.refinements) CHECK(std::isfinite(r.ratio));
    }
  }
  NormSpec spec;
  auto base = mr_ratio_report({make_source("gauss-pulse", 1)}, spec, {31});
  auto scaled_src = make_source("gauss-pulse", 1);
  scaled_src.f = [f = scaled_src.f](double t, double x, double y) { return 3.0 * f(t, x, y); };
  auto scaled = mr_ratio_report({scaled_src}, spec, {31});
  CHECK(scaled.fields[0].refinements[0].ratio ==
        doctest::Approx(base.fields[0].refinements[0].ratio).epsilon(1e-12));

  spec.mu = 0.5;
  CHECK(mr_ratio_report({make_source("gauss-pulse", 1)}, spec, {31}).fields[0].refinements[0].f_norm !=
        base.fields[0].refinements[0].f_norm);

  auto zero = mr_ratio_report({make_source("zero", 1)}, NormSpec{}, {15, 31});
  CHECK(zero.fields[0].verdict == Verdict::skipped);
  CHECK(zero.verdict == Verdict::skipped);

  auto two = mr_ratio_report({make_source("sine-quartic", 2)}, NormSpec{}, {15, 31}, MROptions{1.0, 0.5, 0.5, 2});
  CHECK(std::isfinite(two.max_ratio));

  NormSpec bad;
  bad.mu = 1.0;
  CHECK_THROWS_AS(mr_ratio_report(mr_source_suite(1), bad, {15}), DomainError);
  bad = NormSpec{};
  bad.gamma = 1.0;
  CHECK_THROWS_AS(mr_ratio_report(mr_source_suite(1), bad, {15}), DomainError);
  bad = NormSpec{};
  bad.k = 3;
  CHECK_THROWS_AS(mr_ratio_report(mr_source_suite(1), bad, {15}), DomainError);
}
