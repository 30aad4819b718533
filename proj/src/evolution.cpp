#include "platemr/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "platemr/errors.hpp"
#include "platemr/parallel.hpp"
#include "platemr/quadrature.hpp"

namespace platemr {

namespace {

using Poly = std::array<double, 7>;

// d-th derivative of sum c_j x^j.
double poly(const Poly& c, double x, int d) {
  double s = 0.0;
  for (int j = static_cast<int>(c.size()) - 1; j >= d; --j) {
    double f = c[static_cast<std::size_t>(j)];
    for (int m = 0; m < d; ++m) f *= j - m;
    s = s * x + f;
  }
  return s;
}

constexpr Poly kQuartic{0.0, 0.0, 1.0, -2.0, 1.0, 0.0, 0.0};          // x^2 (1-x)^2
constexpr Poly kCutoff{1.0, 0.0, 0.0, -64.0, 192.0, -192.0, 64.0};   // 1 - 64 (x(1-x))^3

// P(x) in 1D, P(x) P(y) in 2D.
struct Separable {
  Poly c;
  int dim;

  double d(double x, double y, int a, int b) const {
    if (dim == 1) return b == 0 ? poly(c, x, a) : 0.0;
    return poly(c, x, a) * poly(c, y, b);
  }
  double value(double x, double y) const { return d(x, y, 0, 0); }
  double lap(double x, double y) const { return d(x, y, 2, 0) + d(x, y, 0, 2); }
  double bilap(double x, double y) const { return d(x, y, 4, 0) + 2.0 * d(x, y, 2, 2) + d(x, y, 0, 4); }
  std::array<double, 2> grad(double x, double y) const { return {d(x, y, 1, 0), d(x, y, 0, 1)}; }
};

void require_dim(int dim) {
  if (dim != 1 && dim != 2) throw ArgumentError("dimension must be 1 or 2");
}

Eigen::VectorXd sample_source(const RectGrid& grid, const SourceFn& f, double t) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  if (!f) return out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto x = grid.node(k);
    out(static_cast<Eigen::Index>(k)) = f(t, x[0], x[1]);
  }
  return out;
}

double cell_volume(const RectGrid& grid) { return std::pow(grid.h(), grid.dim); }

// Central differences of order 1..4 along a line of n interior values with
// zero boundary values and the ghost reflection u_{-1} = u_1.
void clamped_line_derivative(const double* in, std::ptrdiff_t stride, int n, int order, double h, double* out,
                             std::ptrdiff_t out_stride) {
  auto e = [&](int i) -> double {  // i in [-1, n + 2], interior nodes 1..n
    if (i == 0 || i == n + 1) return 0.0;
    if (i == -1) i = 1;
    if (i == n + 2) i = n;
    return in[(i - 1) * stride];
  };
  for (int i = 1; i <= n; ++i) {
    double v = 0.0;
    switch (order) {
      case 0:
        v = e(i);
        break;
      case 1:
        v = (e(i + 1) - e(i - 1)) / (2.0 * h);
        break;
      case 2:
        v = (e(i + 1) - 2.0 * e(i) + e(i - 1)) / (h * h);
        break;
      case 3:
        v = (e(i + 2) - 2.0 * e(i + 1) + 2.0 * e(i - 1) - e(i - 2)) / (2.0 * h * h * h);
        break;
      case 4:
        v = (e(i + 2) - 4.0 * e(i + 1) + 6.0 * e(i) - 4.0 * e(i - 1) + e(i - 2)) / (h * h * h * h);
        break;
      default:
        throw DomainError("clamped derivatives are implemented up to order 4");
    }
    out[(i - 1) * out_stride] = v;
  }
}

Eigen::VectorXd clamped_partial(const RectGrid& grid, const Eigen::VectorXd& u, int a, int b) {
  const int n = grid.n;
  const double h = grid.h();
  if (grid.dim == 1) {
    Eigen::VectorXd out(n);
    clamped_line_derivative(u.data(), 1, n, a, h, out.data(), 1);
    return out;
  }
  Eigen::VectorXd tmp(u.size()), out(u.size());
  for (int j = 0; j < n; ++j) clamped_line_derivative(u.data() + j, n, n, a, h, tmp.data() + j, n);
  for (int i = 0; i < n; ++i) clamped_line_derivative(tmp.data() + i * n, 1, n, b, h, out.data() + i * n, 1);
  return out;
}

// int |v|^p dist^beta over the unit interval / square; v = 0 on the boundary.
double weighted_power_integral(const RectGrid& grid, const Eigen::VectorXd& v, double p, double beta) {
  const int n = grid.n;
  const double h = grid.h();
  const double len = grid.length;
  if (grid.dim == 1) {
    std::vector<double> nodes(static_cast<std::size_t>(n) + 2), vals(nodes.size(), 0.0);
    for (int i = 0; i <= n + 1; ++i) nodes[static_cast<std::size_t>(i)] = i * h;
    nodes.back() = len;
    for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i) + 1] = std::pow(std::abs(v(i)), p);
    Grid1D g(0.0, len, nodes);
    return std::max(0.0, weighted_integral(g, vals, WeightSpec{beta, WeightReference::domain_boundary_distance}, 1));
  }
  // product trapezoid with the nodal weight; boundary nodes carry weight zero
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = (i + 1) * h, y = (j + 1) * h;
      const double d = std::min({x, len - x, y, len - y});
      s += std::pow(std::abs(v(i * n + j)), p) * std::pow(d, beta);
    }
  }
  return s * h * h;
}

}  // namespace

TimeGrid make_time_grid(double horizon, int steps, bool truncated) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("time horizon must be positive and finite");
  if (steps < 2) throw ArgumentError("time grid needs steps >= 2");
  return TimeGrid{horizon, steps, truncated};
}

SourceField make_source(const std::string& name, int dim, double rho) {
  require_dim(dim);
  const Separable q{kQuartic, dim};
  if (name == "zero") return {name, SourceFn{}};
  if (name == "sine-quartic") {
    return {name, [q](double t, double x, double y) { return std::sin(t) * q.value(x, y); }};
  }
  if (name == "gauss-pulse") {
    return {name, [dim](double t, double x, double y) {
              const double r2 = (x - 0.3) * (x - 0.3) + (dim == 2 ? (y - 0.5) * (y - 0.5) : 0.0);
              return t * std::exp(-40.0 * r2);
            }};
  }
  if (name == "oscillating") {
    return {name, [dim](double t, double x, double y) {
              const double s = std::sin(2.0 * std::numbers::pi * x) * (dim == 2 ? std::sin(std::numbers::pi * y) : 1.0);
              return std::cos(3.0 * t) * s;
            }};
  }
  if (name == "manufactured") {
    // u* = t^2 q: f = 2 q + t^2 Delta^2 q - 2 rho t Delta q
    return {name, [q, rho](double t, double x, double y) {
              return 2.0 * q.value(x, y) + t * t * q.bilap(x, y) - 2.0 * rho * t * q.lap(x, y);
            }};
  }
  throw ArgumentError("unknown source profile '" + name + "' (zero, sine-quartic, gauss-pulse, oscillating, manufactured)");
}

std::vector<SourceField> mr_source_suite(int dim) {
  return {make_source("sine-quartic", dim), make_source("gauss-pulse", dim), make_source("oscillating", dim)};
}

ThetaStepper::ThetaStepper(const BlockOperatorA& a, double dt, double theta)
    : dt_(dt), theta_(theta), rho_(a.rho), block_(a.block_size()) {
  if (!(theta >= 0.5 && theta <= 1.0)) throw DomainError("theta must lie in [1/2, 1]");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
  const Eigen::Index m = a.matrix.rows();
  SparseOperator id(m, m);
  id.setIdentity();
  const SparseOperator impl = id + (theta * dt) * a.matrix;
  explicit_ = id - ((1.0 - theta) * dt) * a.matrix;
  lu_ = std::make_shared<Eigen::SparseLU<SparseOperator>>();
  lu_->analyzePattern(impl);
  lu_->factorize(impl);
  if (lu_->info() != Eigen::Success) throw NumericError("I + theta dt A is singular: " + lu_->lastErrorMessage());
}

Eigen::VectorXd ThetaStepper::step(const Eigen::VectorXd& v, const Eigen::VectorXd& fbar) const {
  if (v.size() != 2 * block_ || fbar.size() != block_) throw ArgumentError("state or source has the wrong size");
  Eigen::VectorXd rhs = explicit_ * v;
  rhs.tail(block_) += dt_ * fbar;
  Eigen::VectorXd out = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success || !out.allFinite()) throw NumericError("theta step failed");
  return out;
}

Eigen::VectorXd step_theta(const BlockOperatorA& a, const Eigen::VectorXd& v, const Eigen::VectorXd& fbar,
                           double dt, double theta) {
  return ThetaStepper(a, dt, theta).step(v, fbar);
}

Eigen::VectorXd slow_mode_state(const BlockOperatorA& a, int count, std::uint64_t seed) {
  const Eigen::Index m = a.matrix.rows();
  if (m > 4000) throw ArgumentError("slow_mode_state: dimension exceeds the dense limit 4000");
  if (count < 1 || count > m) throw ArgumentError("slow_mode_state: count must lie in 1..dim");
  Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(a.matrix));
  if (es.info() != Eigen::Success) throw NumericError("eigensolver failed");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return std::abs(es.eigenvalues()(x)) < std::abs(es.eigenvalues()(y));
  });
  std::mt19937_64 rng(mix_seed(seed, 0));
  std::normal_distribution<double> nd;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < count; ++k) {
    const Complex c(nd(rng), nd(rng));
    v += (c * es.eigenvectors().col(order[static_cast<std::size_t>(k)])).real();
  }
  const double scale = v.head(a.block_size()).cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw NumericError("slow_mode_state produced a zero displacement");
  return v / scale;
}

Eigen::VectorXd Trajectory::u(std::size_t n) const {
  const Eigen::Index b = states.at(n).size() / 2;
  return states[n].head(b);
}

Eigen::VectorXd Trajectory::w(std::size_t n) const {
  const Eigen::Index b = states.at(n).size() / 2;
  return states[n].tail(b);
}

std::string Trajectory::scheme() const {
  if (theta == 1.0) return "implicit-euler";
  if (theta == 0.5) return "crank-nicolson";
  return "theta=" + std::to_string(theta);
}

Trajectory solve_cauchy(const ThetaStepper& stepper, const RectGrid& grid, const SourceFn& f, const TimeGrid& time,
                        const Eigen::VectorXd& v0) {
  if (static_cast<Eigen::Index>(grid.size()) != stepper.block_size()) throw ArgumentError("grid does not match operator");
  if (std::abs(stepper.dt() - time.dt()) > 1e-14 * time.dt()) throw ArgumentError("stepper dt does not match time grid");
  Trajectory traj{grid, stepper.rho(), stepper.theta(), time, f, {}};
  traj.states.reserve(static_cast<std::size_t>(time.steps) + 1);
  Eigen::VectorXd v = v0.size() == 0 ? Eigen::VectorXd::Zero(2 * stepper.block_size()) : v0;
  if (v.size() != 2 * stepper.block_size()) throw ArgumentError("initial state has the wrong size");
  traj.states.push_back(v);
  const double th = stepper.theta();
  Eigen::VectorXd f_old = sample_source(grid, f, 0.0);
  for (int n = 0; n < time.steps; ++n) {
    Eigen::VectorXd f_new = sample_source(grid, f, time.time(n + 1));
    v = stepper.step(v, th * f_new + (1.0 - th) * f_old);
    traj.states.push_back(v);
    f_old = std::move(f_new);
  }
  return traj;
}

Trajectory solve_cauchy(const BlockOperatorA& a, const RectGrid& grid, const SourceFn& f, const TimeGrid& time,
                        double theta, const Eigen::VectorXd& v0) {
  return solve_cauchy(ThetaStepper(a, time.dt(), theta), grid, f, time, v0);
}

EnergyReport energy_dissipation_check(const Trajectory& traj) {
  const SparseOperator L = laplacian_dirichlet(traj.grid);
  const SparseOperator B = biharmonic_clamped(traj.grid);
  const double vol = cell_volume(traj.grid);
  const double dt = traj.time.dt();
  EnergyReport rep;
  const std::size_t count = traj.states.size();
  std::vector<double> fw(count, 0.0);
  for (std::size_t n = 0; n < count; ++n) {
    const Eigen::VectorXd u = traj.u(n), w = traj.w(n);
    rep.times.push_back(traj.time.time(static_cast<int>(n)));
    rep.energy.push_back(vol * (u.dot(B * u) + w.squaredNorm()));
    rep.dissipation.push_back(-vol * w.dot(L * w));
    if (traj.source) fw[n] = vol * sample_source(traj.grid, traj.source, rep.times.back()).dot(w);
  }
  const double e0 = std::max(rep.energy.front(), std::numeric_limits<double>::min());
  for (std::size_t n = 0; n + 1 < count; ++n) {
    const double de = rep.energy[n + 1] - rep.energy[n];
    rep.max_increase = std::max(rep.max_increase, de / e0);
    if (de > 1e-12 * rep.energy[n]) rep.monotone = false;
    const double r = de / dt + traj.rho * (rep.dissipation[n] + rep.dissipation[n + 1]) - (fw[n] + fw[n + 1]);
    rep.balance_residual = std::max(rep.balance_residual, std::abs(r));
  }
  rep.tail_energy = rep.energy.back();
  return rep;
}

DecayFit decay_rate(const EnergyReport& e, double fit_from) {
  DecayFit fit;
  if (e.energy.empty() || !(e.energy.front() > 0.0)) return fit;
  if (!(fit_from >= 0.0 && fit_from < 1.0)) throw ArgumentError("fit window start must lie in [0, 1)");
  const double t_end = e.times.back();
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int m = 0;
  for (std::size_t n = 0; n < e.energy.size(); ++n) {
    if (e.times[n] < fit_from * t_end || !(e.energy[n] > 0.0)) continue;
    const double y = std::log(e.energy[n]);
    st += e.times[n];
    sy += y;
    stt += e.times[n] * e.times[n];
    sty += e.times[n] * y;
    ++m;
  }
  fit.e_foldings = e.energy.back() > 0.0 ? std::log(e.energy.front() / e.energy.back())
                                         : std::numeric_limits<double>::infinity();
  if (m < 2) {
    fit.verdict = Verdict::fail;
    return fit;
  }
  const double slope = (m * sty - st * sy) / (m * stt - st * st);
  fit.rate = -slope;
  fit.verdict = fit.rate > 0.0 ? Verdict::pass : Verdict::fail;
  return fit;
}

BoundaryLift make_lift(const std::string& name, int dim) {
  require_dim(dim);
  BoundaryLift l;
  l.name = name;
  auto zero = [](double, double, double) { return 0.0; };
  if (name == "zero") {
    l.value = l.dt = l.dtt = l.bilaplacian = l.laplacian_dt = zero;
    l.gradient = [](double, double, double) { return std::array<double, 2>{0.0, 0.0}; };
    return l;
  }
  if (name == "ramp") {
    l.value = [](double t, double x, double) { return t * t * x; };
    l.dt = [](double t, double x, double) { return 2.0 * t * x; };
    l.dtt = [](double, double x, double) { return 2.0 * x; };
    l.bilaplacian = l.laplacian_dt = zero;
    l.gradient = [](double t, double, double) { return std::array<double, 2>{t * t, 0.0}; };
    return l;
  }
  if (name == "cutoff") {
    const Separable eta{kCutoff, dim};
    l.value = [eta](double t, double x, double y) { return t * t * eta.value(x, y); };
    l.dt = [eta](double t, double x, double y) { return 2.0 * t * eta.value(x, y); };
    l.dtt = [eta](double, double x, double y) { return 2.0 * eta.value(x, y); };
    l.bilaplacian = [eta](double t, double x, double y) { return t * t * eta.bilap(x, y); };
    l.laplacian_dt = [eta](double t, double x, double y) { return 2.0 * t * eta.lap(x, y); };
    l.gradient = [eta](double t, double x, double y) {
      auto g = eta.grad(x, y);
      return std::array<double, 2>{t * t * g[0], t * t * g[1]};
    };
    return l;
  }
  throw ArgumentError("unknown lift profile '" + name + "' (zero, ramp, cutoff)");
}

void check_lift_compatibility(const BoundaryLift& lift, const RectGrid& grid) {
  if (!lift.value || !lift.dt || !lift.dtt || !lift.bilaplacian || !lift.laplacian_dt || !lift.gradient) {
    throw ArgumentError("boundary lift '" + lift.name + "' is missing derivative data");
  }
  const int m = grid.n + 1;
  const double h = grid.h();
  double worst = 0.0;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= (grid.dim == 2 ? m : 0); ++j) {
      const double x = i * h, y = j * h;
      worst = std::max({worst, std::abs(lift.value(0.0, x, y)), std::abs(lift.dt(0.0, x, y))});
    }
  }
  if (worst > 1e-12) {
    throw ArgumentError("incompatible lift '" + lift.name + "': E(0) or d_t E(0) is nonzero (max " +
                        std::to_string(worst) + ")");
  }
}

double boundary_residual(const RectGrid& grid, const Eigen::VectorXd& ut, const BoundaryLift* lift, double t) {
  const int n = grid.n;
  const double h = grid.h();
  const double len = grid.length;
  auto E = [&](double x, double y) { return lift ? lift->value(t, x, y) : 0.0; };
  auto gradE = [&](double x, double y) { return lift ? lift->gradient(t, x, y) : std::array<double, 2>{0.0, 0.0}; };
  double worst = 0.0;
  // one line: boundary point b, inward step d, interior values v1, v2
  auto check = [&](std::array<double, 2> b, std::array<double, 2> d, double v1, double v2) {
    const double u0 = E(b[0], b[1]);
    const double u1 = v1 + E(b[0] + h * d[0], b[1] + h * d[1]);
    const double u2 = v2 + E(b[0] + 2 * h * d[0], b[1] + 2 * h * d[1]);
    const double inward = (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * h);
    const auto g = gradE(b[0], b[1]);
    const double g1 = -(g[0] * d[0] + g[1] * d[1]);
    worst = std::max({worst, std::abs(u0 - E(b[0], b[1])), std::abs(-inward - g1)});
  };
  if (grid.dim == 1) {
    check({0.0, 0.0}, {1.0, 0.0}, ut(0), ut(1));
    check({len, 0.0}, {-1.0, 0.0}, ut(n - 1), ut(n - 2));
    return worst;
  }
  auto at = [&](int i, int j) { return ut(i * n + j); };
  for (int j = 0; j < n; ++j) {
    const double s = (j + 1) * h;
    check({0.0, s}, {1.0, 0.0}, at(0, j), at(1, j));
    check({len, s}, {-1.0, 0.0}, at(n - 1, j), at(n - 2, j));
    check({s, 0.0}, {0.0, 1.0}, at(j, 0), at(j, 1));
    check({s, len}, {0.0, -1.0}, at(j, n - 1), at(j, n - 2));
  }
  return worst;
}

InhomogeneousSolution solve_inhomogeneous(const BlockOperatorA& a, const RectGrid& grid, const SourceFn& f,
                                          const BoundaryLift& lift, const TimeGrid& time, double theta) {
  check_lift_compatibility(lift, grid);
  const double rho = a.rho;
  SourceFn induced = [f, lift, rho](double t, double x, double y) {
    const double base = f ? f(t, x, y) : 0.0;
    return base - (lift.dtt(t, x, y) + lift.bilaplacian(t, x, y) - rho * lift.laplacian_dt(t, x, y));
  };
  InhomogeneousSolution sol;
  sol.homogeneous = solve_cauchy(a, grid, induced, time, theta);
  for (std::size_t n = 0; n < sol.homogeneous.states.size(); ++n) {
    const double t = time.time(static_cast<int>(n));
    Eigen::VectorXd ut = sol.homogeneous.u(n);
    Eigen::VectorXd u = ut;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto x = grid.node(k);
      u(static_cast<Eigen::Index>(k)) += lift.value(t, x[0], x[1]);
    }
    sol.u.push_back(std::move(u));
    sol.boundary_residual.push_back(boundary_residual(grid, ut, &lift, t));
  }
  return sol;
}

void validate_norm_spec(const NormSpec& s) {
  if (!(s.p > 1.0) || !std::isfinite(s.p)) throw DomainError("p must satisfy 1 < p < infinity");
  if (!(s.q > 1.0) || !std::isfinite(s.q)) throw DomainError("q must satisfy 1 < q < infinity");
  if (!(s.mu > -1.0 && s.mu < s.q - 1.0)) throw DomainError("mu must lie in (-1, q-1)");
  if (!(s.gamma > -1.0 && s.gamma < s.p - 1.0)) throw DomainError("gamma must lie in (-1, p-1)");
  if (s.k != 2) throw DomainError("maximal-regularity norms are implemented for k = 2");
}

double clamped_sobolev_norm(const RectGrid& grid, const Eigen::VectorXd& u, int m, double p, double beta) {
  if (m < 0 || m > 4) throw DomainError("Sobolev order must lie in 0..4");
  if (u.size() != static_cast<Eigen::Index>(grid.size())) throw ArgumentError("field does not match grid");
  double total = 0.0;
  for (int a = 0; a <= m; ++a) {
    for (int b = 0; b <= (grid.dim == 2 ? m - a : 0); ++b) {
      total += weighted_power_integral(grid, a + b == 0 ? u : clamped_partial(grid, u, a, b), p, beta);
    }
  }
  return std::pow(total, 1.0 / p);
}

double temporal_norm(const TimeGrid& time, const std::vector<double>& values, double q, double mu) {
  if (values.size() != static_cast<std::size_t>(time.steps) + 1) throw ArgumentError("one value per time node expected");
  std::vector<double> nodes(values.size()), powered(values.size());
  for (std::size_t n = 0; n < values.size(); ++n) {
    nodes[n] = time.time(static_cast<int>(n));
    powered[n] = std::pow(std::abs(values[n]), q);
  }
  nodes.back() = time.horizon;
  Grid1D g(0.0, time.horizon, nodes);
  return std::pow(std::max(0.0, weighted_integral(g, powered, WeightSpec{mu, WeightReference::halfspace_x1}, 1)),
                  1.0 / q);
}

MRRefinement mr_ratio(const Trajectory& traj, const BlockOperatorA& a, const NormSpec& spec) {
  validate_norm_spec(spec);
  const double beta = spec.gamma + spec.k * spec.p;
  std::vector<double> utt_n, u_n, f_n;
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const Eigen::VectorXd u = traj.u(n), w = traj.w(n);
    const Eigen::VectorXd f = sample_source(traj.grid, traj.source, traj.time.time(static_cast<int>(n)));
    const Eigen::VectorXd utt = f - a.B * u + traj.rho * (a.L * w);
    utt_n.push_back(clamped_sobolev_norm(traj.grid, utt, spec.k - 2, spec.p, beta));
    u_n.push_back(clamped_sobolev_norm(traj.grid, u, spec.k + 2, spec.p, beta));
    f_n.push_back(clamped_sobolev_norm(traj.grid, f, spec.k - 2, spec.p, beta));
  }
  MRRefinement r;
  r.n = traj.grid.n;
  r.h = traj.grid.h();
  r.dt = traj.time.dt();
  r.u_norm = temporal_norm(traj.time, utt_n, spec.q, spec.mu) + temporal_norm(traj.time, u_n, spec.q, spec.mu);
  r.f_norm = temporal_norm(traj.time, f_n, spec.q, spec.mu);
  r.ratio = r.f_norm > 0.0 ? r.u_norm / r.f_norm : std::numeric_limits<double>::quiet_NaN();
  return r;
}

MRReport mr_ratio_report(const std::vector<SourceField>& suite, const NormSpec& spec, const std::vector<int>& ns,
                         const MROptions& opt) {
  validate_norm_spec(spec);
  require_dim(opt.dim);
  if (!(opt.rho > 0.0)) throw DomainError("rho must be positive");
  if (ns.empty() || suite.empty()) throw ArgumentError("mr ratio needs at least one source and one refinement");
  if (!(opt.dt_per_h > 0.0) || !(opt.horizon > 0.0)) throw DomainError("dt_per_h and the horizon must be positive");

  struct Level {
    RectGrid grid;
    TimeGrid time;
    BlockOperatorA a;
    std::shared_ptr<ThetaStepper> stepper;
  };
  std::vector<Level> levels;
  for (int n : ns) {
    RectGrid g = make_rect_grid(opt.dim, n);
    const int steps = std::max(2, static_cast<int>(std::ceil(opt.horizon / (opt.dt_per_h * g.h()) - 1e-9)));
    TimeGrid tg = make_time_grid(opt.horizon, steps);
    BlockOperatorA a = assemble_A(g, opt.rho);
    auto st = std::make_shared<ThetaStepper>(a, tg.dt(), opt.theta);
    levels.push_back({g, tg, std::move(a), std::move(st)});
  }

  const auto jobs = static_cast<std::ptrdiff_t>(suite.size() * levels.size());
  std::vector<MRRefinement> results(static_cast<std::size_t>(jobs));
  std::vector<std::string> errors(static_cast<std::size_t>(jobs));
#pragma omp parallel for num_threads(thread_limit()) schedule(dynamic, 1)
  for (std::ptrdiff_t job = 0; job < jobs; ++job) {
    const auto& field = suite[static_cast<std::size_t>(job) / levels.size()];
    const auto& lv = levels[static_cast<std::size_t>(job) % levels.size()];
    try {
      const Trajectory traj = solve_cauchy(*lv.stepper, lv.grid, field.f, lv.time);
      const MRRefinement r = mr_ratio(traj, lv.a, spec);
      results[static_cast<std::size_t>(job)] = r;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(job)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericError("mr ratio run failed: " + e);
  }

  MRReport rep;
  rep.spec = spec;
  bool any_fail = false, any_pass = false;
  for (std::size_t s = 0; s < suite.size(); ++s) {
    MRFieldReport fr;
    fr.name = suite[s].name;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool skipped = false;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const auto& r = results[s * levels.size() + l];
      fr.refinements.push_back(r);
      if (!(r.f_norm > 0.0)) {
        skipped = true;
        continue;
      }
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    if (skipped) {
      fr.verdict = Verdict::skipped;
      fr.drift = 0.0;
    } else {
      fr.drift = hi / lo - 1.0;
      const bool ok = std::isfinite(hi) && fr.drift < opt.drift_bound;
      fr.verdict = ok ? Verdict::pass : Verdict::fail;
      rep.max_ratio = std::max(rep.max_ratio, hi);
      rep.max_drift = std::max(rep.max_drift, fr.drift);
    }
    any_fail = any_fail || fr.verdict == Verdict::fail;
    any_pass = any_pass || fr.verdict == Verdict::pass;
    rep.fields.push_back(std::move(fr));
  }
  rep.verdict = any_fail ? Verdict::fail : (any_pass ? Verdict::pass : Verdict::skipped);
  return rep;
}

}  // namespace platemr
