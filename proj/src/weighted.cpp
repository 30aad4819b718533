#include "platemr/weighted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "platemr/errors.hpp"

namespace platemr {

namespace {

void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("integrability exponent must satisfy 1 < p < inf");
}

double lp_integral(const Grid1D& grid, std::span<const double> values, double p, const WeightSpec& w) {
  std::vector<double> integrand(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) integrand[i] = std::pow(std::abs(values[i]), p);
  return std::max(0.0, weighted_integral(grid, integrand, w));
}

double sobolev_sum_1d(const Grid1D& grid, std::span<const double> values, const SobolevSpec& spec) {
  if (spec.k < 0) throw DomainError("negative-order Sobolev norms are not supported here");
  require_p(spec.p);
  Eigen::Map<const Eigen::VectorXd> f(values.data(), static_cast<Eigen::Index>(values.size()));
  double total = lp_integral(grid, values, spec.p, spec.weight);
  for (int j = 1; j <= spec.k; ++j) {
    Eigen::VectorXd d = diff_matrix(grid, j) * f;
    total += lp_integral(grid, std::span<const double>(d.data(), static_cast<std::size_t>(d.size())), spec.p,
                         spec.weight);
  }
  return total;
}

}  // namespace

GridField GridField::sample(const Grid1D& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  return GridField{grid, std::move(v)};
}

TensorField TensorField::sample(const GridTensor& grid, const std::function<double(double, double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.axis0.size(); ++i) {
    for (std::size_t j = 0; j < grid.axis1.size(); ++j) v[grid.index(i, j)] = f(grid.axis0[i], grid.axis1[j]);
  }
  return TensorField{grid, std::move(v)};
}

ApMembership ap_membership(double gamma, double p, std::span<const Interval> probe_balls) {
  require_p(p);
  if (probe_balls.empty()) throw ArgumentError("A_p estimate needs at least one probe interval");
  const bool verdict = gamma > -1.0 && gamma < p - 1.0;
  const double dual = -gamma / (p - 1.0);
  double worst = 0.0;
  for (const Interval& ball : probe_balls) {
    if (!(ball.b > ball.a) || ball.a < 0.0) throw ArgumentError("probe interval must satisfy 0 <= a < b");
    const double mw = power_mean(gamma, ball.a, ball.b);
    const double md = power_mean(dual, ball.a, ball.b);
    const double q = mw * std::pow(md, p - 1.0);
    worst = std::max(worst, q);
  }
  return {verdict, worst};
}

double weighted_lp_norm(const Grid1D& grid, std::span<const double> values, double p, const WeightSpec& weight) {
  require_p(p);
  return std::pow(lp_integral(grid, values, p, weight), 1.0 / p);
}

double weighted_sobolev_norm(const GridField& field, const SobolevSpec& spec) {
  if (field.values.size() != field.grid.size()) throw ArgumentError("field length does not match grid");
  return std::pow(sobolev_sum_1d(field.grid, field.values, spec), 1.0 / spec.p);
}

double weighted_sobolev_norm(const TensorField& field, const SobolevSpec& spec) {
  if (spec.k < 0) throw DomainError("negative-order Sobolev norms are not supported here");
  require_p(spec.p);
  if (field.values.size() != field.grid.size()) throw ArgumentError("field length does not match grid");
  double total = 0.0;
  std::vector<double> integrand(field.values.size());
  for (int order = 0; order <= spec.k; ++order) {
    for (int a0 = order; a0 >= 0; --a0) {
      const int a1 = order - a0;
      std::vector<double> d = order == 0 ? field.values : tensor_derivative(field.grid, field.values, a0, a1);
      for (std::size_t i = 0; i < d.size(); ++i) integrand[i] = std::pow(std::abs(d[i]), spec.p);
      total += std::max(0.0, weighted_integral(field.grid, integrand, spec.weight));
    }
  }
  return std::pow(total, 1.0 / spec.p);
}

double hardy_bound(double p, double gamma) { return p / (p - 1.0 - gamma); }

double hardy_ratio(const GridField& field, double p, double gamma) {
  require_p(p);
  if (!(gamma < p - 1.0)) {
    throw DomainError("Hardy inequality for trace-zero fields needs gamma < p - 1");
  }
  const Grid1D& grid = field.grid;
  std::vector<double> quotient(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) quotient[i] = field.values[i] / (grid[i] - grid.lower());
  Eigen::Map<const Eigen::VectorXd> f(field.values.data(), static_cast<Eigen::Index>(field.values.size()));
  Eigen::VectorXd df = diff_matrix(grid, 1) * f;
  const WeightSpec w{gamma, WeightReference::halfspace_x1};
  const double num = weighted_lp_norm(grid, quotient, p, w);
  const double den = weighted_lp_norm(grid, std::span<const double>(df.data(), grid.size()), p, w);
  if (den == 0.0) {
    if (num == 0.0) return 0.0;
    throw ArgumentError("Hardy ratio inconsistent: zero derivative norm with nonzero quotient norm");
  }
  return num / den;
}

GridField apply_M(const GridField& field, double theta) {
  GridField out = field;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] *= std::pow(field.grid[i] - field.grid.lower(), theta);
  }
  return out;
}

TensorField apply_M(const TensorField& field, double theta) {
  TensorField out = field;
  const auto& g = field.grid;
  for (std::size_t i = 0; i < g.axis0.size(); ++i) {
    const double m = std::pow(g.axis0[i] - g.axis0.lower(), theta);
    for (std::size_t j = 0; j < g.axis1.size(); ++j) out.values[g.index(i, j)] *= m;
  }
  return out;
}

namespace {

// Uniform-grid field in extended precision; invalid nodes are never read.
struct LdGrid {
  int n0;
  int n1;
  std::vector<long double> v;
  long double& at(int i, int j) { return v[static_cast<std::size_t>(i) * n1 + j]; }
  long double at(int i, int j) const { return v[static_cast<std::size_t>(i) * n1 + j]; }
};

LdGrid central_diff(const LdGrid& in, int axis, long double h) {
  LdGrid out{in.n0, in.n1, std::vector<long double>(in.v.size(), 0.0L)};
  for (int i = 0; i < in.n0; ++i) {
    for (int j = 0; j < in.n1; ++j) {
      if (axis == 0 && i > 0 && i + 1 < in.n0) out.at(i, j) = (in.at(i + 1, j) - in.at(i - 1, j)) / (2 * h);
      if (axis == 1 && j > 0 && j + 1 < in.n1) out.at(i, j) = (in.at(i, j + 1) - in.at(i, j - 1)) / (2 * h);
    }
  }
  return out;
}

LdGrid laplace(const LdGrid& in, int dim, long double h) {
  LdGrid out{in.n0, in.n1, std::vector<long double>(in.v.size(), 0.0L)};
  const long double ih2 = 1.0L / (h * h);
  for (int i = 1; i + 1 < in.n0; ++i) {
    for (int j = 0; j < in.n1; ++j) {
      long double s = (in.at(i + 1, j) - 2 * in.at(i, j) + in.at(i - 1, j)) * ih2;
      if (dim == 2) {
        if (j == 0 || j + 1 == in.n1) continue;
        s += (in.at(i, j + 1) - 2 * in.at(i, j) + in.at(i, j - 1)) * ih2;
      }
      out.at(i, j) = s;
    }
  }
  return out;
}

}  // namespace

CommutatorResidual commutator_residual(const SmoothFunction2D& g, std::array<int, 2> alpha, int dim,
                                       double h, std::array<double, 2> lower, std::array<double, 2> extent) {
  if (dim != 1 && dim != 2) throw ArgumentError("commutator check supports dim 1 or 2");
  if (alpha[0] < 0 || alpha[1] < 0 || alpha[0] + alpha[1] > 1) {
    throw ArgumentError("commutator check needs |alpha| <= 1");
  }
  if (dim == 1 && alpha[1] != 0) throw ArgumentError("alpha has a tangential component in 1D");
  if (!(h > 0.0)) throw ArgumentError("grid spacing must be positive");
  const int n0 = static_cast<int>(std::lround(extent[0] / h)) + 1;
  const int n1 = dim == 2 ? static_cast<int>(std::lround(extent[1] / h)) + 1 : 1;
  constexpr int kMargin = 3;
  if (n0 < 2 * kMargin + 1 || (dim == 2 && n1 < 2 * kMargin + 1)) {
    throw ArgumentError("grid too coarse for the nested commutator stencil (need >= 7 nodes per axis)");
  }
  const long double hl = h;
  LdGrid base{n0, n1, std::vector<long double>(static_cast<std::size_t>(n0) * n1)};
  auto x0 = [&](int i) { return static_cast<long double>(lower[0]) + i * hl; };
  auto x1 = [&](int j) { return dim == 2 ? static_cast<long double>(lower[1]) + j * hl : static_cast<long double>(lower[1]); };
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) base.at(i, j) = g(x0(i), x1(j));
  }
  LdGrid v = base;
  if (alpha[0] == 1) v = central_diff(base, 0, hl);
  if (alpha[1] == 1) v = central_diff(base, 1, hl);
  LdGrid mv = v;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) mv.at(i, j) *= x0(i);
  }
  const LdGrid lap_mv = laplace(mv, dim, hl);
  const LdGrid lap_v = laplace(v, dim, hl);
  const LdGrid bilap_mv = laplace(lap_mv, dim, hl);
  const LdGrid bilap_v = laplace(lap_v, dim, hl);

  CommutatorResidual r{0.0, 0.0};
  const int j_lo = dim == 2 ? kMargin : 0;
  const int j_hi = dim == 2 ? n1 - kMargin : 1;
  for (int i = kMargin; i < n0 - kMargin; ++i) {
    for (int j = j_lo; j < j_hi; ++j) {
      const long double a = x0(i);
      const long double b = x1(j);
      const long double c1 = lap_mv.at(i, j) - a * lap_v.at(i, j);
      const long double c2 = bilap_mv.at(i, j) - a * bilap_v.at(i, j);
      const long double exact1 = 2.0L * g.derivative(a, b, 1 + alpha[0], alpha[1]);
      long double lap_term = g.derivative(a, b, 3 + alpha[0], alpha[1]);
      if (dim == 2) lap_term += g.derivative(a, b, 1 + alpha[0], 2 + alpha[1]);
      const long double exact2 = 4.0L * lap_term;
      r.res1 = std::max(r.res1, static_cast<double>(std::fabs(c1 - exact1)));
      r.res2 = std::max(r.res2, static_cast<double>(std::fabs(c2 - exact2)));
    }
  }
  return r;
}

std::vector<MultiIndex> vanishing_trace_set(int k, double p, double gamma, int dim) {
  require_p(p);
  if (k < 0) throw DomainError("trace bookkeeping needs k >= 0");
  if (dim != 1 && dim != 2) throw ArgumentError("dimension must be 1 or 2");
  const double thr = (gamma + 1.0) / p;
  const double nearest = std::round(thr);
  if (nearest >= 1.0 && std::abs(thr - nearest) < 1e-12) {
    throw DomainError("gamma lies in the exceptional set {j p - 1 : j >= 1} (j = " +
                      std::to_string(static_cast<int>(nearest)) + ")");
  }
  std::vector<MultiIndex> out;
  for (int order = 0; order < k; ++order) {
    if (!(k - order > thr)) continue;
    if (dim == 1) {
      out.push_back({order, 0});
    } else {
      for (int a0 = order; a0 >= 0; --a0) out.push_back({a0, order - a0});
    }
  }
  return out;
}

std::vector<std::function<double(double)>> halfline_field_suite(int count) {
  std::vector<std::function<double(double)>> suite;
  suite.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double a = 0.6 + 0.075 * j;
    const double c = 0.5 * std::cos(0.7 * j);
    const double d = 0.4 * std::sin(1.3 * j + 0.2);
    const double b = 0.5 + 0.15 * j;
    suite.emplace_back([=](double x) { return (1.0 + c * x + d * std::sin(b * x)) * std::exp(-a * x); });
  }
  return suite;
}

RatioRange norm_monotonicity_ratios(const Grid1D& grid, std::span<const std::function<double(double)>> suite,
                                    int k, double p, double gamma) {
  RatioRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& f : suite) {
    GridField field = GridField::sample(grid, f);
    const double lo = weighted_sobolev_norm(field, {k, p, {gamma + k * p, WeightReference::halfspace_x1}});
    const double hi =
        weighted_sobolev_norm(field, {k + 1, p, {gamma + (k + 1) * p, WeightReference::halfspace_x1}});
    const double q = lo / hi;
    r.min = std::min(r.min, q);
    r.max = std::max(r.max, q);
  }
  return r;
}

RatioRange multiplication_equivalence_ratios(const Grid1D& grid,
                                             std::span<const std::function<double(double)>> suite, int k,
                                             double p, double gamma) {
  RatioRange r{std::numeric_limits<double>::infinity(), 0.0};
  const Eigen::SparseMatrix<double> d1 = diff_matrix(grid, 1);
  const SobolevSpec lower{k, p, {gamma + k * p, WeightReference::halfspace_x1}};
  const SobolevSpec upper{k + 1, p, {gamma + (k + 1) * p, WeightReference::halfspace_x1}};
  for (const auto& f : suite) {
    GridField field = GridField::sample(grid, f);
    Eigen::Map<const Eigen::VectorXd> fv(field.values.data(), static_cast<Eigen::Index>(field.values.size()));
    Eigen::VectorXd df = d1 * fv;
    GridField deriv{grid, std::vector<double>(df.data(), df.data() + df.size())};
    const double lhs =
        weighted_sobolev_norm(apply_M(field, 1.0), lower) + weighted_sobolev_norm(apply_M(deriv, 1.0), lower);
    const double q = lhs / weighted_sobolev_norm(field, upper);
    r.min = std::min(r.min, q);
    r.max = std::max(r.max, q);
  }
  return r;
}

}  // namespace platemr
