#include "platemr/mapped.hpp"

#include <cmath>

#include "platemr/errors.hpp"
#include "platemr/parallel.hpp"
#include "platemr/weighted.hpp"

namespace platemr {

namespace {

using Triplet = Eigen::Triplet<double>;

// d/dy1 (axis 0) and d/dy~ (axis 1) on the flattened tensor grid.
SparseOperator axis_derivative(const GridTensor& g, int axis) {
  const auto n0 = static_cast<Eigen::Index>(g.axis0.size());
  const auto n1 = static_cast<Eigen::Index>(g.axis1.size());
  const SparseOperator d = diff_matrix(axis == 0 ? g.axis0 : g.axis1, 1);
  std::vector<Triplet> t;
  for (Eigen::Index k = 0; k < d.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(d, k); it; ++it) {
      if (axis == 0) {
        for (Eigen::Index j = 0; j < n1; ++j) t.emplace_back(it.row() * n1 + j, it.col() * n1 + j, it.value());
      } else {
        for (Eigen::Index i = 0; i < n0; ++i) t.emplace_back(i * n1 + it.row(), i * n1 + it.col(), it.value());
      }
    }
  }
  SparseOperator m(n0 * n1, n0 * n1);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseOperator diagonal(const std::vector<double>& v) {
  SparseOperator m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < v.size(); ++i) t.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), v[i]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

double sobolev(const GridTensor& g, const Eigen::VectorXd& v, int k, double p, double gamma) {
  TensorField f{g, std::vector<double>(v.data(), v.data() + v.size())};
  return weighted_sobolev_norm(f, SobolevSpec{k, p, WeightSpec{gamma, WeightReference::halfspace_x1}});
}

Eigen::VectorXd sample(const GridTensor& g, const std::function<double(double, double)>& f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.axis0.size(); ++i) {
    for (std::size_t j = 0; j < g.axis1.size(); ++j) {
      v(static_cast<Eigen::Index>(g.index(i, j))) = f(g.axis0[i], g.axis1[j]);
    }
  }
  return v;
}

}  // namespace

MappedLaplacian mapped_laplacian(const GridTensor& grid, const PullbackMap& map) {
  if (!(grid.axis0.lower() >= 0.0)) throw ArgumentError("half-space grid must have y1 >= 0");
  if (grid.axis0.size() < 7 || grid.axis1.size() < 7) throw ArgumentError("mapped Laplacian needs >= 7 nodes per axis");
  if (grid.axis0[0] <= 0.0) throw ArgumentError("half-space grid nodes must satisfy y1 > 0");
  const SparseOperator p1 = axis_derivative(grid, 0);
  const SparseOperator p2 = axis_derivative(grid, 1);
  std::vector<double> inv(grid.size()), shear(grid.size());
  const auto total = static_cast<std::ptrdiff_t>(grid.size());
  const std::size_t n1 = grid.axis1.size();
#pragma omp parallel for num_threads(thread_limit()) schedule(dynamic, 32)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const double y1 = grid.axis0[static_cast<std::size_t>(k) / n1];
    const double yt = grid.axis1[static_cast<std::size_t>(k) % n1];
    const double a1 = map.h2_derivative(y1, yt, 1, 0);
    const double a2 = map.h2_derivative(y1, yt, 0, 1);
    inv[static_cast<std::size_t>(k)] = 1.0 / (1.0 + a1);
    shear[static_cast<std::size_t>(k)] = a2 / (1.0 + a1);
  }
  const SparseOperator d1 = diagonal(inv) * p1;
  const SparseOperator d2 = p2 - diagonal(shear) * p1;
  MappedLaplacian m;
  m.plain = p1 * p1 + p2 * p2;
  m.mapped = d1 * d1 + d2 * d2;
  return m;
}

std::vector<DefectField> defect_field_suite() {
  return {
      {"gauss-clamped", [](double y1, double yt) { return y1 * y1 * std::exp(-2.0 * y1 - yt * yt); },
       [](double y1, double yt) { return std::exp(-y1 - yt * yt); }},
      {"oscillating", [](double y1, double yt) { return y1 * y1 * std::exp(-y1) * std::cos(2.0 * yt) * std::exp(-0.5 * yt * yt); },
       [](double, double) { return 0.0; }},
      {"velocity-only", [](double, double) { return 0.0; },
       [](double y1, double yt) { return y1 * std::exp(-y1) * std::sin(yt + 0.3) * std::exp(-yt * yt); }},
  };
}

DefectReport mapped_operator_defect(const GridTensor& grid, const PullbackMap& map, double rho,
                                    const std::vector<DefectField>& suite, const DefectOptions& opt) {
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  if (opt.k < 2) throw DomainError("defect norms need k >= 2");
  if (!(opt.p >= 1.0)) throw DomainError("p must be >= 1");
  if (suite.empty()) throw ArgumentError("defect needs at least one field");
  const MappedLaplacian lap = mapped_laplacian(grid, map);
  const double weight = opt.gamma + opt.k * opt.p;
  DefectReport rep{0.0, {}};
  for (const auto& f : suite) {
    const Eigen::VectorXd u = sample(grid, f.u);
    const Eigen::VectorXd w = sample(grid, f.w);
    const Eigen::VectorXd lu = lap.plain * u;
    const Eigen::VectorXd mu = lap.mapped * u;
    const Eigen::VectorXd b = (lap.mapped * mu - lap.plain * lu) - rho * (lap.mapped * w - lap.plain * w);
    const double num = sobolev(grid, b, opt.k - 2, opt.p, weight);
    const double den = sobolev(grid, u, opt.k + 2, opt.p, weight) + sobolev(grid, w, opt.k, opt.p, weight);
    if (!(den > 0.0)) throw ArgumentError("defect field '" + f.name + "' has zero D-norm");
    rep.per_field.push_back(num / den);
    rep.ratio = std::max(rep.ratio, num / den);
  }
  return rep;
}

ScalingFit defect_scaling(const GridTensor& grid, const std::string& profile, std::span<const double> seminorms,
                          double rho, double c, const DefectOptions& options) {
  if (seminorms.size() < 2) throw ArgumentError("scaling fit needs at least two seminorms");
  ScalingFit fit;
  const auto suite = defect_field_suite();
  for (double s : seminorms) {
    if (!(s > 0.0)) throw DomainError("seminorms must be positive for a log-log fit");
    const auto map = PullbackMap::build(make_special_domain(profile, s), c);
    fit.seminorms.push_back(s);
    fit.ratios.push_back(mapped_operator_defect(grid, map, rho, suite, options).ratio);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(fit.ratios.size());
  for (std::size_t i = 0; i < fit.ratios.size(); ++i) {
    const double lx = std::log(fit.seminorms[i]);
    const double ly = std::log(fit.ratios[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

GridTensor defect_grid(int n1, int n2, double depth, double width) {
  return {Grid1D::graded(depth, n1, 2.0), Grid1D::uniform_closed(-width, width, n2)};
}

}  // namespace platemr
