#include "platemr/stencil.hpp"

#include <cmath>
#include <string>

#include "platemr/errors.hpp"
#include "platemr/parallel.hpp"

namespace platemr {

namespace {

using Triplet = Eigen::Triplet<double>;

// Ghost-aware lookup along one axis: index i in [-1, n + 2] maps to an
// interior index (or -1 for a zero boundary value).
int resolve(int i, int n) {
  if (i == 0 || i == n + 1) return -1;
  if (i == -1) return 1;
  if (i == n + 2) return n;
  return i;
}

struct Tap {
  int d0;
  int d1;
  double w;
};

// Delta_h^2 = (D_xx + D_yy)^2 as a 13-point stencil; 1D uses the first five taps.
constexpr Tap kTaps2[] = {{0, 0, 20.0},  {1, 0, -8.0},  {-1, 0, -8.0}, {0, 1, -8.0}, {0, -1, -8.0},
                          {1, 1, 2.0},   {1, -1, 2.0},  {-1, 1, 2.0},  {-1, -1, 2.0}, {2, 0, 1.0},
                          {-2, 0, 1.0},  {0, 2, 1.0},   {0, -2, 1.0}};
constexpr Tap kTaps1[] = {{0, 0, 6.0}, {1, 0, -4.0}, {-1, 0, -4.0}, {2, 0, 1.0}, {-2, 0, 1.0}};

void check(const RectGrid& g, int min_nodes) {
  if (g.dim != 1 && g.dim != 2) throw ArgumentError("grid dimension must be 1 or 2");
  if (g.n < min_nodes) {
    throw ArgumentError("operator needs at least " + std::to_string(min_nodes) + " interior nodes per axis");
  }
}

template <class Emit>
void biharmonic_row(const RectGrid& g, int i0, int i1, Emit&& emit) {
  const double s = 1.0 / std::pow(g.h(), 4);
  const int n = g.n;
  if (g.dim == 1) {
    for (const auto& t : kTaps1) {
      const int j = resolve(i0 + 1 + t.d0, n);
      if (j > 0) emit(static_cast<std::size_t>(j - 1), t.w * s);
    }
    return;
  }
  for (const auto& t : kTaps2) {
    const int a = resolve(i0 + 1 + t.d0, n);
    const int b = resolve(i1 + 1 + t.d1, n);
    if (a > 0 && b > 0) emit(static_cast<std::size_t>(a - 1) * n + static_cast<std::size_t>(b - 1), t.w * s);
  }
}

void apply_rows(const RectGrid& g, std::span<const double> u, std::span<double> out, std::ptrdiff_t begin,
                std::ptrdiff_t end) {
  const auto n = static_cast<std::ptrdiff_t>(g.n);
  for (std::ptrdiff_t k = begin; k < end; ++k) {
    const int i0 = static_cast<int>(g.dim == 1 ? k : k / n);
    const int i1 = static_cast<int>(g.dim == 1 ? 0 : k % n);
    double acc = 0.0;
    biharmonic_row(g, i0, i1, [&](std::size_t col, double w) { acc += w * u[col]; });
    out[static_cast<std::size_t>(k)] = acc;
  }
}

}  // namespace

std::array<double, 2> RectGrid::node(std::size_t k) const {
  const double hh = h();
  if (dim == 1) return {hh * static_cast<double>(k + 1), 0.0};
  const auto nn = static_cast<std::size_t>(n);
  return {hh * static_cast<double>(k / nn + 1), hh * static_cast<double>(k % nn + 1)};
}

RectGrid make_rect_grid(int dim, int n, double length) {
  if (!(length > 0.0)) throw ArgumentError("grid length must be positive");
  RectGrid g{dim, n, length};
  check(g, 1);
  return g;
}

SparseOperator laplacian_dirichlet(const RectGrid& g) {
  check(g, 3);
  const double s = 1.0 / (g.h() * g.h());
  const int n = g.n;
  std::vector<Triplet> t;
  SparseOperator L(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  auto idx = [&](int a, int b) { return g.dim == 1 ? a : a * n + b; };
  const int n1 = g.dim == 1 ? 1 : n;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n1; ++b) {
      const int r = idx(a, b);
      t.emplace_back(r, r, -2.0 * g.dim * s);
      if (a > 0) t.emplace_back(r, idx(a - 1, b), s);
      if (a + 1 < n) t.emplace_back(r, idx(a + 1, b), s);
      if (g.dim == 2) {
        if (b > 0) t.emplace_back(r, idx(a, b - 1), s);
        if (b + 1 < n) t.emplace_back(r, idx(a, b + 1), s);
      }
    }
  }
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

SparseOperator biharmonic_clamped(const RectGrid& g) {
  check(g, 5);
  std::vector<Triplet> t;
  const int n1 = g.dim == 1 ? 1 : g.n;
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < n1; ++b) {
      const auto r = static_cast<Eigen::Index>(g.dim == 1 ? a : a * g.n + b);
      biharmonic_row(g, a, b, [&](std::size_t col, double w) { t.emplace_back(r, static_cast<Eigen::Index>(col), w); });
    }
  }
  SparseOperator B(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  B.setFromTriplets(t.begin(), t.end());  // duplicates from reflected ghosts are summed
  return B;
}

void apply_biharmonic_serial(const RectGrid& g, std::span<const double> u, std::span<double> out) {
  check(g, 5);
  if (u.size() != g.size() || out.size() != g.size()) throw ArgumentError("vector size does not match grid");
  apply_rows(g, u, out, 0, static_cast<std::ptrdiff_t>(g.size()));
}

void apply_biharmonic(const RectGrid& g, std::span<const double> u, std::span<double> out) {
  check(g, 5);
  if (u.size() != g.size() || out.size() != g.size()) throw ArgumentError("vector size does not match grid");
  const auto total = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel num_threads(thread_limit())
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < total; ++k) apply_rows(g, u, out, k, k + 1);
  }
}

std::vector<double> sample_interior(const RectGrid& g, const std::function<double(double, double)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto x = g.node(k);
    v[k] = f(x[0], x[1]);
  }
  return v;
}

}  // namespace platemr
