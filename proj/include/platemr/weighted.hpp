#pragma once

// Power-weighted Sobolev machinery on graded grids: norms, Muckenhoupt
// checks, Hardy ratios, the multiplication operator M^theta u = x1^theta u,
// commutator identities and trace-vanishing bookkeeping.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "platemr/grid.hpp"
#include "platemr/quadrature.hpp"

namespace platemr {

struct SobolevSpec {
  int k = 0;
  double p = 2.0;
  WeightSpec weight{};
};

struct GridField {
  Grid1D grid;
  std::vector<double> values;

  static GridField sample(const Grid1D& grid, const std::function<double(double)>& f);
};

struct TensorField {
  GridTensor grid;
  std::vector<double> values;

  static TensorField sample(const GridTensor& grid, const std::function<double(double, double)>& f);
};

struct Interval {
  double a;
  double b;
};

struct ApMembership {
  bool verdict;
  double characteristic;  // max of the A_p quotient over the probe intervals
};

// Closed-form verdict gamma in (-1, p-1) for |x1|^gamma, plus the largest
// A_p quotient (mean w)(mean w^{-1/(p-1)})^{p-1} over the probes.
ApMembership ap_membership(double gamma, double p, std::span<const Interval> probe_balls);

// (sum_{j<=k} int |f^{(j)}|^p w dx)^{1/p}.
double weighted_sobolev_norm(const GridField& field, const SobolevSpec& spec);
// Tensor version: all multi-indices |alpha| <= k, weight in x1.
double weighted_sobolev_norm(const TensorField& field, const SobolevSpec& spec);

double weighted_lp_norm(const Grid1D& grid, std::span<const double> values, double p,
                        const WeightSpec& weight);

// ||f / x1||_{L^p(w_gamma)} / ||f'||_{L^p(w_gamma)} for a trace-zero sample.
double hardy_ratio(const GridField& field, double p, double gamma);
double hardy_bound(double p, double gamma);

GridField apply_M(const GridField& field, double theta);
TensorField apply_M(const TensorField& field, double theta);

// Smooth test function with analytic partial derivatives d^(a, b) g,
// evaluated in extended precision so that sampling error stays below the
// amplification of the nested difference stencils.
struct SmoothFunction2D {
  std::function<long double(long double, long double, int, int)> derivative;
  long double operator()(long double x1, long double x2) const { return derivative(x1, x2, 0, 0); }
};

struct CommutatorResidual {
  double res1;  // sup |[Delta, M d^alpha] g - 2 d1 d^alpha g|
  double res2;  // sup |[Delta^2, M d^alpha] g - 4 d1 d^alpha Delta g|
};

// Discrete commutators of the second-order difference Laplacian and
// bi-Laplacian with M d^alpha on a uniform grid with spacing h over
// [x1_lo, x1_lo + L1] (times [x2_lo, x2_lo + L2] when dim == 2), compared
// against the analytic right-hand sides at interior nodes. |alpha| <= 1.
CommutatorResidual commutator_residual(const SmoothFunction2D& g, std::array<int, 2> alpha, int dim,
                                       double h, std::array<double, 2> lower,
                                       std::array<double, 2> extent);

using MultiIndex = std::array<int, 2>;

// All alpha in N^dim with k - |alpha| > (gamma + 1)/p. Throws DomainError for
// gamma in {j p - 1 : j >= 1}.
std::vector<MultiIndex> vanishing_trace_set(int k, double p, double gamma, int dim = 2);

// Suite of smooth decaying fields on the half-line used for the norm
// equivalence audits.
std::vector<std::function<double(double)>> halfline_field_suite(int count = 20);

struct RatioRange {
  double min;
  double max;
};

// ||f||_{W^{k,p}(w_{gamma+kp})} / ||f||_{W^{k+1,p}(w_{gamma+(k+1)p})} over the suite.
RatioRange norm_monotonicity_ratios(const Grid1D& grid,
                                    std::span<const std::function<double(double)>> suite, int k,
                                    double p, double gamma);

// sum_{|alpha|<=1} ||M d^alpha f||_{W^{k,p}(w_{gamma+kp})} / ||f||_{W^{k+1,p}(w_{gamma+(k+1)p})}.
RatioRange multiplication_equivalence_ratios(const Grid1D& grid,
                                             std::span<const std::function<double(double)>> suite,
                                             int k, double p, double gamma);

}  // namespace platemr
