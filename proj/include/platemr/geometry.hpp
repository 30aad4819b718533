#pragma once

// Special domains O = {x1 > h(x~)} in two dimensions, the boundary-straightening
// pullback Phi(x) = (x1 - h1(x), x~) with inverse Phi^{-1}(y) = (y1 + h2(y), y~)
// built from a scale-dependent mollification of h, and partitions of unity.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "platemr/grid.hpp"
#include "platemr/quadrature.hpp"
#include "platemr/weighted.hpp"

namespace platemr {

using Point2 = std::array<double, 2>;

// Compactly supported boundary height function on R.
struct HeightProfile {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::vector<double> breakpoints;  // points where h loses smoothness
  double support_radius = 0.0;
  double lipschitz = 0.0;  // sup |h'|
};

// Named shapes scaled so that sup |h'| equals `scale`:
//   zero, hat (max(0, 1-|x|)), bump (exp(1/(x^2-1))), holder (|x|^{1+kappa} times
//   a smooth cutoff).
HeightProfile make_profile(const std::string& name, double scale, double kappa = 0.5);

struct SpecialDomain {
  HeightProfile h;
  int ell = 1;
  double kappa = 0.0;
  double seminorm = 0.0;  // scale of h, equal to its Lipschitz constant

  bool contains(const Point2& x) const { return x[0] > h.value(x[1]); }
};

SpecialDomain make_special_domain(const std::string& profile, double seminorm, double kappa = 0.5);

// max over sample pairs of |D^ell h(x) - D^ell h(y)| / |x - y|^kappa, ell in {0, 1}.
double holder_seminorm_estimate(const HeightProfile& h, int ell, double kappa,
                                std::span<const std::array<double, 2>> sample_pairs);

class PullbackMap {
 public:
  // Throws ConstructionError when c * Lip(h) >= 1 or when a sampled
  // |d1 h2| reaches 1.
  static PullbackMap build(const SpecialDomain& domain, double c = 0.25);

  const SpecialDomain& domain() const { return domain_; }
  double mollifier_scale() const { return c_; }

  double h2(double y1, double yt) const;
  // d^(a, b) h2 with a derivatives in y1 and b in y~.
  double h2_derivative(double y1, double yt, int a, int b) const;
  double h1(const Point2& x) const;

  Point2 forward(const Point2& x) const;  // Phi
  Point2 inverse(const Point2& y) const;  // Phi^{-1}

  // Jacobian of Phi at x: [[1 - d1 h1, -d2 h1], [0, 1]].
  std::array<double, 4> jacobian(const Point2& x) const;

  double max_normal_slope() const { return max_d1_h2_; }

 private:
  PullbackMap(SpecialDomain domain, double c) : domain_(std::move(domain)), c_(c) {}

  SpecialDomain domain_;
  double c_;
  double max_d1_h2_ = 0.0;
};

// Mollifier with unit mass supported in [-1, 1] and its derivatives.
double mollifier(double s, int derivative = 0);

// dist(x, boundary) by multi-start local minimisation over the graph of h.
double boundary_distance(const HeightProfile& h, const Point2& x);

struct DistanceReport {
  double c_low;
  double c_high;
};

DistanceReport distance_equivalence_report(const PullbackMap& map, std::span<const Point2> samples);

// Points x = (h(x~) + t, x~) with t in (0, depth], x~ in [-width, width].
std::vector<Point2> domain_samples(const SpecialDomain& domain, std::size_t count, std::uint64_t seed,
                                   double depth = 1.0, double width = 2.0);

struct BlowupFit {
  double slope;
  std::vector<double> y1;
  std::vector<double> sup_derivative;
};

// Log-log regression of sup_{y~} max_{|alpha| = order} |d^alpha h2(y1, y~)|
// against y1 over [y1_min, y1_max]. order >= 2.
BlowupFit derivative_blowup_slopes(const PullbackMap& map, int order, double y1_min = 1e-4,
                                   double y1_max = 1e-1, int samples = 16);

// Field sampled on a boundary-fitted grid: node (i, j) sits at
// x = (h(x~_j) + s_i, x~_j) where (s_i, x~_j) runs over `grid`.
struct DomainField {
  GridTensor grid;
  std::vector<double> values;

  static DomainField sample(const SpecialDomain& domain, const GridTensor& grid,
                            const std::function<double(const Point2&)>& f);
};

// (Phi_* f)(y) = f(Phi^{-1}(y)) on the half-space grid `target` (same
// tangential nodes), by linear interpolation along the normal lines.
TensorField pushforward_field(const DomainField& f, const PullbackMap& map, const GridTensor& target);
// ((Phi^{-1})_* g)(x) = g(Phi(x)) on the boundary-fitted grid `target`.
DomainField pullback_field(const TensorField& g, const PullbackMap& map, const GridTensor& target);

// ||f||_{L^p(O, dist^gamma)} on a boundary-fitted grid.
double domain_lp_norm(const DomainField& f, const SpecialDomain& domain, double p, double gamma);

struct Patch {
  int dim = 1;
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
};

class PartitionOfUnity {
 public:
  const std::vector<Patch>& cover() const { return cover_; }
  std::size_t size() const { return cover_.size(); }
  // eta_n = psi_n / sqrt(sum_m psi_m^2)
  double eta(std::size_t n, const Point2& x) const;
  double raw_bump(std::size_t n, const Point2& x) const;

 private:
  friend PartitionOfUnity build_partition(std::vector<Patch> cover, std::span<const Point2> nodes);
  std::vector<Patch> cover_;
};

// Throws ConstructionError listing every node not covered by an open patch.
PartitionOfUnity build_partition(std::vector<Patch> cover, std::span<const Point2> nodes);

// max_i |sum_n eta_n (eta_n f)(x_i) - f(x_i)|.
double retraction_roundtrip(std::span<const double> field, std::span<const Point2> nodes,
                            const PartitionOfUnity& pou);

// max_i |sum_n eta_n(x_i)^2 - 1|.
double partition_deviation(std::span<const Point2> nodes, const PartitionOfUnity& pou);

}  // namespace platemr
