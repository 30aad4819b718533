#pragma once

// Time integration of d/dt v + A_h v = (0, f) for the clamped plate with
// structural damping, energy and decay diagnostics, boundary lifts and
// temporally weighted maximal-regularity ratios.

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "platemr/discrete.hpp"
#include "platemr/verdict.hpp"

namespace platemr {

struct TimeGrid {
  double horizon = 1.0;
  int steps = 2;
  bool truncated = false;  // stands in for T = infinity

  double dt() const { return horizon / steps; }
  double time(int n) const { return horizon * n / steps; }
};

TimeGrid make_time_grid(double horizon, int steps, bool truncated = false);

// f(t, x1, x2); an empty function means f = 0.
using SourceFn = std::function<double(double, double, double)>;

struct SourceField {
  std::string name;
  SourceFn f;
};

// Named sources: zero, sine-quartic, gauss-pulse, oscillating, manufactured
// (the last one is built for u* = t^2 q(x) and depends on rho).
SourceField make_source(const std::string& name, int dim, double rho = 1.0);

// Sources used by the maximal-regularity audit.
std::vector<SourceField> mr_source_suite(int dim = 1);

// Factorises I + theta dt A once; immutable afterwards and safe to share.
class ThetaStepper {
 public:
  ThetaStepper(const BlockOperatorA& a, double dt, double theta);

  // (I + theta dt A) v' = (I - (1 - theta) dt A) v + dt (0, fbar).
  Eigen::VectorXd step(const Eigen::VectorXd& v, const Eigen::VectorXd& fbar) const;

  double dt() const { return dt_; }
  double theta() const { return theta_; }
  double rho() const { return rho_; }
  Eigen::Index block_size() const { return block_; }

 private:
  double dt_;
  double theta_;
  double rho_;
  Eigen::Index block_;
  SparseOperator explicit_;
  std::shared_ptr<Eigen::SparseLU<SparseOperator>> lu_;
};

Eigen::VectorXd step_theta(const BlockOperatorA& a, const Eigen::VectorXd& v, const Eigen::VectorXd& fbar,
                           double dt, double theta);

// Real part of a random complex combination of the `count` eigenvectors of
// A with smallest modulus, scaled to max |u| = 1. The trajectory started
// there stays in a slow invariant subspace (dense eigensolve, dim <= 4000).
Eigen::VectorXd slow_mode_state(const BlockOperatorA& a, int count, std::uint64_t seed);

struct Trajectory {
  RectGrid grid;
  double rho = 1.0;
  double theta = 0.5;
  TimeGrid time;
  SourceFn source;
  std::vector<Eigen::VectorXd> states;  // (u_n, w_n), n = 0..steps

  Eigen::VectorXd u(std::size_t n) const;
  Eigen::VectorXd w(std::size_t n) const;
  std::string scheme() const;
};

// v(0) = v0 (zero when empty).
Trajectory solve_cauchy(const BlockOperatorA& a, const RectGrid& grid, const SourceFn& f, const TimeGrid& time,
                        double theta, const Eigen::VectorXd& v0 = {});
Trajectory solve_cauchy(const ThetaStepper& stepper, const RectGrid& grid, const SourceFn& f, const TimeGrid& time,
                        const Eigen::VectorXd& v0 = {});

// E = h^d (u.Bu + w.w), D = h^d w.(-L)w. The balance residual is
// |dE/dt + rho (D_n + D_{n+1}) - (f_n.w_n + f_{n+1}.w_{n+1}) h^d| per step.
struct EnergyReport {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> dissipation;
  double max_increase = 0.0;  // max_n (E_{n+1} - E_n) / max(E_0, tiny)
  bool monotone = true;       // E_{n+1} <= E_n + 1e-12 E_n at every step
  double balance_residual = 0.0;
  double tail_energy = 0.0;   // E at the final time, reported for truncated horizons
};

EnergyReport energy_dissipation_check(const Trajectory& traj);

struct DecayFit {
  double rate = 0.0;        // -d/dt log E, least squares over the fit window
  double e_foldings = 0.0;  // log(E_0 / E_N)
  Verdict verdict = Verdict::skipped;
};

// Fits log E_n for t_n >= fit_from * T. Zero energy is reported as skipped,
// a non-positive rate as fail.
DecayFit decay_rate(const EnergyReport& energy, double fit_from = 0.25);

// Analytic extension E(t, x) of the boundary data g0 = E|_boundary and
// g1 = d_n E|_boundary, with the derivatives that enter the induced source
// f~ = f - (d_t^2 + Delta^2 - rho Delta d_t) E.
struct BoundaryLift {
  std::string name;
  std::function<double(double, double, double)> value;
  std::function<double(double, double, double)> dt;
  std::function<double(double, double, double)> dtt;
  std::function<double(double, double, double)> bilaplacian;
  std::function<double(double, double, double)> laplacian_dt;
  std::function<std::array<double, 2>(double, double, double)> gradient;
};

// zero, ramp (t^2 x1), cutoff (t^2 eta(x) with eta = 1 and d_n eta = 0 on the boundary).
BoundaryLift make_lift(const std::string& name, int dim);

// Throws ArgumentError unless E(0, .) = d_t E(0, .) = 0 on the closed grid.
void check_lift_compatibility(const BoundaryLift& lift, const RectGrid& grid);

struct InhomogeneousSolution {
  Trajectory homogeneous;               // u~ with homogeneous clamped data
  std::vector<Eigen::VectorXd> u;       // u~ + E at the interior nodes
  std::vector<double> boundary_residual;  // max |u - g0|, |d_n u - g1| over boundary nodes
};

InhomogeneousSolution solve_inhomogeneous(const BlockOperatorA& a, const RectGrid& grid, const SourceFn& f,
                                          const BoundaryLift& lift, const TimeGrid& time, double theta = 0.5);

// Boundary residual of an interior field u~ + E at time t: |u - g0| and the
// one-sided second-order normal difference against g1 = d_n E. Pass an empty
// lift for homogeneous data.
double boundary_residual(const RectGrid& grid, const Eigen::VectorXd& u_interior, const BoundaryLift* lift, double t);

struct NormSpec {
  double q = 2.0;
  double mu = 0.0;
  double p = 2.0;
  double gamma = 0.5;
  int k = 2;
};

void validate_norm_spec(const NormSpec& spec);

struct MRRefinement {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  double u_norm = 0.0;
  double f_norm = 0.0;
  double ratio = 0.0;
};

struct MRFieldReport {
  std::string name;
  std::vector<MRRefinement> refinements;
  double drift = 0.0;  // max ratio / min ratio - 1
  Verdict verdict = Verdict::skipped;
};

struct MRReport {
  NormSpec spec;
  std::vector<MRFieldReport> fields;
  double max_ratio = 0.0;
  double max_drift = 0.0;
  Verdict verdict = Verdict::skipped;
};

struct MROptions {
  double rho = 1.0;
  double horizon = 1.0;
  double theta = 0.5;
  int dim = 1;
  double dt_per_h = 1.0;  // dt = dt_per_h * h
  double drift_bound = 0.2;
};

// Ratio for one trajectory with homogeneous boundary data; NaN when f = 0.
MRRefinement mr_ratio(const Trajectory& traj, const BlockOperatorA& a, const NormSpec& spec);

// ||u||_U / ||f||_F with U the sum of L^q(t^mu; W^{k-2,p}(w)) for d_t^2 u and
// L^q(t^mu; W^{k+2,p}(w)) for u, F = L^q(t^mu; W^{k-2,p}(w)), w the boundary
// distance to the power gamma + k p. Only k = 2 is implemented. One run per
// (field, n) with n interior nodes per axis.
MRReport mr_ratio_report(const std::vector<SourceField>& suite, const NormSpec& spec, const std::vector<int>& ns,
                         const MROptions& opt = {});

// Spatial pieces of the ratio, exposed for tests: W^{m,p}(w_beta) norm of
// an interior field with clamped extension (m <= 4), and the L^q(t^mu)
// norm of a sampled scalar function of time.
double clamped_sobolev_norm(const RectGrid& grid, const Eigen::VectorXd& u, int m, double p, double beta);
double temporal_norm(const TimeGrid& time, const std::vector<double>& values, double q, double mu);

}  // namespace platemr
