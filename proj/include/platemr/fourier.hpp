#pragma once

// Periodic stand-in for R^d: Fourier multipliers on the torus [0, 2 pi)^d
// with integer frequencies. Coefficients are stored in FFT order (axis 1
// fastest in 2D); f_hat(xi) = sum_x f(x) e^{-i x.xi}, and the inverse
// transform divides by the number of points.

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "platemr/pencil.hpp"

namespace platemr {

namespace detail {
struct FftPlans;
}

class TorusGrid {
 public:
  // n points per axis (power of two, >= 8), dimension d in {1, 2}.
  TorusGrid(int n, int d);

  int n() const { return n_; }
  int dim() const { return d_; }
  std::size_t size() const { return size_; }
  double spacing() const;

  // Integer frequency vector of flat index k (second entry 0 in 1D).
  std::array<int, 2> frequency(std::size_t k) const;
  double frequency_norm2(std::size_t k) const;
  // Flat index of frequency -xi.
  std::size_t mirror(std::size_t k) const;
  // Physical coordinate of node k.
  std::array<double, 2> node(std::size_t k) const;

  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  int n_;
  int d_;
  std::size_t size_;
  std::shared_ptr<const detail::FftPlans> plans_;
};

struct SpectralField {
  std::vector<Complex> coeffs;
};

struct SpectralPair {
  SpectralField u;
  SpectralField v;
};

SpectralField to_spectral(const TorusGrid& grid, std::span<const double> physical);
SpectralField to_spectral(const TorusGrid& grid, std::span<const Complex> physical);
std::vector<Complex> to_physical(const TorusGrid& grid, const SpectralField& f);

// max_k |c(xi) - conj(c(-xi))| relative to max_k |c(xi)|.
double conjugate_symmetry_defect(const TorusGrid& grid, const SpectralField& f);

// u = A(xi, lambda)^{-1} f mode by mode. SingularityError names the frequency.
SpectralPair torus_resolvent_apply(const TorusGrid& grid, const SpectralPair& f, Complex lambda, double rho);
SpectralPair torus_resolvent_apply_serial(const TorusGrid& grid, const SpectralPair& f, Complex lambda,
                                          double rho);

// (lambda + A(xi)) u mode by mode.
SpectralPair apply_shifted_symbol(const TorusGrid& grid, const SpectralPair& u, Complex lambda, double rho);

// sup_x |(lambda + A) u - f| / sup_x |f| evaluated after inverse transforms.
double physical_resolvent_residual(const TorusGrid& grid, const SpectralPair& f, const SpectralPair& u,
                                   Complex lambda, double rho);

// J_s f: multiply each mode by (1 + |xi|^2)^{s/2}.
SpectralField bessel_potential(const TorusGrid& grid, const SpectralField& f, double s);
SpectralPair bessel_potential(const TorusGrid& grid, const SpectralPair& f, double s);

// sup_x |R J_s f - J_s R f| / sup_x |J_s R f| in physical space.
double resolvent_bessel_commute_residual(const TorusGrid& grid, const SpectralPair& f, Complex lambda,
                                         double s, double rho);

struct MultiplierScan {
  double sup;
  double arg_lambda;  // |lambda| at the maximiser
  double arg_angle;   // arg lambda at the maximiser
  double arg_xi;      // |xi| at the maximiser
};

// sup over lambda = r e^{i theta}, r in `magnitudes`, |theta| <= pi - sigma
// (`angles` equispaced samples including both edges), and |xi| in `xi_norms`
// of the spectral norm of lambda D A(xi, lambda)^{-1} D^{-1},
// D = diag(1 + |xi|^2, 1). DomainError unless damping_angle(rho) < sigma < pi.
MultiplierScan multiplier_sector_sup(double rho, double sigma, std::span<const double> magnitudes,
                                     std::span<const double> xi_norms, int angles = 181);
MultiplierScan multiplier_sector_sup_serial(double rho, double sigma, std::span<const double> magnitudes,
                                            std::span<const double> xi_norms, int angles = 181);

// Graded multiplier norm at a single point.
double graded_multiplier_norm(double xi2, Complex lambda, double rho);

std::vector<double> log_samples(double lo, double hi, int count);

}  // namespace platemr
