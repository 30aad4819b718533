#include "platemr/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>

#include "platemr/errors.hpp"
#include "platemr/parallel.hpp"

namespace platemr {

namespace detail {

struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
  // The FFTW planner is not re-entrant.
  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
};

}  // namespace detail

namespace {

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

std::string frequency_label(const TorusGrid& grid, std::size_t k) {
  const auto f = grid.frequency(k);
  std::ostringstream os;
  os << "xi = (" << f[0];
  if (grid.dim() == 2) os << ", " << f[1];
  os << ")";
  return os.str();
}

double sup_abs(std::span<const Complex> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// Largest singular value of a 2x2 complex matrix.
double spectral_norm(const SymbolMatrix& m) {
  const double fro2 = m.squaredNorm();
  const double det = std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  const double disc = std::max(0.0, fro2 * fro2 - 4.0 * det * det);
  return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
}

void check_pair(const TorusGrid& grid, const SpectralPair& f) {
  if (f.u.coeffs.size() != grid.size() || f.v.coeffs.size() != grid.size()) {
    throw ArgumentError("spectral field size does not match the torus grid");
  }
}

void resolvent_mode(const TorusGrid& grid, const SpectralPair& f, SpectralPair& out, std::size_t k,
                    Complex lambda, double rho) {
  const SymbolMatrix r = symbol_resolvent_from_norm2(grid.frequency_norm2(k), lambda, rho);
  const Complex a = f.u.coeffs[k];
  const Complex b = f.v.coeffs[k];
  out.u.coeffs[k] = r(0, 0) * a + r(0, 1) * b;
  out.v.coeffs[k] = r(1, 0) * a + r(1, 1) * b;
}

void check_sector(double rho, double sigma) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho must be positive");
  const double theta = damping_angle(rho);
  if (!(sigma > theta) || !(sigma < std::numbers::pi)) {
    std::ostringstream os;
    os << "sigma = " << sigma << " must lie in (theta(rho), pi) = (" << theta << ", pi)";
    throw DomainError(os.str());
  }
}

double angle_sample(double sigma, int angles, int k) {
  const double edge = std::numbers::pi - sigma;
  if (angles == 1) return edge;
  return -edge + 2.0 * edge * k / (angles - 1);
}

}  // namespace

TorusGrid::TorusGrid(int n, int d) : n_(n), d_(d) {
  if (n < 8 || (n & (n - 1)) != 0) throw ArgumentError("torus grid needs n >= 8, a power of two");
  if (d != 1 && d != 2) throw ArgumentError("torus grid dimension must be 1 or 2");
  size_ = d == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  auto plans = std::make_shared<detail::FftPlans>();
  std::vector<Complex> a(size_), b(size_);
  std::lock_guard<std::mutex> lock(detail::FftPlans::mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (d == 1) {
    plans->forward = fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
    plans->backward = fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  } else {
    plans->forward = fftw_plan_dft_2d(n, n, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
    plans->backward = fftw_plan_dft_2d(n, n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  }
  if (!plans->forward || !plans->backward) throw NumericError("FFTW planning failed");
  plans_ = std::move(plans);
}

double TorusGrid::spacing() const { return 2.0 * std::numbers::pi / n_; }

std::array<int, 2> TorusGrid::frequency(std::size_t k) const {
  auto wrap = [this](std::size_t i) {
    const int v = static_cast<int>(i);
    return v < n_ / 2 ? v : v - n_;
  };
  if (d_ == 1) return {wrap(k), 0};
  const auto n = static_cast<std::size_t>(n_);
  return {wrap(k / n), wrap(k % n)};
}

double TorusGrid::frequency_norm2(std::size_t k) const {
  const auto f = frequency(k);
  return static_cast<double>(f[0]) * f[0] + static_cast<double>(f[1]) * f[1];
}

std::size_t TorusGrid::mirror(std::size_t k) const {
  const auto n = static_cast<std::size_t>(n_);
  auto neg = [n](std::size_t i) { return (n - i) % n; };
  if (d_ == 1) return neg(k);
  return neg(k / n) * n + neg(k % n);
}

std::array<double, 2> TorusGrid::node(std::size_t k) const {
  const double h = spacing();
  if (d_ == 1) return {h * static_cast<double>(k), 0.0};
  const auto n = static_cast<std::size_t>(n_);
  return {h * static_cast<double>(k / n), h * static_cast<double>(k % n)};
}

void TorusGrid::forward(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != size_ || out.size() != size_) throw ArgumentError("transform size mismatch");
  std::vector<Complex> tmp(in.begin(), in.end());
  fftw_execute_dft(plans_->forward, as_fftw(tmp.data()), as_fftw(out.data()));
}

void TorusGrid::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != size_ || out.size() != size_) throw ArgumentError("transform size mismatch");
  std::vector<Complex> tmp(in.begin(), in.end());
  fftw_execute_dft(plans_->backward, as_fftw(tmp.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& z : out) z *= scale;
}

SpectralField to_spectral(const TorusGrid& grid, std::span<const double> physical) {
  std::vector<Complex> c(physical.begin(), physical.end());
  return to_spectral(grid, c);
}

SpectralField to_spectral(const TorusGrid& grid, std::span<const Complex> physical) {
  SpectralField f{std::vector<Complex>(grid.size())};
  grid.forward(physical, f.coeffs);
  return f;
}

std::vector<Complex> to_physical(const TorusGrid& grid, const SpectralField& f) {
  std::vector<Complex> out(grid.size());
  grid.inverse(f.coeffs, out);
  return out;
}

double conjugate_symmetry_defect(const TorusGrid& grid, const SpectralField& f) {
  double defect = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    defect = std::max(defect, std::abs(f.coeffs[k] - std::conj(f.coeffs[grid.mirror(k)])));
    scale = std::max(scale, std::abs(f.coeffs[k]));
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

SpectralPair torus_resolvent_apply_serial(const TorusGrid& grid, const SpectralPair& f, Complex lambda,
                                          double rho) {
  check_pair(grid, f);
  SpectralPair out{{std::vector<Complex>(grid.size())}, {std::vector<Complex>(grid.size())}};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    try {
      resolvent_mode(grid, f, out, k, lambda, rho);
    } catch (const SingularityError& e) {
      throw SingularityError(std::string(e.what()) + " at " + frequency_label(grid, k));
    }
  }
  return out;
}

SpectralPair torus_resolvent_apply(const TorusGrid& grid, const SpectralPair& f, Complex lambda, double rho) {
  check_pair(grid, f);
  // Validate rho and the singular set up front so the parallel loop cannot throw.
  const PencilRoots r = pencil_roots(rho);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double xi2 = grid.frequency_norm2(k);
    if (std::abs(r.plus * lambda + xi2) < 1e-300 || std::abs(r.minus * lambda + xi2) < 1e-300) {
      return torus_resolvent_apply_serial(grid, f, lambda, rho);  // raises with the frequency
    }
  }
  SpectralPair out{{std::vector<Complex>(grid.size())}, {std::vector<Complex>(grid.size())}};
  const auto total = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for num_threads(thread_limit()) schedule(static)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    resolvent_mode(grid, f, out, static_cast<std::size_t>(k), lambda, rho);
  }
  return out;
}

SpectralPair apply_shifted_symbol(const TorusGrid& grid, const SpectralPair& u, Complex lambda, double rho) {
  check_pair(grid, u);
  SpectralPair out{{std::vector<Complex>(grid.size())}, {std::vector<Complex>(grid.size())}};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double xi2 = grid.frequency_norm2(k);
    const Complex a = u.u.coeffs[k];
    const Complex b = u.v.coeffs[k];
    out.u.coeffs[k] = lambda * a - b;
    out.v.coeffs[k] = xi2 * xi2 * a + (lambda + rho * xi2) * b;
  }
  return out;
}

double physical_resolvent_residual(const TorusGrid& grid, const SpectralPair& f, const SpectralPair& u,
                                   Complex lambda, double rho) {
  const SpectralPair back = apply_shifted_symbol(grid, u, lambda, rho);
  const auto bu = to_physical(grid, back.u);
  const auto bv = to_physical(grid, back.v);
  const auto fu = to_physical(grid, f.u);
  const auto fv = to_physical(grid, f.v);
  double diff = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    diff = std::max({diff, std::abs(bu[k] - fu[k]), std::abs(bv[k] - fv[k])});
  }
  const double scale = std::max(sup_abs(fu), sup_abs(fv));
  return scale > 0.0 ? diff / scale : diff;
}

SpectralField bessel_potential(const TorusGrid& grid, const SpectralField& f, double s) {
  if (f.coeffs.size() != grid.size()) throw ArgumentError("spectral field size does not match the torus grid");
  SpectralField out{std::vector<Complex>(grid.size())};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.coeffs[k] = f.coeffs[k] * std::pow(1.0 + grid.frequency_norm2(k), 0.5 * s);
  }
  return out;
}

SpectralPair bessel_potential(const TorusGrid& grid, const SpectralPair& f, double s) {
  return {bessel_potential(grid, f.u, s), bessel_potential(grid, f.v, s)};
}

double resolvent_bessel_commute_residual(const TorusGrid& grid, const SpectralPair& f, Complex lambda,
                                         double s, double rho) {
  const SpectralPair a = torus_resolvent_apply(grid, bessel_potential(grid, f, s), lambda, rho);
  const SpectralPair b = bessel_potential(grid, torus_resolvent_apply(grid, f, lambda, rho), s);
  const auto au = to_physical(grid, a.u), av = to_physical(grid, a.v);
  const auto bu = to_physical(grid, b.u), bv = to_physical(grid, b.v);
  double diff = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    diff = std::max({diff, std::abs(au[k] - bu[k]), std::abs(av[k] - bv[k])});
  }
  const double scale = std::max(sup_abs(bu), sup_abs(bv));
  return scale > 0.0 ? diff / scale : diff;
}

double graded_multiplier_norm(double xi2, Complex lambda, double rho) {
  SymbolMatrix m = lambda * symbol_resolvent_from_norm2(xi2, lambda, rho);
  const double g = 1.0 + xi2;
  m(0, 1) *= g;
  m(1, 0) /= g;
  return spectral_norm(m);
}

MultiplierScan multiplier_sector_sup_serial(double rho, double sigma, std::span<const double> magnitudes,
                                            std::span<const double> xi_norms, int angles) {
  check_sector(rho, sigma);
  if (magnitudes.empty() || xi_norms.empty() || angles < 1) throw ArgumentError("empty multiplier scan");
  MultiplierScan best{-1.0, 0.0, 0.0, 0.0};
  for (double xi : xi_norms) {
    for (double r : magnitudes) {
      for (int a = 0; a < angles; ++a) {
        const double th = angle_sample(sigma, angles, a);
        const double v = graded_multiplier_norm(xi * xi, std::polar(r, th), rho);
        if (v > best.sup) best = {v, r, th, xi};
      }
    }
  }
  return best;
}

MultiplierScan multiplier_sector_sup(double rho, double sigma, std::span<const double> magnitudes,
                                     std::span<const double> xi_norms, int angles) {
  check_sector(rho, sigma);
  if (magnitudes.empty() || xi_norms.empty() || angles < 1) throw ArgumentError("empty multiplier scan");
  const auto nx = static_cast<std::ptrdiff_t>(xi_norms.size());
  std::vector<MultiplierScan> per(xi_norms.size(), MultiplierScan{-1.0, 0.0, 0.0, 0.0});
#pragma omp parallel for num_threads(thread_limit()) schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < nx; ++i) {
    const double xi = xi_norms[static_cast<std::size_t>(i)];
    MultiplierScan& b = per[static_cast<std::size_t>(i)];
    for (double r : magnitudes) {
      for (int a = 0; a < angles; ++a) {
        const double th = angle_sample(sigma, angles, a);
        const double v = graded_multiplier_norm(xi * xi, std::polar(r, th), rho);
        if (v > b.sup) b = {v, r, th, xi};
      }
    }
  }
  // Same tie-breaking as the serial loop: first maximiser in xi order.
  MultiplierScan best = per.front();
  for (const auto& b : per) {
    if (b.sup > best.sup) best = b;
  }
  return best;
}

std::vector<double> log_samples(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw ArgumentError("log samples need 0 < lo <= hi, count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  }
  return out;
}

}  // namespace platemr
