#include "platemr/discrete.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "platemr/errors.hpp"
#include "platemr/parallel.hpp"

namespace platemr {

namespace {

using Triplet = Eigen::Triplet<double>;

// C^T from the Cholesky factorisation B = C C^T, so that |x|_E = |T x|_2
// with T = diag(C^T, I).
Eigen::MatrixXd energy_factor(const BlockOperatorA& a) {
  const Eigen::MatrixXd b(a.B);
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) throw NumericError("bi-Laplacian is not positive definite");
  return llt.matrixL().transpose();
}

}  // namespace

BlockOperatorA assemble_A(const SparseOperator& L, const SparseOperator& B, double rho, double eta) {
  if (L.rows() != L.cols() || B.rows() != B.cols() || L.rows() != B.rows()) {
    throw ArgumentError("L and B must be square with equal dimensions");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho must be positive");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("eta must be >= 0");
  const Eigen::Index n = L.rows();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * n + B.nonZeros() + L.nonZeros()));
  for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(i, n + i, -1.0);
  for (Eigen::Index k = 0; k < B.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(B, k); it; ++it) t.emplace_back(n + it.row(), it.col(), it.value());
  }
  if (eta != 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(n + i, i, eta);
  }
  for (Eigen::Index k = 0; k < L.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(L, k); it; ++it) {
      t.emplace_back(n + it.row(), n + it.col(), -rho * it.value());
    }
  }
  BlockOperatorA a{L, B, rho, eta, SparseOperator(2 * n, 2 * n)};
  a.matrix.setFromTriplets(t.begin(), t.end());
  return a;
}

BlockOperatorA assemble_A(const RectGrid& grid, double rho, double eta) {
  return assemble_A(laplacian_dirichlet(grid), biharmonic_clamped(grid), rho, eta);
}

SpectrumReport spectrum(const BlockOperatorA& a, std::size_t count) {
  const Eigen::Index dim = a.matrix.rows();
  if (dim > 4000) throw ArgumentError("dense spectrum limited to dimension 4000");
  if (count > static_cast<std::size_t>(dim)) throw ArgumentError("count exceeds the operator dimension");
  Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(a.matrix), false);
  if (es.info() != Eigen::Success) throw NumericError("dense eigensolver did not converge");
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + dim);
  std::sort(ev.begin(), ev.end(), [](Complex x, Complex y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  double pairing = 0.0;
  for (const auto& z : ev) {
    double best = 1e300;
    for (const auto& w : ev) best = std::min(best, std::abs(w - std::conj(z)));
    pairing = std::max(pairing, best / std::max(1.0, std::abs(z)));
  }
  SpectrumReport rep;
  rep.dimension = static_cast<std::size_t>(dim);
  rep.min_real = ev.front().real();
  rep.conjugate_pairing_residual = pairing;
  if (count > 0) ev.resize(count);
  rep.eigenvalues = std::move(ev);
  return rep;
}

std::vector<double> symmetric_eigenvalues(const SparseOperator& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  const auto& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

ScanNorm parse_scan_norm(const std::string& name) {
  if (name == "euclidean") return ScanNorm::euclidean;
  if (name == "energy") return ScanNorm::energy;
  throw ArgumentError("unknown norm '" + name + "' (expected euclidean or energy)");
}

std::string to_string(ScanNorm n) { return n == ScanNorm::energy ? "energy" : "euclidean"; }

Eigen::MatrixXcd scaled_resolvent(const BlockOperatorA& a, Complex mu, double lambda0, ScanNorm norm) {
  const Eigen::Index dim = a.matrix.rows();
  Eigen::MatrixXcd m = Eigen::MatrixXd(a.matrix).cast<Complex>();
  m.diagonal().array() += mu + lambda0;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-15)) {
    std::ostringstream os;
    os << "shifted system singular at lambda = " << (mu + lambda0) << " (rcond " << rcond << ")";
    throw SingularityError(os.str());
  }
  Eigen::MatrixXcd r = mu * lu.inverse();
  if (norm == ScanNorm::energy) {
    const Eigen::Index n = a.block_size();
    const Eigen::MatrixXd ct = energy_factor(a);
    const Eigen::MatrixXd ct_inv = ct.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(dim, dim);
    Eigen::MatrixXcd t_inv = Eigen::MatrixXcd::Identity(dim, dim);
    t.topLeftCorner(n, n) = ct.cast<Complex>();
    t_inv.topLeftCorner(n, n) = ct_inv.cast<Complex>();
    r = t * r * t_inv;
  }
  return r;
}

ResolventScanReport resolvent_ray_scan(const BlockOperatorA& a, double lambda0, double sigma,
                                       std::span<const double> magnitudes, ScanNorm norm) {
  const double theta = damping_angle(a.rho);
  if (!(sigma > theta) || !(sigma < std::numbers::pi)) {
    std::ostringstream os;
    os << "sigma = " << sigma << " must lie in (theta(rho), pi) = (" << theta << ", pi)";
    throw DomainError(os.str());
  }
  if (magnitudes.empty()) throw ArgumentError("ray scan needs at least one magnitude");
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (!(magnitudes[i] > 0.0) || (i > 0 && !(magnitudes[i] > magnitudes[i - 1]))) {
      throw ArgumentError("ray magnitudes must be positive and increasing");
    }
  }
  ResolventScanReport rep{lambda0, sigma, norm, {}, 0.0};
  const double phi = std::numbers::pi - sigma;
  for (int sgn : {1, -1}) {
    for (double r : magnitudes) {
      const Complex mu = std::polar(r, sgn * phi);
      rep.samples.push_back({mu, mu + lambda0, 0.0});
    }
  }
  // Solves along the rays are independent.
  std::vector<std::string> failure(rep.samples.size());
  const auto total = static_cast<std::ptrdiff_t>(rep.samples.size());
#pragma omp parallel for num_threads(thread_limit()) schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    auto& s = rep.samples[static_cast<std::size_t>(i)];
    try {
      const Eigen::MatrixXcd r = scaled_resolvent(a, s.mu, lambda0, norm);
      s.norm = Eigen::BDCSVD<Eigen::MatrixXcd>(r).singularValues()(0);
    } catch (const std::exception& e) {
      failure[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& f : failure) {
    if (!f.empty()) throw SingularityError(f);
  }
  for (const auto& s : rep.samples) rep.sup = std::max(rep.sup, s.norm);
  return rep;
}

}  // namespace platemr
