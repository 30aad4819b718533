#pragma once

// Monte-Carlo estimate of the R-bound of a finite operator family in the
// Euclidean norm:
//   sup_x (E |sum_n eps_n T_n x_n|^2)^{1/2} / (E |sum_n eps_n x_n|^2)^{1/2}.
// The expectation over eps is taken over randomised Hadamard sign designs:
// each block of H draws (H >= N a power of two) uses the rows of a Sylvester
// Hadamard matrix with columns permuted, sign-flipped and (for complex
// families) rotated by random phases. Every block is exactly orthogonal, so
// the block average reproduces the Rademacher average.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace platemr {

using OperatorFamily = std::vector<Eigen::MatrixXcd>;
// x_n for n = 0..N-1
using VectorTuple = std::vector<Eigen::VectorXcd>;

struct RademacherOptions {
  std::size_t trials = 4096;        // sign draws per candidate tuple (rounded up to whole blocks)
  std::size_t random_tuples = 8;    // random starting tuples in addition to the supplied ones
  int ascent_steps = 30;            // x_n <- T_n^H T_n x_n iterations per candidate
  bool complex_phases = false;      // Steinhaus phases instead of signs
  std::uint64_t seed = 1;
};

struct RademacherEstimate {
  double estimate;        // max over candidates of the averaged ratio
  double scalar_sup;      // max_n |T_n|_2
  std::size_t trials;     // sign draws used per candidate
  std::size_t candidates;
  std::size_t resampled;  // candidates with zero denominator, replaced by fresh random tuples
};

RademacherEstimate rademacher_bound(const OperatorFamily& family, const std::vector<VectorTuple>& tuples,
                                    const RademacherOptions& options);
RademacherEstimate rademacher_bound_serial(const OperatorFamily& family, const std::vector<VectorTuple>& tuples,
                                           const RademacherOptions& options);

// Ratio of Rademacher averages for a single tuple under the designs drawn
// from `seed`.
double rademacher_ratio(const OperatorFamily& family, const VectorTuple& x, std::size_t trials,
                        bool complex_phases, std::uint64_t seed);

// Sylvester Hadamard matrix of order 2^k (entries +-1).
Eigen::MatrixXd hadamard(std::size_t order);

}  // namespace platemr
