#include "platemr/rademacher.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "platemr/errors.hpp"
#include "platemr/parallel.hpp"

namespace platemr {

namespace {

using Complex = std::complex<double>;

std::size_t design_order(std::size_t n) {
  std::size_t h = 1;
  while (h < n) h *= 2;
  return h;
}

void check_family(const OperatorFamily& family) {
  if (family.empty()) throw ArgumentError("operator family is empty");
  const auto d = family.front().rows();
  for (const auto& t : family) {
    if (t.rows() != d || t.cols() != d) throw ArgumentError("family members must be square with equal dimension");
  }
}

void check_tuple(const OperatorFamily& family, const VectorTuple& x) {
  if (x.size() != family.size()) throw ArgumentError("tuple length must equal the family size");
  for (const auto& v : x) {
    if (v.size() != family.front().cols()) throw ArgumentError("tuple vector dimension mismatch");
  }
}

VectorTuple random_tuple(const OperatorFamily& family, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  VectorTuple x(family.size());
  for (auto& v : x) {
    v.resize(family.front().cols());
    for (auto& c : v) c = Complex(g(rng), g(rng));
  }
  return x;
}

double tuple_norm2(const VectorTuple& x) {
  double s = 0.0;
  for (const auto& v : x) s += v.squaredNorm();
  return s;
}

// Power-type ascent on sum |T_n x_n|^2 / sum |x_n|^2.
void ascend(const OperatorFamily& family, VectorTuple& x, int steps) {
  for (int s = 0; s < steps; ++s) {
    for (std::size_t n = 0; n < x.size(); ++n) x[n] = family[n].adjoint() * (family[n] * x[n]);
    const double nrm = std::sqrt(tuple_norm2(x));
    if (!(nrm > 0.0)) return;
    for (auto& v : x) v /= nrm;
  }
}

struct Candidate {
  double ratio = 0.0;
  bool zero = false;
};

Candidate evaluate(const OperatorFamily& family, const std::vector<VectorTuple>& tuples, std::size_t c,
                   const RademacherOptions& opt) {
  const std::uint64_t stream = mix_seed(opt.seed, c);
  VectorTuple x = c < tuples.size() ? tuples[c] : random_tuple(family, stream);
  if (!(tuple_norm2(x) > 0.0)) return {0.0, true};
  VectorTuple y = x;
  ascend(family, y, opt.ascent_steps);
  if (tuple_norm2(y) > 0.0) x = std::move(y);  // a family that annihilates x keeps the start
  return {rademacher_ratio(family, x, opt.trials, opt.complex_phases, mix_seed(stream, 0x5eed)), false};
}

RademacherEstimate finish(const OperatorFamily& family, const std::vector<Candidate>& cand,
                          const RademacherOptions& opt) {
  RademacherEstimate r{0.0, 0.0, 0, cand.size(), 0};
  const std::size_t h = design_order(family.size());
  r.trials = ((std::max<std::size_t>(opt.trials, 1) + h - 1) / h) * h;
  for (const auto& c : cand) {
    if (c.zero) {
      ++r.resampled;
    } else {
      r.estimate = std::max(r.estimate, c.ratio);
    }
  }
  for (const auto& t : family) {
    r.scalar_sup = std::max(r.scalar_sup, Eigen::BDCSVD<Eigen::MatrixXcd>(t).singularValues()(0));
  }
  return r;
}

std::vector<VectorTuple> with_replacements(const OperatorFamily& family, std::vector<VectorTuple> tuples,
                                           const RademacherOptions& opt) {
  // Zero supplied tuples are replaced by fresh random ones before the search.
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    check_tuple(family, tuples[i]);
    if (!(tuple_norm2(tuples[i]) > 0.0)) tuples[i] = random_tuple(family, mix_seed(opt.seed, 1'000'003 + i));
  }
  return tuples;
}

std::size_t zero_count(const std::vector<VectorTuple>& tuples) {
  return static_cast<std::size_t>(std::count_if(tuples.begin(), tuples.end(),
                                                [](const VectorTuple& x) { return !(tuple_norm2(x) > 0.0); }));
}

}  // namespace

Eigen::MatrixXd hadamard(std::size_t order) {
  if (order == 0 || (order & (order - 1)) != 0) throw ArgumentError("hadamard order must be a power of two");
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 1.0;
  while (static_cast<std::size_t>(h.rows()) < order) {
    const auto m = h.rows();
    Eigen::MatrixXd next(2 * m, 2 * m);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return h;
}

double rademacher_ratio(const OperatorFamily& family, const VectorTuple& x, std::size_t trials,
                        bool complex_phases, std::uint64_t seed) {
  check_family(family);
  check_tuple(family, x);
  const std::size_t n = family.size();
  const std::size_t h = design_order(n);
  const Eigen::MatrixXd had = hadamard(h);
  const std::size_t blocks = (std::max<std::size_t>(trials, 1) + h - 1) / h;

  std::vector<Eigen::VectorXcd> tx(n);
  for (std::size_t k = 0; k < n; ++k) tx[k] = family[k] * x[k];

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> cols(h);
  std::vector<Complex> flip(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(cols.begin(), cols.end(), rng);
    for (auto& f : flip) {
      f = complex_phases ? std::polar(1.0, 2.0 * std::numbers::pi * u(rng)) : Complex(u(rng) < 0.5 ? -1.0 : 1.0);
    }
    for (std::size_t row = 0; row < h; ++row) {
      Eigen::VectorXcd sx = Eigen::VectorXcd::Zero(x.front().size());
      Eigen::VectorXcd stx = Eigen::VectorXcd::Zero(x.front().size());
      for (std::size_t k = 0; k < n; ++k) {
        const Complex e = had(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(cols[k])) * flip[k];
        sx += e * x[k];
        stx += e * tx[k];
      }
      num += stx.squaredNorm();
      den += sx.squaredNorm();
    }
  }
  if (!(den > 0.0)) throw ArgumentError("zero denominator: all tuple vectors vanish");
  return std::sqrt(num / den);
}

RademacherEstimate rademacher_bound_serial(const OperatorFamily& family, const std::vector<VectorTuple>& tuples,
                                           const RademacherOptions& options) {
  check_family(family);
  if (options.trials < 1000) throw ArgumentError("rademacher estimate needs at least 1000 trials");
  const auto zeros = zero_count(tuples);
  const auto ts = with_replacements(family, tuples, options);
  const std::size_t count = ts.size() + options.random_tuples;
  if (count == 0) throw ArgumentError("no candidate tuples");
  std::vector<Candidate> cand(count);
  for (std::size_t c = 0; c < count; ++c) cand[c] = evaluate(family, ts, c, options);
  auto r = finish(family, cand, options);
  r.resampled += zeros;
  return r;
}

RademacherEstimate rademacher_bound(const OperatorFamily& family, const std::vector<VectorTuple>& tuples,
                                    const RademacherOptions& options) {
  check_family(family);
  if (options.trials < 1000) throw ArgumentError("rademacher estimate needs at least 1000 trials");
  const auto zeros = zero_count(tuples);
  const auto ts = with_replacements(family, tuples, options);
  const std::size_t count = ts.size() + options.random_tuples;
  if (count == 0) throw ArgumentError("no candidate tuples");
  std::vector<Candidate> cand(count);
  const auto total = static_cast<std::ptrdiff_t>(count);
  // Each candidate owns its seed stream, so the result does not depend on
  // the thread count; the max reduction runs afterwards in index order.
#pragma omp parallel for num_threads(thread_limit()) schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < total; ++c) {
    cand[static_cast<std::size_t>(c)] = evaluate(family, ts, static_cast<std::size_t>(c), options);
  }
  auto r = finish(family, cand, options);
  r.resampled += zeros;
  return r;
}

}  // namespace platemr
