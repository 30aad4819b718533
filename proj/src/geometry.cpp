#include "platemr/geometry.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "platemr/errors.hpp"
#include "platemr/parallel.hpp"

namespace platemr {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

double sign(double x) { return (x > 0) - (x < 0); }

// exp(-1/t) for t > 0, else 0, with first derivative.
double smooth_step(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }
double smooth_step_d(double t) { return t > 0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

// Cutoff equal to 1 on [0, 1/2] and 0 on [1, inf), as a function of t = |x|.
constexpr double kCutInner = 0.5;
double cutoff(double t) {
  const double a = smooth_step(1.0 - t);
  const double b = smooth_step(t - kCutInner);
  return a / (a + b);
}
double cutoff_d(double t) {
  const double a = smooth_step(1.0 - t);
  const double b = smooth_step(t - kCutInner);
  const double da = -smooth_step_d(1.0 - t);
  const double db = smooth_step_d(t - kCutInner);
  const double s = a + b;
  return (da * b - a * db) / (s * s);
}

double max_abs_on(const std::function<double(double)>& f, double lo, double hi) {
  constexpr int n = 20000;
  double best = 0.0;
  double arg = lo;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double v = std::abs(f(x));
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  const double step = (hi - lo) / n;
  auto neg = [&](double x) { return -std::abs(f(x)); };
  auto r = boost::math::tools::brent_find_minima(neg, std::max(lo, arg - step), std::min(hi, arg + step), 50);
  return std::max(best, -r.second);
}

HeightProfile scaled(std::string name, std::function<double(double)> v, std::function<double(double)> d,
                     std::vector<double> breaks, double radius, double scale) {
  const double lip = max_abs_on(d, -radius, radius);
  const double f = scale / lip;
  HeightProfile p;
  p.name = std::move(name);
  p.value = [v, f](double x) { return f * v(x); };
  p.slope = [d, f](double x) { return f * d(x); };
  p.breakpoints = std::move(breaks);
  p.support_radius = radius;
  p.lipschitz = scale;
  return p;
}

double mollifier_mass() {
  static const double mass = [] {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate([](double s) { return std::exp(-1.0 / (1.0 - s * s)); }, -1.0, 1.0);
  }();
  return mass;
}

// Kernel of d^(a,b) h2 after the substitution w = y~ - eps s:
//   d^(a,b) h2 = c^a eps^{-(a+b)} int chi(s) h(y~ - eps s) ds,
// chi = sum coef * s^i * phi^{(j)}(s).
struct KernelTerm {
  int power;
  int deriv;
  double coef;
};

std::vector<KernelTerm> kernel_terms(int a, int b) {
  std::vector<KernelTerm> terms{{0, b, 1.0}};
  int n = 1 + b;
  for (int step = 0; step < a; ++step) {
    std::vector<KernelTerm> next;
    for (const auto& t : terms) {
      next.push_back({t.power, t.deriv, -t.coef * (n + t.power)});
      next.push_back({t.power + 1, t.deriv + 1, -t.coef});
    }
    std::sort(next.begin(), next.end(), [](const KernelTerm& l, const KernelTerm& r) {
      return l.power != r.power ? l.power < r.power : l.deriv < r.deriv;
    });
    terms.clear();
    for (const auto& t : next) {
      if (!terms.empty() && terms.back().power == t.power && terms.back().deriv == t.deriv) {
        terms.back().coef += t.coef;
      } else {
        terms.push_back(t);
      }
    }
    ++n;
  }
  return terms;
}

// All derivatives of exp(g), g = -1/(1 - s^2), up to order m.
void mollifier_derivatives(double s, int m, double* out) {
  if (std::abs(s) >= 1.0) {
    std::fill(out, out + m + 1, 0.0);
    return;
  }
  std::vector<double> g(static_cast<std::size_t>(m + 1));
  double fact = 1.0;
  for (int k = 1; k <= m; ++k) {
    fact *= k;
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    g[static_cast<std::size_t>(k)] =
        -0.5 * (fact / std::pow(1.0 - s, k + 1) + sgn * fact / std::pow(1.0 + s, k + 1));
  }
  out[0] = std::exp(-1.0 / (1.0 - s * s)) / mollifier_mass();
  for (int q = 0; q < m; ++q) {
    double acc = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= q; ++k) {
      acc += binom * g[static_cast<std::size_t>(k + 1)] * out[q - k];
      binom = binom * (q - k) / (k + 1);
    }
    out[q + 1] = acc;
  }
}

double column_interp(std::span<const double> nodes, const double* vals, std::size_t stride, double x,
                     bool& ok) {
  const double tol = 1e-12 * std::max(1.0, std::abs(nodes.back()));
  if (x < nodes.front() - tol || x > nodes.back() + tol) {
    ok = false;
    return 0.0;
  }
  if (nodes.size() == 1) return vals[0];
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(nodes.begin(), it));
  i = std::clamp<std::size_t>(i, 1, nodes.size() - 1);
  const double t = (x - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
  return (1.0 - t) * vals[(i - 1) * stride] + t * vals[i * stride];
}

void check_tangential(const Grid1D& a, const Grid1D& b) {
  if (a.size() != b.size()) throw ArgumentError("tangential grids differ in size");
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (std::abs(a[j] - b[j]) > 1e-12 * std::max(1.0, std::abs(a[j]))) {
      throw ArgumentError("tangential grids differ at node " + std::to_string(j));
    }
  }
}

}  // namespace

double mollifier(double s, int derivative) {
  if (derivative < 0) throw ArgumentError("derivative order must be >= 0");
  std::vector<double> d(static_cast<std::size_t>(derivative + 1));
  mollifier_derivatives(s, derivative, d.data());
  return d.back();
}

HeightProfile make_profile(const std::string& name, double scale, double kappa) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw DomainError("profile scale must be >= 0");
  if (name == "zero" || scale == 0.0) {
    HeightProfile p;
    p.name = name;
    p.value = [](double) { return 0.0; };
    p.slope = [](double) { return 0.0; };
    p.support_radius = name == "zero" ? 0.0 : 1.0;
    return p;
  }
  if (name == "hat") {
    return scaled(
        name, [](double x) { return std::max(0.0, 1.0 - std::abs(x)); },
        [](double x) { return std::abs(x) < 1.0 ? -sign(x) : 0.0; }, {-1.0, 0.0, 1.0}, 1.0, scale);
  }
  if (name == "bump") {
    auto v = [](double x) { return std::abs(x) < 1.0 ? std::exp(1.0 / (x * x - 1.0)) : 0.0; };
    auto d = [v](double x) {
      if (std::abs(x) >= 1.0) return 0.0;
      const double q = x * x - 1.0;
      return v(x) * (-2.0 * x / (q * q));
    };
    return scaled(name, v, d, {}, 1.0, scale);
  }
  if (name == "holder") {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw DomainError("holder profile needs kappa in (0, 1]");
    // A wide support keeps the cutoff's bounded curvature small next to the
    // singular part at the origin.
    constexpr double radius = 8.0;
    auto v = [kappa](double x) {
      const double t = std::abs(x);
      return t < radius ? std::pow(t, 1.0 + kappa) * cutoff(t / radius) : 0.0;
    };
    auto d = [kappa](double x) {
      const double t = std::abs(x);
      if (t >= radius) return 0.0;
      return sign(x) * ((1.0 + kappa) * std::pow(t, kappa) * cutoff(t / radius) +
                        std::pow(t, 1.0 + kappa) * cutoff_d(t / radius) / radius);
    };
    return scaled(name, v, d, {0.0}, radius, scale);
  }
  throw ArgumentError("unknown height profile '" + name + "' (expected zero, hat, bump, holder)");
}

SpecialDomain make_special_domain(const std::string& profile, double seminorm, double kappa) {
  SpecialDomain d;
  d.h = make_profile(profile, seminorm, kappa);
  d.seminorm = seminorm;
  if (profile == "holder") {
    d.ell = 1;
    d.kappa = kappa;
  } else if (profile == "hat") {
    d.ell = 0;
    d.kappa = 1.0;
  } else {
    d.ell = 1;
    d.kappa = 1.0;
  }
  return d;
}

double holder_seminorm_estimate(const HeightProfile& h, int ell, double kappa,
                                std::span<const std::array<double, 2>> sample_pairs) {
  if (ell != 0 && ell != 1) throw ArgumentError("holder seminorm estimate supports ell in {0, 1}");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("kappa must lie in [0, 1]");
  const auto& f = ell == 0 ? h.value : h.slope;
  double best = 0.0;
  bool any = false;
  for (const auto& pr : sample_pairs) {
    const double dx = std::abs(pr[0] - pr[1]);
    if (dx == 0.0) continue;
    any = true;
    best = std::max(best, std::abs(f(pr[0]) - f(pr[1])) / std::pow(dx, kappa));
  }
  if (!any) throw ArgumentError("all sample pairs are coincident");
  return best;
}

PullbackMap PullbackMap::build(const SpecialDomain& domain, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("mollifier scale c must be positive");
  if (c * domain.h.lipschitz >= 1.0) {
    std::ostringstream os;
    os << "c * Lip(h) = " << c * domain.h.lipschitz << " >= 1: choose a smaller c or seminorm";
    throw ConstructionError(os.str());
  }
  PullbackMap map(domain, c);
  if (domain.h.lipschitz == 0.0) return map;
  const double r = domain.h.support_radius;
  double worst = 0.0;
  for (int i = 0; i < 25; ++i) {
    const double y1 = std::pow(10.0, -4.0 + 6.0 * i / 24.0);
    for (int j = 0; j <= 200; ++j) {
      const double yt = -r - 1.0 + (2.0 * r + 2.0) * j / 200.0;
      worst = std::max(worst, std::abs(map.h2_derivative(y1, yt, 1, 0)));
    }
  }
  map.max_d1_h2_ = worst;
  if (worst >= 1.0) {
    std::ostringstream os;
    os << "sup |d1 h2| = " << worst << " >= 1, the root map is not contractive: choose a smaller c or seminorm";
    throw ConstructionError(os.str());
  }
  return map;
}

double PullbackMap::h2(double y1, double yt) const { return h2_derivative(y1, yt, 0, 0); }

double PullbackMap::h2_derivative(double y1, double yt, int a, int b) const {
  if (a < 0 || b < 0) throw ArgumentError("derivative orders must be >= 0");
  const auto& h = domain_.h;
  if (h.lipschitz == 0.0) return (a + b == 0) ? h.value(yt) : 0.0;
  const int order = a + b;
  if (y1 <= 0.0) {
    if (order == 0) return h.value(yt);
    y1 = 1e-8;
  }
  const double eps = c_ * y1;
  const double r = h.support_radius;
  if (yt - eps >= r || yt + eps <= -r) return 0.0;

  // Panel breaks in s where h(y~ - eps s) loses smoothness or leaves its support.
  // Mollifier derivatives steepen toward s = +-1; geometric panels there keep
  // their vanishing moments at roundoff level.
  std::vector<double> cuts{-1.0, -0.25, 0.0, 0.25, 1.0};
  for (int k = 1; k <= 8; ++k) {
    const double g = std::ldexp(1.0, -k);
    cuts.push_back(-1.0 + g);
    cuts.push_back(1.0 - g);
  }
  auto add = [&](double point) {
    const double s = (yt - point) / eps;
    if (s > -1.0 && s < 1.0) cuts.push_back(s);
  };
  for (double bp : h.breakpoints) add(bp);
  add(r);
  add(-r);
  std::sort(cuts.begin(), cuts.end());

  const auto terms = kernel_terms(a, b);
  int max_deriv = 0;
  for (const auto& t : terms) max_deriv = std::max(max_deriv, t.deriv);
  const double base = order == 0 ? 0.0 : h.value(yt);
  auto integrand = [&](double s) {
    double phi[16];
    mollifier_derivatives(s, max_deriv, phi);
    double chi = 0.0;
    for (const auto& t : terms) chi += t.coef * std::pow(s, t.power) * phi[t.deriv];
    return chi * (h.value(yt - eps * s) - base);
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] - cuts[k] <= 0.0) continue;
    total += Gauss::integrate(integrand, cuts[k], cuts[k + 1]);
  }
  return std::pow(c_, a) * std::pow(eps, -order) * total;
}

Point2 PullbackMap::inverse(const Point2& y) const { return {y[0] + h2(y[0], y[1]), y[1]}; }

Point2 PullbackMap::forward(const Point2& x) const {
  const double vertical = x[0] - domain_.h.value(x[1]);
  if (vertical < 0.0) throw ArgumentError("point lies outside the domain closure");
  if (vertical == 0.0 || domain_.h.lipschitz == 0.0) return {vertical == 0.0 ? 0.0 : x[0], x[1]};
  auto g = [&](double t) { return t + h2(t, x[1]) - x[0]; };
  double hi = 2.0 * vertical;
  while (g(hi) < 0.0) hi *= 2.0;
  auto fn = [&](double t) {
    return std::make_pair(g(t), 1.0 + h2_derivative(t, x[1], 1, 0));
  };
  std::uintmax_t iters = 200;
  const double t = boost::math::tools::newton_raphson_iterate(fn, vertical, 0.0, hi, 46, iters);
  if (iters >= 200) throw NumericError("root solve for the pullback did not converge");
  return {t, x[1]};
}

double PullbackMap::h1(const Point2& x) const { return x[0] - forward(x)[0]; }

std::array<double, 4> PullbackMap::jacobian(const Point2& x) const {
  const Point2 y = forward(x);
  const double a1 = h2_derivative(y[0], y[1], 1, 0);
  const double a2 = h2_derivative(y[0], y[1], 0, 1);
  return {1.0 / (1.0 + a1), -a2 / (1.0 + a1), 0.0, 1.0};
}

double boundary_distance(const HeightProfile& h, const Point2& x) {
  const double d0 = std::abs(x[0] - h.value(x[1]));
  if (d0 == 0.0) return 0.0;
  auto sq = [&](double w) {
    const double v = x[0] - h.value(w);
    return v * v + (x[1] - w) * (x[1] - w);
  };
  constexpr int n = 128;
  const double lo = x[1] - d0;
  const double step = 2.0 * d0 / n;
  double best = sq(x[1]);
  int arg = n / 2;
  for (int i = 0; i <= n; ++i) {
    const double v = sq(lo + step * i);
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  const double a = lo + step * std::max(0, arg - 1);
  const double b = lo + step * std::min(n, arg + 1);
  best = std::min(best, boost::math::tools::brent_find_minima(sq, a, b, 52).second);
  for (double bp : h.breakpoints) {
    if (bp > lo && bp < x[1] + d0) best = std::min(best, sq(bp));
  }
  return std::sqrt(best);
}

DistanceReport distance_equivalence_report(const PullbackMap& map, std::span<const Point2> samples) {
  if (samples.empty()) throw ArgumentError("distance report needs at least one sample");
  const auto& dom = map.domain();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!dom.contains(samples[i])) {
      throw ArgumentError("sample " + std::to_string(i) + " lies outside the domain");
    }
  }
  std::vector<double> ratio(samples.size());
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for num_threads(thread_limit()) schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& x = samples[static_cast<std::size_t>(i)];
    ratio[static_cast<std::size_t>(i)] = map.forward(x)[0] / boundary_distance(dom.h, x);
  }
  auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  return {*lo, *hi};
}

std::vector<Point2> domain_samples(const SpecialDomain& domain, std::size_t count, std::uint64_t seed,
                                   double depth, double width) {
  if (!(depth > 0.0) || !(width > 0.0)) throw ArgumentError("sample box must have positive size");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  std::vector<Point2> out(count);
  for (auto& x : out) {
    const double t = depth * (1.0 - ut(rng));  // (0, depth]
    const double xt = width * (2.0 * ut(rng) - 1.0);
    x = {domain.h.value(xt) + t, xt};
  }
  return out;
}

BlowupFit derivative_blowup_slopes(const PullbackMap& map, int order, double y1_min, double y1_max,
                                   int samples) {
  if (order < 2) throw ArgumentError("blow-up fit needs |alpha| >= 2 (first derivatives are bounded)");
  if (!(y1_min > 0.0) || !(y1_max > y1_min) || std::log10(y1_max / y1_min) < 1.0) {
    throw ArgumentError("blow-up fit needs at least one decade of y1");
  }
  if (samples < 3) throw ArgumentError("blow-up fit needs at least 3 samples");
  const auto& h = map.domain().h;
  BlowupFit fit;
  fit.y1.resize(static_cast<std::size_t>(samples));
  fit.sup_derivative.assign(static_cast<std::size_t>(samples), 0.0);
  const double r = h.support_radius;
#pragma omp parallel for num_threads(thread_limit()) schedule(dynamic, 1)
  for (int i = 0; i < samples; ++i) {
    const double y1 = y1_min * std::pow(y1_max / y1_min, static_cast<double>(i) / (samples - 1));
    const double eps = map.mollifier_scale() * y1;
    std::vector<double> probes;
    for (int j = 0; j <= 200; ++j) probes.push_back(-r - eps + (2.0 * r + 2.0 * eps) * j / 200.0);
    std::vector<double> centers = h.breakpoints;
    centers.push_back(r);
    centers.push_back(-r);
    for (double cpt : centers) {
      for (int j = 0; j <= 60; ++j) probes.push_back(cpt + eps * (-3.0 + 0.1 * j));
    }
    double best = 0.0;
    for (double yt : probes) {
      for (int a = 0; a <= order; ++a) {
        best = std::max(best, std::abs(map.h2_derivative(y1, yt, a, order - a)));
      }
    }
    fit.y1[static_cast<std::size_t>(i)] = y1;
    fit.sup_derivative[static_cast<std::size_t>(i)] = best;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = 0; i < samples; ++i) {
    const double v = fit.sup_derivative[static_cast<std::size_t>(i)];
    if (!(v > 1e-300)) continue;
    const double lx = std::log(fit.y1[static_cast<std::size_t>(i)]);
    const double ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  fit.slope = m < 2 ? 0.0 : (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

DomainField DomainField::sample(const SpecialDomain& domain, const GridTensor& grid,
                                const std::function<double(const Point2&)>& f) {
  DomainField out{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.axis0.size(); ++i) {
    for (std::size_t j = 0; j < grid.axis1.size(); ++j) {
      const double xt = grid.axis1[j];
      out.values[grid.index(i, j)] = f({domain.h.value(xt) + grid.axis0[i], xt});
    }
  }
  return out;
}

TensorField pushforward_field(const DomainField& f, const PullbackMap& map, const GridTensor& target) {
  check_tangential(f.grid.axis1, target.axis1);
  if (f.values.size() != f.grid.size()) throw ArgumentError("field size does not match its grid");
  const auto& h = map.domain().h;
  const std::size_t n1 = target.axis1.size();
  TensorField out{target, std::vector<double>(target.size())};
  std::vector<char> bad(target.size(), 0);
  const auto total = static_cast<std::ptrdiff_t>(target.size());
#pragma omp parallel for num_threads(thread_limit()) schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const std::size_t i = static_cast<std::size_t>(k) / n1;
    const std::size_t j = static_cast<std::size_t>(k) % n1;
    const double yt = target.axis1[j];
    const double s = target.axis0[i] + map.h2(target.axis0[i], yt) - h.value(yt);
    bool ok = true;
    out.values[static_cast<std::size_t>(k)] = column_interp(f.grid.axis0.nodes(), &f.values[j], n1, s, ok);
    if (!ok) bad[static_cast<std::size_t>(k)] = 1;
  }
  for (std::size_t k = 0; k < bad.size(); ++k) {
    if (bad[k]) {
      throw ArgumentError("pushforward needs values outside the sampled domain hull at target node (" +
                          std::to_string(k / n1) + ", " + std::to_string(k % n1) + ")");
    }
  }
  return out;
}

DomainField pullback_field(const TensorField& g, const PullbackMap& map, const GridTensor& target) {
  check_tangential(g.grid.axis1, target.axis1);
  if (g.values.size() != g.grid.size()) throw ArgumentError("field size does not match its grid");
  const auto& h = map.domain().h;
  const std::size_t n1 = target.axis1.size();
  DomainField out{target, std::vector<double>(target.size())};
  std::vector<char> bad(target.size(), 0);
  const auto total = static_cast<std::ptrdiff_t>(target.size());
#pragma omp parallel for num_threads(thread_limit()) schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const std::size_t i = static_cast<std::size_t>(k) / n1;
    const std::size_t j = static_cast<std::size_t>(k) % n1;
    const double xt = target.axis1[j];
    const double y1 = map.forward({h.value(xt) + target.axis0[i], xt})[0];
    bool ok = true;
    out.values[static_cast<std::size_t>(k)] = column_interp(g.grid.axis0.nodes(), &g.values[j], n1, y1, ok);
    if (!ok) bad[static_cast<std::size_t>(k)] = 1;
  }
  for (std::size_t k = 0; k < bad.size(); ++k) {
    if (bad[k]) {
      throw ArgumentError("pullback needs values outside the sampled half-space hull at target node (" +
                          std::to_string(k / n1) + ", " + std::to_string(k % n1) + ")");
    }
  }
  return out;
}

double domain_lp_norm(const DomainField& f, const SpecialDomain& domain, double p, double gamma) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  if (f.grid.axis0.lower() != 0.0) throw ArgumentError("boundary-fitted grid must start at the boundary");
  const std::size_t n1 = f.grid.axis1.size();
  std::vector<double> integrand(f.values.size());
  const auto total = static_cast<std::ptrdiff_t>(f.values.size());
#pragma omp parallel for num_threads(thread_limit()) schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const std::size_t i = static_cast<std::size_t>(k) / n1;
    const std::size_t j = static_cast<std::size_t>(k) % n1;
    const double s = std::max(f.grid.axis0[i], 1e-9);
    const double xt = f.grid.axis1[j];
    const double ratio = boundary_distance(domain.h, {domain.h.value(xt) + s, xt}) / s;
    integrand[static_cast<std::size_t>(k)] =
        std::pow(std::abs(f.values[static_cast<std::size_t>(k)]), p) * std::pow(ratio, gamma);
  }
  const double v = weighted_integral(f.grid, integrand, WeightSpec{gamma, WeightReference::halfspace_x1});
  return std::pow(std::max(v, 0.0), 1.0 / p);
}

double PartitionOfUnity::raw_bump(std::size_t n, const Point2& x) const {
  const Patch& p = cover_.at(n);
  double v = 1.0;
  for (int d = 0; d < p.dim; ++d) {
    const double t = (x[static_cast<std::size_t>(d)] - p.lo[static_cast<std::size_t>(d)]) /
                     (p.hi[static_cast<std::size_t>(d)] - p.lo[static_cast<std::size_t>(d)]);
    if (t <= 0.0 || t >= 1.0) return 0.0;
    v *= std::exp(-0.25 / (t * (1.0 - t)) + 1.0);
  }
  return v;
}

double PartitionOfUnity::eta(std::size_t n, const Point2& x) const {
  double total = 0.0;
  for (std::size_t m = 0; m < cover_.size(); ++m) {
    const double v = raw_bump(m, x);
    total += v * v;
  }
  if (!(total > 0.0)) throw ArgumentError("point is not covered by the partition");
  return raw_bump(n, x) / std::sqrt(total);
}

PartitionOfUnity build_partition(std::vector<Patch> cover, std::span<const Point2> nodes) {
  if (cover.empty()) throw ConstructionError("partition of unity needs at least one patch");
  for (const auto& p : cover) {
    if (p.dim < 1 || p.dim > 2) throw ConstructionError("patch dimension must be 1 or 2");
    for (int d = 0; d < p.dim; ++d) {
      if (!(p.hi[static_cast<std::size_t>(d)] > p.lo[static_cast<std::size_t>(d)])) {
        throw ConstructionError("patch must have positive extent");
      }
    }
  }
  PartitionOfUnity pou;
  pou.cover_ = std::move(cover);
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double total = 0.0;
    for (std::size_t m = 0; m < pou.size(); ++m) {
      const double v = pou.raw_bump(m, nodes[i]);
      total += v * v;
    }
    if (!(total > 1e-280)) missing.push_back(i);
  }
  if (!missing.empty()) {
    std::ostringstream os;
    os << "uncovered nodes:";
    for (std::size_t k = 0; k < std::min<std::size_t>(missing.size(), 20); ++k) {
      const auto& x = nodes[missing[k]];
      os << " #" << missing[k] << "=(" << x[0] << ", " << x[1] << ")";
    }
    if (missing.size() > 20) os << " ... (" << missing.size() << " total)";
    throw ConstructionError(os.str());
  }
  return pou;
}

double retraction_roundtrip(std::span<const double> field, std::span<const Point2> nodes,
                            const PartitionOfUnity& pou) {
  if (field.size() != nodes.size()) throw ArgumentError("field and node counts differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double back = 0.0;
    for (std::size_t n = 0; n < pou.size(); ++n) {
      const double e = pou.eta(n, nodes[i]);
      back += e * (e * field[i]);
    }
    worst = std::max(worst, std::abs(back - field[i]));
  }
  return worst;
}

double partition_deviation(std::span<const Point2> nodes, const PartitionOfUnity& pou) {
  double worst = 0.0;
  for (const auto& x : nodes) {
    double s = 0.0;
    for (std::size_t n = 0; n < pou.size(); ++n) {
      const double e = pou.eta(n, x);
      s += e * e;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

}  // namespace platemr
