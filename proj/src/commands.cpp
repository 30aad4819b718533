#include "platemr/commands.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "platemr/errors.hpp"
#include "platemr/evolution.hpp"
#include "platemr/fourier.hpp"
#include "platemr/geometry.hpp"
#include "platemr/parallel.hpp"
#include "platemr/pencil.hpp"
#include "platemr/rademacher.hpp"
#include "platemr/weighted.hpp"

namespace platemr {

namespace {

constexpr double kNoBound = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return format_number(v); }

CheckRecord upper(std::string name, double value, double bound, std::string anchor) {
  return {std::move(name), value, bound, value <= bound ? Verdict::pass : Verdict::fail, std::move(anchor), {}};
}

CheckRecord lower(std::string name, double value, double bound, std::string anchor) {
  return {std::move(name), value, bound, value >= bound ? Verdict::pass : Verdict::fail, std::move(anchor), {}};
}

CheckRecord finite(std::string name, double value, std::string anchor) {
  return {std::move(name), value, kNoBound, std::isfinite(value) ? Verdict::pass : Verdict::fail, std::move(anchor), {}};
}

void pencil_command(const RunConfig& c, RunResult& r) {
  const double rho = c.real("rho");
  const auto roots = pencil_roots(rho);
  const double theta = damping_angle(rho);
  r.table.columns = {"rho", "alpha_plus_re", "alpha_plus_im", "alpha_minus_re", "alpha_minus_im", "theta"};
  r.table.add({num(rho), num(roots.plus.real()), num(roots.plus.imag()), num(roots.minus.real()),
               num(roots.minus.imag()), num(theta)});
  auto& rec = r.envelope.records;
  rec.push_back(upper("product_residual", std::abs(roots.plus * roots.minus - 1.0), 1e-12, "pencil-root-identities"));
  rec.push_back(upper("sum_residual", std::abs(roots.plus + roots.minus - rho), 1e-12, "pencil-root-identities"));
  CheckRecord angle{"angle", theta, std::numbers::pi / 2,
                    theta >= 0.0 && theta < std::numbers::pi / 2 ? Verdict::pass : Verdict::fail, "damping-angle", {}};
  rec.push_back(angle);
  rec.push_back(upper("angle_argument_residual", std::abs(std::arg(roots.plus) - theta), 1e-12, "damping-angle"));
  r.summary = {"alpha_plus=" + num(roots.plus.real()) + (roots.plus.imag() < 0 ? "" : "+") + num(roots.plus.imag()) + "i",
               "alpha_minus=" + num(roots.minus.real()) + (roots.minus.imag() < 0 ? "" : "+") + num(roots.minus.imag()) + "i",
               "theta=" + num(theta)};
}

void traces_command(const RunConfig& c, RunResult& r) {
  const int k = static_cast<int>(c.integer("k"));
  const double p = c.real("p"), gamma = c.real("gamma");
  const int dim = static_cast<int>(c.integer("dim"));
  const auto set = vanishing_trace_set(k, p, gamma, dim);
  r.table.columns = {"k", "p", "gamma", "alpha1", "alpha2", "order"};
  for (const auto& a : set) {
    r.table.add({std::to_string(k), num(p), num(gamma), std::to_string(a[0]), std::to_string(a[1]), std::to_string(a[0] + a[1])});
  }
  // the rule k - |alpha| > (gamma + 1)/p fixes the largest vanishing order
  const double threshold = k - (gamma + 1.0) / p;
  int top = -1;
  for (const auto& a : set) top = std::max(top, a[0] + a[1]);
  const int expected = threshold > 0.0 ? static_cast<int>(std::ceil(threshold) - 1) : -1;
  CheckRecord rec{"vanishing_trace_count", static_cast<double>(set.size()), kNoBound, Verdict::pass, "trace-vanishing-rule", {}};
  rec.detail = "max |alpha| = " + std::to_string(top);
  if (top != expected) {
    rec.verdict = Verdict::fail;
    rec.detail += ", expected " + std::to_string(expected);
  }
  r.envelope.records.push_back(rec);
  r.summary = {"vanishing_traces=" + std::to_string(set.size()), "max_order=" + std::to_string(top)};
}

void hardy_command(const RunConfig& c, RunResult& r) {
  const double p = c.real("p"), gamma = c.real("gamma");
  const std::string profile = c.text("profile");
  const Grid1D grid = Grid1D::graded(c.real("length"), static_cast<int>(c.integer("nodes")) + 1, 2.0);
  std::function<double(double)> f;
  if (profile == "x-exp") f = [](double x) { return x * std::exp(-x); };
  if (profile == "x2-exp") f = [](double x) { return x * x * std::exp(-x); };
  if (profile == "bump12") {
    f = [](double x) {
      if (x <= 1.0 || x >= 2.0) return 0.0;
      const double t = 2.0 * x - 3.0;
      return std::exp(-1.0 / (1.0 - t * t));
    };
  }
  const double ratio = hardy_ratio(GridField::sample(grid, f), p, gamma);
  const double bound = hardy_bound(p, gamma);
  r.table.columns = {"profile", "p", "gamma", "ratio", "bound"};
  r.table.add({profile, num(p), num(gamma), num(ratio), num(bound)});
  r.envelope.records.push_back(upper("hardy_ratio", ratio, bound * (1.0 + 1e-3), "hardy-inequality"));
  r.summary = {"ratio=" + num(ratio), "bound=" + num(bound)};
}

void pullback_command(const RunConfig& c, RunResult& r) {
  const std::string profile = c.text("h-profile");
  const double kappa = c.real("kappa");
  const auto domain = make_special_domain(profile, c.real("seminorm"), kappa);
  const auto map = PullbackMap::build(domain, c.real("c"));
  const auto samples = domain_samples(domain, static_cast<std::size_t>(c.integer("samples")), c.seed);

  double composition = 0.0;
  for (const auto& x : samples) {
    const Point2 back = map.inverse(map.forward(x));
    composition = std::max(composition, std::hypot(back[0] - x[0], back[1] - x[1]));
  }
  const auto dist = distance_equivalence_report(map, samples);
  const int order = static_cast<int>(c.integer("order"));
  const auto fit = derivative_blowup_slopes(map, order, c.real("y1-min"), c.real("y1-max"),
                                            static_cast<int>(c.integer("fit-samples")));
  // |d^alpha h2| <~ y1^{ell + kappa - |alpha|}: the fitted slope may not fall below that exponent
  const double expected = std::min(0.0, domain.ell + domain.kappa - order);

  r.table.columns = {"y1", "sup_deriv", "fitted_slope"};
  for (std::size_t i = 0; i < fit.y1.size(); ++i) r.table.add({num(fit.y1[i]), num(fit.sup_derivative[i]), num(fit.slope)});
  auto& rec = r.envelope.records;
  rec.push_back(upper("composition_residual", composition, 1e-8, "pullback-composition"));
  rec.push_back(lower("distance_ratio_low", dist.c_low, 0.8, "pullback-distance-equivalence"));
  rec.push_back(upper("distance_ratio_high", dist.c_high, 1.25, "pullback-distance-equivalence"));
  CheckRecord slope = lower("blowup_slope", fit.slope, expected - 0.2, "pullback-derivative-blowup");
  slope.detail = "order " + std::to_string(order) + ", exponent ell + kappa - |alpha| = " + num(expected);
  rec.push_back(slope);
  r.summary = {"composition=" + num(composition), "c_low=" + num(dist.c_low), "c_high=" + num(dist.c_high),
               "slope=" + num(fit.slope), "expected=" + num(expected)};
}

void partition_command(const RunConfig& c, RunResult& r) {
  const auto count = static_cast<std::size_t>(c.integer("samples"));
  const int dim = static_cast<int>(c.integer("dim"));
  const double w = c.real("overlap");
  std::mt19937_64 rng(mix_seed(c.seed, 0));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point2> nodes(count);
  for (auto& x : nodes) x = {u(rng), dim == 2 ? u(rng) : 0.0};
  std::vector<Patch> cover;
  if (dim == 1) {
    cover = {Patch{1, {-1.5, 0.0}, {w, 0.0}}, Patch{1, {-w, 0.0}, {1.5, 0.0}}};
  } else {
    cover = {Patch{2, {-1.5, -1.5}, {w, 1.5}}, Patch{2, {-w, -1.5}, {1.5, w}}, Patch{2, {-w, -w}, {1.5, 1.5}}};
  }
  const auto pou = build_partition(cover, nodes);
  std::vector<double> field(count);
  for (std::size_t i = 0; i < count; ++i) field[i] = std::cos(7.0 * nodes[i][0]) + nodes[i][1] * nodes[i][1];
  const double dev = partition_deviation(nodes, pou);
  const double ret = retraction_roundtrip(field, nodes, pou);
  r.table.columns = {"x1", "x2", "sum_eta_sq"};
  for (const auto& x : nodes) {
    double s = 0.0;
    for (std::size_t n = 0; n < pou.size(); ++n) s += pou.eta(n, x) * pou.eta(n, x);
    r.table.add({num(x[0]), num(x[1]), num(s)});
  }
  r.envelope.records.push_back(upper("partition_deviation", dev, 1e-12, "partition-of-unity"));
  r.envelope.records.push_back(upper("retraction_residual", ret, 1e-12, "retraction-identity"));
  r.summary = {"deviation=" + num(dev), "retraction=" + num(ret)};
}

void multiplier_command(const RunConfig& c, RunResult& r) {
  const double rho = c.real("rho"), sigma = c.real("sigma");
  const auto mags = log_samples(c.real("rmin"), c.real("rmax"), static_cast<int>(c.integer("n")));
  const auto xis = log_samples(c.real("xi-min"), c.real("xi-max"), static_cast<int>(c.integer("xi-samples")));
  const int angles = static_cast<int>(c.integer("angles"));
  r.table.columns = {"lambda", "xi_max_norm", "arg_angle", "arg_xi"};
  double sup = 0.0;
  for (double m : mags) {
    const std::vector<double> one{m};
    const auto s = multiplier_sector_sup(rho, sigma, one, xis, angles);
    r.table.add({num(m), num(s.sup), num(s.arg_angle), num(s.arg_xi)});
    sup = std::max(sup, s.sup);
  }
  r.envelope.records.push_back(finite("multiplier_sup", sup, "multiplier-sector-bound"));
  r.summary = {"sup=" + num(sup)};
}

BlockOperatorA block_from(const RunConfig& c) {
  return assemble_A(make_rect_grid(static_cast<int>(c.integer("dim")), static_cast<int>(c.integer("n"))), c.real("rho"),
                    c.real("eta"));
}

void spectrum_command(const RunConfig& c, RunResult& r) {
  const auto s = spectrum(block_from(c), static_cast<std::size_t>(c.integer("count")));
  r.table.columns = {"re", "im"};
  for (const auto& z : s.eigenvalues) r.table.add({num(z.real()), num(z.imag())});
  r.envelope.records.push_back({"min_re_positive", s.min_real, 0.0, s.min_real > 0.0 ? Verdict::pass : Verdict::fail,
                                "clamped-spectrum-right-half-plane", {}});
  r.envelope.records.push_back(upper("conjugate_symmetry", s.conjugate_pairing_residual, 1e-10, "spectrum-conjugate-symmetry"));
  r.summary = {"min_re=" + num(s.min_real), "dimension=" + std::to_string(s.dimension)};
}

void resolvent_command(const RunConfig& c, RunResult& r) {
  const auto mags = log_samples(c.real("rmin"), c.real("rmax"), static_cast<int>(c.integer("samples")));
  const auto rep = resolvent_ray_scan(block_from(c), c.real("lambda0"), c.real("sigma"), mags, parse_scan_norm(c.text("norm")));
  r.table.columns = {"mu_re", "mu_im", "lambda_re", "lambda_im", "norm"};
  for (const auto& s : rep.samples) {
    r.table.add({num(s.mu.real()), num(s.mu.imag()), num(s.lambda.real()), num(s.lambda.imag()), num(s.norm)});
  }
  r.envelope.records.push_back(finite("resolvent_sup", rep.sup, "resolvent-sector-bound"));
  r.summary = {"sup=" + num(rep.sup), "norm=" + c.text("norm")};
}

void rademacher_command(const RunConfig& c, RunResult& r) {
  const std::string family = c.text("family");
  const auto members = static_cast<std::size_t>(c.integer("members"));
  const auto size = static_cast<Eigen::Index>(c.integer("size"));
  OperatorFamily fam;
  if (family == "identity") {
    fam.assign(members, Eigen::MatrixXcd::Identity(size, size));
  } else if (family == "random") {
    std::mt19937_64 rng(mix_seed(c.seed, 1));
    std::normal_distribution<double> g;
    for (std::size_t k = 0; k < members; ++k) {
      Eigen::MatrixXcd m(size, size);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(g(rng), g(rng));
      fam.push_back(m);
    }
  } else {
    const double rho = c.real("rho");
    const auto a = assemble_A(make_rect_grid(1, static_cast<int>(size)), rho);
    const double arg = std::numbers::pi - (damping_angle(rho) + 0.3);
    for (double m : log_samples(0.1, 100.0, static_cast<int>(std::max<std::size_t>(members, 2)))) {
      if (fam.size() == members) break;
      fam.push_back(scaled_resolvent(a, std::polar(m, arg), 1.0, ScanNorm::energy));
    }
  }
  RademacherOptions opt;
  opt.trials = static_cast<int>(c.integer("trials"));
  opt.random_tuples = static_cast<int>(c.integer("tuples"));
  opt.ascent_steps = static_cast<int>(c.integer("ascent"));
  opt.complex_phases = c.flag("phases");
  opt.seed = c.seed;
  const auto est = rademacher_bound(fam, {}, opt);
  r.table.columns = {"family", "members", "dimension", "trials", "candidates", "estimate", "scalar_sup"};
  r.table.add({family, std::to_string(fam.size()), std::to_string(fam.front().rows()), std::to_string(est.trials),
               std::to_string(est.candidates), num(est.estimate), num(est.scalar_sup)});
  r.envelope.records.push_back(upper("decoupling_bound", est.estimate, est.scalar_sup + 1e-9, "rademacher-decoupling"));
  if (family == "identity") {
    r.envelope.records.push_back(upper("identity_deviation", std::abs(est.estimate - 1.0), 1e-9, "rademacher-decoupling"));
  }
  r.summary = {"estimate=" + num(est.estimate), "scalar_sup=" + num(est.scalar_sup)};
}

NormSpec norm_from(const RunConfig& c) {
  NormSpec s;
  s.q = c.real("q");
  s.mu = c.real("mu");
  s.p = c.real("p");
  s.gamma = c.real("gamma");
  if (c.has("k")) s.k = static_cast<int>(c.integer("k"));
  return s;
}

void solve_command(const RunConfig& c, RunResult& r) {
  const int dim = static_cast<int>(c.integer("dim"));
  const RectGrid grid = make_rect_grid(dim, static_cast<int>(c.integer("n")));
  const double rho = c.real("rho"), theta = c.real("theta");
  const auto a = assemble_A(grid, rho);
  const int steps = static_cast<int>(std::lround(c.real("T") / c.real("dt")));
  const TimeGrid time = make_time_grid(c.real("T"), steps, c.flag("truncated"));
  const SourceField src = make_source(c.text("source"), dim, rho);
  const BoundaryLift lift = make_lift(c.text("lift"), dim);
  const bool homogeneous = c.text("lift") == "zero";
  Eigen::VectorXd v0;
  if (c.text("initial") == "slow-modes") v0 = slow_mode_state(a, 6, c.seed);
  if (!homogeneous && v0.size() != 0) throw ArgumentError("slow-modes initial data needs lift=zero");

  Trajectory traj;
  std::vector<double> bres;
  if (homogeneous) {
    traj = solve_cauchy(a, grid, src.f, time, theta, v0);
    for (std::size_t n = 0; n < traj.states.size(); ++n) bres.push_back(boundary_residual(grid, traj.u(n), nullptr, 0.0));
  } else {
    auto sol = solve_inhomogeneous(a, grid, src.f, lift, time, theta);
    traj = std::move(sol.homogeneous);
    bres = std::move(sol.boundary_residual);
  }
  const auto energy = energy_dissipation_check(traj);
  r.table.columns = {"t", "energy", "boundary_residual"};
  for (std::size_t n = 0; n < energy.energy.size(); ++n) r.table.add({num(energy.times[n]), num(energy.energy[n]), num(bres[n])});

  auto& rec = r.envelope.records;
  double worst_bres = 0.0;
  for (double b : bres) worst_bres = std::max(worst_bres, b);
  CheckRecord b = finite("boundary_residual_max", worst_bres, "boundary-lift");
  b.detail = "h = " + num(grid.h()) + "; expected O(h^2)";
  rec.push_back(b);
  const bool unforced = !src.f && homogeneous;
  if (unforced && theta == 1.0) {
    CheckRecord m{"energy_monotone", energy.max_increase, 1e-12, energy.monotone ? Verdict::pass : Verdict::fail,
                  "energy-dissipation", {}};
    rec.push_back(m);
  } else {
    CheckRecord bal = finite("energy_balance_residual", energy.balance_residual, "energy-dissipation");
    bal.detail = "dE/dt + 2 rho |grad w|^2 - 2 (f, w), trapezoidal in time";
    if (!homogeneous) bal.detail += "; lifted run, balance of the homogeneous part";
    rec.push_back(bal);
  }
  if (unforced && energy.energy.front() > 0.0) {
    const auto fit = decay_rate(energy);
    CheckRecord d{"decay_rate", fit.rate, 0.0, fit.verdict, "exponential-stability", {}};
    d.detail = "e-foldings " + num(fit.e_foldings);
    rec.push_back(d);
  }
  if (time.truncated) rec.push_back({"tail_energy", energy.tail_energy, kNoBound, Verdict::pass, "exponential-stability", {}});
  if (homogeneous && v0.size() == 0) {
    const auto mr = mr_ratio(traj, a, norm_from(c));
    CheckRecord m{"mr_ratio", mr.ratio, kNoBound, std::isfinite(mr.ratio) ? Verdict::pass : Verdict::skipped,
                  "maximal-regularity-estimate", {}};
    if (!std::isfinite(mr.ratio)) m.detail = "f = 0";
    rec.push_back(m);
  }
  r.summary = {"steps=" + std::to_string(steps), "scheme=" + traj.scheme(), "final_energy=" + num(energy.energy.back()),
               "boundary_residual_max=" + num(worst_bres)};
}

void mr_command(const RunConfig& c, RunResult& r) {
  const int dim = static_cast<int>(c.integer("dim"));
  std::vector<SourceField> suite;
  for (const auto& name : c.list("sources")) suite.push_back(make_source(name, dim, c.real("rho")));
  std::vector<int> ns;
  int n = static_cast<int>(c.integer("n"));
  for (long long l = 0; l < c.integer("levels"); ++l, n = 2 * n + 1) ns.push_back(n);
  MROptions opt;
  opt.rho = c.real("rho");
  opt.horizon = c.real("T");
  opt.theta = c.real("theta");
  opt.dim = dim;
  opt.dt_per_h = c.real("dt-per-h");
  opt.drift_bound = c.real("drift-bound");
  const auto rep = mr_ratio_report(suite, norm_from(c), ns, opt);
  r.table.columns = {"source", "n", "h", "dt", "u_norm", "f_norm", "ratio"};
  for (const auto& f : rep.fields) {
    for (const auto& x : f.refinements) {
      r.table.add({f.name, std::to_string(x.n), num(x.h), num(x.dt), num(x.u_norm), num(x.f_norm), num(x.ratio)});
    }
    CheckRecord rec{"mr_ratio_drift:" + f.name, f.drift, opt.drift_bound, f.verdict, "maximal-regularity-estimate", {}};
    if (f.verdict == Verdict::skipped) rec.detail = "f = 0";
    r.envelope.records.push_back(rec);
    r.summary.push_back(f.name + ".drift=" + num(f.drift));
  }
  r.summary.push_back("max_ratio=" + num(rep.max_ratio));
}

}  // namespace

RunResult run(const RunConfig& config) {
  RunResult r;
  r.envelope.command = config.command;
  r.envelope.config = config.values;
  r.envelope.seed = config.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const std::string& cmd = config.command;
    if (cmd == "pencil") pencil_command(config, r);
    else if (cmd == "traces") traces_command(config, r);
    else if (cmd == "hardy") hardy_command(config, r);
    else if (cmd == "pullback-check") pullback_command(config, r);
    else if (cmd == "partition-check") partition_command(config, r);
    else if (cmd == "multiplier-scan") multiplier_command(config, r);
    else if (cmd == "spectrum") spectrum_command(config, r);
    else if (cmd == "resolvent-scan") resolvent_command(config, r);
    else if (cmd == "rademacher") rademacher_command(config, r);
    else if (cmd == "solve") solve_command(config, r);
    else if (cmd == "mr-ratio") mr_command(config, r);
    else throw ArgumentError("no handler for command '" + cmd + "'");
  } catch (const std::exception& e) {
    r.envelope.records.push_back({"error", kNoBound, kNoBound, Verdict::fail, config.command, e.what()});
  }
  r.envelope.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int run_and_write(const RunConfig& config, std::ostream& out) {
  RunResult r = run(config);
  if (!r.table.columns.empty()) write_atomic(config.csv_path, to_csv(r.table));
  write_atomic(config.report_path, to_jsonl(r.envelope));
  for (const auto& line : r.summary) out << line << '\n';
  for (const auto& rec : r.envelope.records) {
    out << "check " << rec.name << " value=" << format_number(rec.value) << " bound=" << format_number(rec.bound)
        << " verdict=" << to_string(rec.verdict);
    if (!rec.detail.empty()) out << " (" << rec.detail << ")";
    out << '\n';
  }
  return exit_code(r.envelope);
}

}  // namespace platemr
