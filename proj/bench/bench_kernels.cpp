// Serial reference vs OpenMP path for the hot kernels. Prints one line per
// kernel: best-of-k wall time of each path, speedup and the max deviation
// between the two results.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "platemr/fourier.hpp"
#include "platemr/geometry.hpp"
#include "platemr/parallel.hpp"
#include "platemr/rademacher.hpp"
#include "platemr/stencil.hpp"

using namespace platemr;

namespace {

double best_of(int reps, const std::function<void()>& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    body();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const std::string& name, double serial, double parallel, double deviation) {
  std::printf("%-22s serial=%10.4f ms  omp=%10.4f ms  speedup=%6.2f  max_dev=%.3g\n", name.c_str(), 1e3 * serial,
              1e3 * parallel, serial / parallel, deviation);
}

double max_dev(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plate-mr kernel benchmark"};
  int reps = 5;
  int threads = 0;
  app.add_option("--reps", reps, "repetitions per kernel (best time is reported)")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP thread cap (default: PLATE_MR_THREADS or all cores)");
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) set_thread_limit(threads);
  std::printf("threads=%d reps=%d\n", thread_limit(), reps);

  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;

  {
    auto grid = make_rect_grid(2, 512);
    std::vector<double> u(grid.size()), a(grid.size()), b(grid.size());
    for (auto& x : u) x = gauss(rng);
    double ts = best_of(reps, [&] { apply_biharmonic_serial(grid, u, a); });
    double tp = best_of(reps, [&] { apply_biharmonic(grid, u, b); });
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    report("biharmonic_apply", ts, tp, d);
  }

  {
    TorusGrid grid(256, 2);
    SpectralPair f;
    f.u.coeffs.resize(grid.size());
    f.v.coeffs.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      f.u.coeffs[k] = {gauss(rng), gauss(rng)};
      f.v.coeffs[k] = {gauss(rng), gauss(rng)};
    }
    const Complex lambda{1.0, 2.0};
    SpectralPair rs, rp;
    double ts = best_of(reps, [&] { rs = torus_resolvent_apply_serial(grid, f, lambda, 1.0); });
    double tp = best_of(reps, [&] { rp = torus_resolvent_apply(grid, f, lambda, 1.0); });
    report("torus_resolvent", ts, tp, std::max(max_dev(rs.u.coeffs, rp.u.coeffs), max_dev(rs.v.coeffs, rp.v.coeffs)));
  }

  {
    auto mags = log_samples(1e-3, 1e3, 64);
    auto xis = log_samples(1e-2, 1e2, 64);
    MultiplierScan ms{}, mp{};
    double ts = best_of(reps, [&] { ms = multiplier_sector_sup_serial(1.0, 1.6, mags, xis, 181); });
    double tp = best_of(reps, [&] { mp = multiplier_sector_sup(1.0, 1.6, mags, xis, 181); });
    report("multiplier_scan", ts, tp, std::abs(ms.sup - mp.sup));
  }

  {
    OperatorFamily family;
    for (int n = 0; n < 8; ++n) family.push_back(Eigen::MatrixXcd::Random(16, 16));
    RademacherOptions opt;
    opt.trials = 2048;
    opt.seed = 7;
    RademacherEstimate es{}, ep{};
    double ts = best_of(reps, [&] { es = rademacher_bound_serial(family, {}, opt); });
    double tp = best_of(reps, [&] { ep = rademacher_bound(family, {}, opt); });
    report("rademacher_bound", ts, tp, std::abs(es.estimate - ep.estimate));
  }

  {
    // pullback derivative sweep: the thread cap of 1 is the serial reference
    auto map = PullbackMap::build(make_special_domain("holder", 0.1, 0.5));
    const int cap = thread_limit();
    BlowupFit fs{}, fp{};
    set_thread_limit(1);
    double ts = best_of(reps, [&] { fs = derivative_blowup_slopes(map, 2); });
    set_thread_limit(cap);
    double tp = best_of(reps, [&] { fp = derivative_blowup_slopes(map, 2); });
    report("pullback_blowup_sweep", ts, tp, std::abs(fs.slope - fp.slope));
  }
  return 0;
}
