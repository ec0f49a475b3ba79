// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "anderson/expansion.hpp"
#include "anderson/identities.hpp"
#include "anderson/oracle.hpp"
#include "anderson/parallel.hpp"

using namespace anderson;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail, Clock::time_point t0) {
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("[%s] %d %s: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(), s);
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

/// Identity groups with a runtime cap.
void group_criterion(int id, const std::string& title, const std::vector<IdentityCheck>& checks,
                     Clock::time_point t0, double limit_s = 60.0) {
  bool pass = true;
  std::string detail;
  for (const auto& c : checks) {
    pass = pass && c.pass;
    if (!c.pass) detail += "failed: " + c.name + fmt(" (%.3g > %.3g); ", c.worst, c.tolerance);
  }
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  if (s > limit_s) pass = false, detail += fmt("runtime %.1fs over %.0fs; ", s, limit_s);
  if (detail.empty()) detail = std::to_string(checks.size()) + " checks";
  report(id, title, pass, detail, t0);
}

const AnalyticDensity kGauss = AnalyticDensity::gaussian(1.0, 1.0);

}  // namespace

int main() {
  const int threads = resolve_threads(0);

  auto t0 = Clock::now();
  group_criterion(1, "identity suite", cauchy_identities(kGauss), t0);
  t0 = Clock::now();
  group_criterion(2, "boundary-value suite", boundary_identities(kGauss), t0);
  t0 = Clock::now();
  group_criterion(3, "singularity exponent", singularity_checks(kGauss), t0);
  t0 = Clock::now();
  group_criterion(4, "walk suite", walk_identities(), t0);

  {
    t0 = Clock::now();
    ExpansionConfig cfg;
    cfg.density = kGauss;
    cfg.d = 1;
    cfg.lambda = 0.05;
    cfg.order = 8;
    cfg.threads = threads;
    const FiniteBox box(1, 20);
    bool pass = true;
    double worst_ratio = 0.0;
    for (int k = 0; k <= 10; ++k) {
      const cplx z(-2.0 + 0.4 * k, 0.4);
      const SeriesValue s = green_series(cfg, {z});
      const McResult m = mc_green(box, cfg.lambda, kGauss, z, McOptions{2000, 1000u + k, threads, cfg.order});
      const double allowed = 3.0 * m.stderr_ + s.tail_bound;
      worst_ratio = std::max(worst_ratio, std::abs(s.value - m.mean) / allowed);
      pass = pass && std::abs(s.value - m.mean) <= allowed;
    }
    auto zero = cfg;
    zero.lambda = 0.0;
    double zero_err = 0.0;
    for (int k = 0; k <= 10; ++k) {
      const cplx z(-2.0 + 0.4 * k, 0.4);
      // independent adaptive quadrature of g(v)/(v - z)
      const cplx ref = quad_reference([&](double v) { return kGauss.eval(v) / (v - z); }, -40.0, 40.0, 1e-13);
      zero_err = std::max(zero_err, std::abs(green_series(zero, {z}).value - ref));
    }
    pass = pass && zero_err <= 1e-10;
    report(5, "series vs oracle, N=1", pass,
           fmt("max |series-mc|/(3 stderr + tail) = %.3f, lambda=0 error %.2e", worst_ratio, zero_err), t0);
  }

  {
    t0 = Clock::now();
    ExpansionConfig cfg;
    cfg.density = kGauss;
    cfg.d = 1;
    cfg.lambda = 0.05;
    cfg.order = 6;
    cfg.threads = threads;
    cfg.observables = {velocity(0, cfg.lambda), velocity(0, cfg.lambda)};
    const FiniteBox box(1, 20);
    bool pass = true;
    double worst_ratio = 0.0;
    int k = 0;
    for (double E1 : {-2.0, -1.5, -1.0})
      for (double E2 : {0.0, 0.5, 1.0}) {
        const std::vector<cplx> z = {cplx(E1, 0.4), cplx(E2, -0.4)};
        const SeriesValue s = green_series(cfg, z);
        const McResult m =
            mc_npoint(box, cfg.lambda, kGauss, cfg.observables, z, McOptions{2000, 2000u + k++, threads, cfg.order});
        const double allowed = 3.0 * m.stderr_ + s.tail_bound;
        worst_ratio = std::max(worst_ratio, std::abs(s.value - m.mean) / allowed);
        pass = pass && std::abs(s.value - m.mean) <= allowed;
      }
    report(6, "series vs oracle, N=2 current-current", pass,
           fmt("max |series-mc|/(3 stderr + tail) = %.3f", worst_ratio), t0);
  }

  {
    t0 = Clock::now();
    // wide density so that the convergence radius admits a visible lambda range
    ExpansionConfig cfg;
    cfg.density = AnalyticDensity::gaussian(25.0, 1.0);
    cfg.d = 1;
    cfg.order = 12;
    cfg.gap = 8.0;
    cfg.delta = 2.0;
    cfg.threads = threads;
    const EnergyVector E{-4.0, 4.0};
    const double lmax = 0.9 * cfg.gap / radius_a0(cfg.d, 2, cfg.density);
    bool pass = true;
    double worst = 0.0;
    const int steps = 4;
    for (int i = 0; i <= steps; ++i) {
      cfg.lambda = 0.01 + (lmax - 0.01) * i / steps;
      for (const SignVector& sigma : {SignVector{HalfPlane::upper, HalfPlane::lower},
                                      SignVector{HalfPlane::upper, HalfPlane::upper}}) {
        const SeriesValue s = npoint_boundary_series(cfg, sigma, E);
        for (int n = 0; n <= 10; ++n) {
          const double diff = std::abs(s.partial_sums[n] - s.partial_sums[12]);
          worst = std::max(worst, diff / s.tail_bounds[n]);
          pass = pass && std::isfinite(s.tail_bounds[n]) && diff <= s.tail_bounds[n];
        }
      }
    }
    report(7, "tail-bound soundness", pass,
           fmt("lambda in [0.01, %.4f], max remainder/bound = %.3g", lmax, worst), t0);
  }

  {
    t0 = Clock::now();
    ExpansionConfig cfg;
    cfg.density = kGauss;
    cfg.d = 1;
    cfg.threads = threads;
    double zero_err = 0.0;
    for (int k = 0; k < 121; ++k) {
      const double E = -3.0 + 0.05 * k;
      zero_err = std::max(zero_err, std::abs(dos_value(dos_series(cfg, HalfPlane::upper, E)) - kGauss.eval(E).real()));
    }
    cfg.lambda = 0.05;
    cfg.order = 12;
    const double eps = 0.2;
    std::vector<double> grid;
    for (int k = 0; k <= 160; ++k) grid.push_back(-4.0 + 0.05 * k);
    const auto oracle = smoothed_dos(FiniteBox(1, 20), cfg.lambda, kGauss, eps, grid, McOptions{2000, 8, threads, 0});
    double series_int = 0.0, oracle_int = 0.0, prev_s = 0.0, prev_o = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double s = green_series(cfg, {cplx(grid[k], eps)}).value.imag() / std::numbers::pi;
      if (k > 0) {
        series_int += 0.025 * (s + prev_s);
        oracle_int += 0.025 * (oracle[k].mean + prev_o);
      }
      prev_s = s;
      prev_o = oracle[k].mean;
    }
    const double rel = std::abs(series_int - oracle_int) / std::abs(oracle_int);
    const bool pass = zero_err <= 1e-10 && rel <= 0.02;
    report(8, "DOS sanity", pass,
           fmt("lambda=0 error %.2e, smoothed integral relative difference %.2e", zero_err, rel), t0);
  }

  std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
