#pragma once

// Self-consistency checks between independent evaluation routes. Used by the
// `identities` command and the acceptance run.

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "anderson/cauchy1.hpp"
#include "anderson/cauchyN.hpp"
#include "anderson/densities.hpp"
#include "anderson/multi_index.hpp"
#include "anderson/walks.hpp"

namespace anderson {

struct IdentityCheck {
  std::string group;
  std::string name;
  double worst = 0.0;  // largest observed discrepancy
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

namespace detail {

inline IdentityCheck timed(std::string group, std::string name, double tol,
                           const std::function<double()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  IdentityCheck c{std::move(group), std::move(name), 0.0, tol, false, 0.0};
  c.worst = body();
  c.pass = c.worst <= tol;
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

inline SignVector sign_mask(std::size_t N, int mask) {
  SignVector s;
  for (std::size_t k = 0; k < N; ++k) s.push_back((mask >> k) & 1 ? HalfPlane::lower : HalfPlane::upper);
  return s;
}

/// Neville extrapolation of y(h) to h = 0.
inline cplx extrapolate_to_zero(const std::vector<double>& h, std::vector<cplx> y) {
  for (std::size_t m = 1; m < h.size(); ++m)
    for (std::size_t i = 0; i + m < h.size(); ++i)
      y[i] = (h[i + m] * y[i] - h[i] * y[i + 1]) / (h[i + m] - h[i]);
  return y[0];
}

/// Least-squares slope of log|f(h)| against log h.
inline double loglog_slope(const std::vector<double>& h, const std::vector<double>& f) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < h.size(); ++i) mx += std::log(h[i]), my += std::log(f[i]);
  mx /= h.size();
  my /= h.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double dx = std::log(h[i]) - mx;
    sxy += dx * (std::log(f[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace detail

/// One-point derivative chain, partial fractions, simplex identity and the
/// restricted multi-index sum.
inline std::vector<IdentityCheck> cauchy_identities(const AnalyticDensity& g) {
  std::vector<IdentityCheck> out;
  out.push_back(detail::timed("cauchy", "I_n(g;z) = I_0(g^(n);z)/n!, n<=6, 20 points (rel)", 1e-9, [&] {
    double worst = 0.0;
    for (int n = 0; n <= 6; ++n) {
      const AnalyticFunction gn = g.function().derivative_function(n);
      for (int k = 0; k < 20; ++k) {
        const double im = (0.1 + 0.8 * (k % 5) / 4.0) * (k % 2 ? -1.0 : 1.0);
        const cplx z(-2.0 + 0.2 * k, im);
        const cplx a = i_n(g, n, z);
        const cplx b = i_n(gn, 0, z) / factorial(n);
        worst = std::max(worst, std::abs(a - b) / std::max(1e-300, std::abs(a)));
      }
    }
    return worst;
  }));
  out.push_back(detail::timed("cauchy", "partial fractions = direct J_n, N=2,3, |n|<=3 (rel)", 1e-9, [&] {
    const std::vector<std::vector<cplx>> grids = {
        {cplx(-0.5, 0.3), cplx(0.7, 0.6)},
        {cplx(-0.5, 0.3), cplx(0.7, -0.6)},
        {cplx(0, 1), cplx(0, 2), cplx(0, 3)},
        {cplx(-1.0, 0.4), cplx(0.2, -0.5), cplx(1.3, 0.8)},
    };
    double worst = 0.0;
    for (const auto& z : grids)
      for (int total = 0; total <= 3; ++total)
        for_each_composition(total, z.size(), [&](const std::vector<int>& m) {
          const cplx a = j_n(g, MultiIndex(m), z);
          const cplx b = j_partial_fraction(g, MultiIndex(m), z);
          worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        });
    return worst;
  }));
  out.push_back(detail::timed("cauchy", "simplex identity, N<=4, |n|<=4", 1e-10, [&] {
    const std::vector<cplx> z4 = {cplx(0, 1), cplx(1, 2), cplx(-1, 1.5), cplx(0.5, 0.5)};
    const std::vector<cplx> probes = {cplx(3.0, -1.0), cplx(-2.5, 0.2), cplx(0.3, 3.5)};
    double worst = 0.0;
    for (std::size_t N = 1; N <= 4; ++N) {
      const std::vector<cplx> z(z4.begin(), z4.begin() + N);
      for (const cplx& v : probes)
        for (int total = 0; total <= 4; ++total)
          for_each_composition(total, N, [&](const std::vector<int>& m) {
            const auto s = simplex_pole_product(MultiIndex(m), z, v);
            worst = std::max(worst, std::abs(s.lhs - s.rhs) / std::abs(s.lhs));
          });
    }
    return worst;
  }));
  out.push_back(detail::timed("cauchy", "restricted multi-index sum, L<=4, |n|<=6, r<=6 (exact)", 0.0, [&] {
    double mismatches = 0.0;
    for (std::size_t L = 1; L <= 4; ++L)
      for (int nt = 0; nt <= 6; ++nt)
        for_each_composition(nt, L, [&](const std::vector<int>& n) {
          for (int r = 0; r <= 6; ++r) {
            const auto s = restricted_multiindex_sum(MultiIndex(n), r);
            mismatches += s.enumerated != s.closed_form;
          }
        });
    return mismatches;
  }));
  return out;
}

/// Boundary values: imaginary part, uniform bound, decomposed against direct
/// and the epsilon limit of the off-axis integral.
inline std::vector<IdentityCheck> boundary_identities(const AnalyticDensity& g) {
  std::vector<IdentityCheck> out;
  std::vector<double> grid;
  for (int k = 0; k < 200; ++k) grid.push_back(-4.0 + 8.0 * k / 199.0);
  out.push_back(detail::timed("boundary", "Im I_0^+(g;E) = pi g(E), 200 points", 1e-10, [&] {
    double worst = 0.0;
    for (double E : grid)
      worst = std::max(worst, std::abs(i0_boundary(g, HalfPlane::upper, E).imag() - std::numbers::pi * g.eval(E).real()));
    return worst;
  }));
  out.push_back(detail::timed("boundary", "|I_0^sigma(g;E)| <= uniform bound (excess)", 0.0, [&] {
    const double bound = i0_bound(g);
    double excess = 0.0;
    for (double E : grid)
      for (HalfPlane s : {HalfPlane::upper, HalfPlane::lower})
        excess = std::max(excess, std::abs(i0_boundary(g, s, E)) - bound);
    return std::max(0.0, excess);
  }));
  const std::vector<EnergyVector> grids = {{-0.5, 0.5}, {0.0, 1.3}, {-1.0, 0.0, 0.8}, {-0.4, 0.6, 1.6}};
  out.push_back(detail::timed("boundary", "decomposed = direct boundary value, N=2,3, |n|<=3", 1e-8, [&] {
    double worst = 0.0;
    for (const auto& E : grids) {
      const std::size_t N = E.size();
      for (int total = 0; total <= 3; ++total)
        for_each_composition(total, N, [&](const std::vector<int>& m) {
          const MultiIndex n(m);
          // the regular part does not depend on the signs
          const cplx reg = j_reg(g, n, E);
          for (int mask = 0; mask < (1 << N); ++mask) {
            const SignVector s = detail::sign_mask(N, mask);
            const cplx dec = mask == 1 ? j_sigma_decomposed(g, n, s, E) : reg + singular_part(g, n, s, E);
            worst = std::max(worst, std::abs(dec - j_sigma_direct(g, n, s, E)));
          }
        });
    }
    return worst;
  }));
  out.push_back(detail::timed("boundary", "epsilon -> 0 limit of J_n matches both routes, N=2", 1e-6, [&] {
    std::vector<double> h;
    for (int k = 0; k < 7; ++k) h.push_back(0.05 * std::pow(0.5, k));
    double worst = 0.0;
    for (const EnergyVector& E : {EnergyVector{-0.5, 0.7}, EnergyVector{0.0, 0.5}})
      for (int mask = 0; mask < 4; ++mask) {
        const SignVector s = detail::sign_mask(2, mask);
        for (int total = 0; total <= 3; ++total)
          for_each_composition(total, 2, [&](const std::vector<int>& m) {
            const MultiIndex n(m);
            std::vector<cplx> y;
            for (double e : h)
              y.push_back(j_n(g, n, {cplx(E[0], sign(s[0]) * e), cplx(E[1], sign(s[1]) * e)}));
            const cplx lim = detail::extrapolate_to_zero(h, y);
            worst = std::max({worst, std::abs(lim - j_sigma_direct(g, n, s, E)),
                              std::abs(lim - j_sigma_decomposed(g, n, s, E))});
          });
      }
    return worst;
  }));
  return out;
}

/// Behaviour of J^sigma(0, h) as h -> 0: a simple pole for opposite signs,
/// bounded for equal signs.
inline std::vector<IdentityCheck> singularity_checks(const AnalyticDensity& g) {
  std::vector<IdentityCheck> out;
  std::vector<double> hs;
  for (int k = 0; k <= 8; ++k) hs.push_back(std::pow(10.0, -3.0 + 0.25 * k));
  auto magnitudes = [&](const SignVector& s) {
    std::vector<double> f;
    for (double h : hs) f.push_back(std::abs(j_sigma_direct(g, MultiIndex{0, 0}, s, EnergyVector{0.0, h})));
    return f;
  };
  double slope = 0.0;
  out.push_back(detail::timed("singularity", "log-log slope + 1 for sigma=(+,-) (rel 5%)", 0.05, [&] {
    slope = detail::loglog_slope(hs, magnitudes({HalfPlane::upper, HalfPlane::lower}));
    return std::abs(slope + 1.0);
  }));
  out.back().name += " [slope " + std::to_string(slope) + "]";
  out.push_back(detail::timed("singularity", "relative variation for sigma=(+,+)", 0.10, [&] {
    const auto f = magnitudes({HalfPlane::upper, HalfPlane::upper});
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    return (*hi - *lo) / *hi;
  }));
  return out;
}

/// Closed-walk counts against plain step-sequence enumeration, the path-count
/// bound and visit-count conservation on random families.
inline std::vector<IdentityCheck> walk_identities() {
  std::vector<IdentityCheck> out;
  out.push_back(detail::timed("walks", "closed walks in d=1 equal C(n,n/2), n<=12 (mismatches)", 0.0, [] {
    double bad = 0.0;
    for (int n = 0; n <= 12; ++n)
      bad += count_npaths(1, {Site{}}, n) != (n % 2 ? 0 : binomial(n, n / 2));
    return bad;
  }));
  out.push_back(detail::timed("walks", "closed walks in d=2 equal brute force, n<=8 (mismatches)", 0.0, [] {
    double bad = 0.0;
    for (int n = 0; n <= 8; ++n) {
      std::uint64_t brute = 0;
      const std::uint64_t total = std::uint64_t{1} << (2 * n);
      for (std::uint64_t code = 0; code < total; ++code) {
        int x = 0, y = 0;
        for (int k = 0; k < n; ++k) {
          const int dir = static_cast<int>((code >> (2 * k)) & 3);
          (dir < 2 ? x : y) += dir % 2 ? -1 : 1;
        }
        brute += x == 0 && y == 0;
      }
      bad += count_npaths(2, {Site{}}, n) != brute;
    }
    return bad;
  }));
  out.push_back(detail::timed("walks", "closed walks <= (2d)^n, d<=3, n<=8 (violations)", 0.0, [] {
    double bad = 0.0;
    for (int d = 1; d <= 3; ++d)
      for (int n = 0; n <= 8; ++n) bad += static_cast<double>(count_walks(d, n)) > std::pow(2.0 * d, n);
    return bad;
  }));
  out.push_back(detail::timed("walks", "visit counts conserve length on 1000 random families (violations)", 0.0, [] {
    std::mt19937_64 rng(12345);
    double bad = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int d = 1 + static_cast<int>(rng() % 3);
      const std::size_t N = 1 + rng() % 3;
      NPathFamily fam;
      Site at{};
      for (std::size_t i = 0; i < N; ++i) {
        if (i > 0) at = at + unit(static_cast<int>(rng() % d), rng() % 2 ? 1 : -1);
        LatticeWalk g{{at}};
        const int len = static_cast<int>(rng() % 7);
        for (int k = 0; k < len; ++k) {
          at = at + unit(static_cast<int>(rng() % d), rng() % 2 ? 1 : -1);
          g.sites.push_back(at);
        }
        fam.walks.push_back(g);
      }
      for (std::size_t i = 0; i < N; ++i) {
        const Site& next = i + 1 < N ? fam.walks[i + 1].start() : fam.walks[0].start();
        fam.offsets.push_back(next - fam.walks[i].end());
      }
      int total = 0;
      for (const auto& [u, m] : visit_counts(fam)) total += m.total();
      bad += !fam.compatible() || total != fam.length() + static_cast<int>(N);
    }
    return bad;
  }));
  return out;
}

inline std::vector<IdentityCheck> identity_suite(const AnalyticDensity& g = AnalyticDensity::gaussian()) {
  std::vector<IdentityCheck> all;
  for (auto part : {cauchy_identities(g), boundary_identities(g), singularity_checks(g), walk_identities()})
    all.insert(all.end(), part.begin(), part.end());
  return all;
}

}  // namespace anderson
