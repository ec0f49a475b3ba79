#pragma once

// Independent reference values for the unit tests. Everything here goes
// through Boost.Math quadrature or closed forms, never the library's own
// integrators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace ref {

using cplx = std::complex<double>;

/// int f over [a, b] (either end may be infinite), adaptive G30K61.
template <class F>
cplx integrate(F f, double a, double b, double tol = 1e-13) {
  auto re = [&](double x) { return f(x).real(); };
  auto im = [&](double x) { return f(x).imag(); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double r = GK::integrate(re, a, b, 12, tol);
  const double i = GK::integrate(im, a, b, 12, tol);
  return {r, i};
}

/// int f over the real line, split at the sorted breakpoints.
template <class F>
cplx integrate_line(F f, std::vector<double> breaks, double tol = 1e-13) {
  std::sort(breaks.begin(), breaks.end());
  const double inf = std::numeric_limits<double>::infinity();
  cplx acc = integrate(f, -inf, breaks.front(), tol);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    if (breaks[k + 1] > breaks[k]) acc += integrate(f, breaks[k], breaks[k + 1], tol);
  acc += integrate(f, breaks.back(), inf, tol);
  return acc;
}

inline double gaussian(double v, double s2 = 1.0) {
  return std::exp(-0.5 * v * v / s2) / std::sqrt(2.0 * M_PI * s2);
}

inline cplx gaussian(cplx z, double s2 = 1.0) {
  return std::exp(-0.5 * z * z / s2) / std::sqrt(2.0 * M_PI * s2);
}

inline double cauchy(double v, double a = 1.0) { return a / (M_PI * (v * v + a * a)); }

/// Cauchy transform of the cauchy(a) density: int g/(v - z)^{n+1} dv for Im z > 0
/// equals d^n/dz^n (-1/(z + ia)) / n!.
inline cplx cauchy_i_n_upper(int n, cplx z, double a = 1.0) {
  const cplx w = z + cplx(0.0, a);
  return -std::pow(-1.0, n) * std::pow(w, -(n + 1));
}

/// Same for Im z < 0: -1/(z - ia) becomes d^n/dz^n(-1/(z - ia))/n!.
inline cplx cauchy_i_n_lower(int n, cplx z, double a = 1.0) {
  const cplx w = z - cplx(0.0, a);
  return -std::pow(-1.0, n) * std::pow(w, -(n + 1));
}

/// Sum of int f over consecutive sorted breakpoints (finite range).
template <class F>
cplx integrate_pieces(F f, std::vector<double> breaks, double tol = 1e-13) {
  std::sort(breaks.begin(), breaks.end());
  cplx acc{};
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    if (breaks[k + 1] > breaks[k]) acc += integrate(f, breaks[k], breaks[k + 1], tol);
  return acc;
}

/// Reference of int g(v) prod (v - z_k)^{-p_k} dv for a gaussian-tailed g,
/// truncated to [-12, 12] with breakpoints near every pole.
template <class G>
cplx pole_integral(G g, const std::vector<cplx>& z, const std::vector<int>& p, double tol = 1e-13) {
  std::vector<double> breaks = {-12.0, -8.0, 0.0, 8.0, 12.0};
  for (const cplx& zk : z) {
    breaks.push_back(zk.real());
    breaks.push_back(zk.real() - 3.0 * std::abs(zk.imag()));
    breaks.push_back(zk.real() + 3.0 * std::abs(zk.imag()));
  }
  auto f = [&](double v) {
    cplx den(1.0);
    for (std::size_t k = 0; k < z.size(); ++k) den *= std::pow(cplx(v, 0.0) - z[k], p[k]);
    return cplx(g(v), 0.0) / den;
  };
  for (double& b : breaks) b = std::clamp(b, -12.0, 12.0);
  return integrate_pieces(f, breaks, tol);
}

/// 5-point polynomial extrapolation to h = 0 (Neville).
inline cplx richardson(const std::vector<double>& h, const std::vector<cplx>& y) {
  std::vector<cplx> p(y);
  const std::size_t n = h.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
  return p[0];
}

}  // namespace ref
