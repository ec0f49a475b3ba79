#pragma once

// One-variable Cauchy transforms I_n(h; z) = int h(v) / (v - z)^{n+1} dv and
// their boundary values on the real axis.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "anderson/analytic.hpp"
#include "anderson/densities.hpp"
#include "anderson/errors.hpp"
#include "anderson/multi_index.hpp"
#include "anderson/quadrature.hpp"

namespace anderson {

/// Choice of half plane for a boundary value: E + i0 (upper) or E - i0 (lower).
enum class HalfPlane : int { upper = 1, lower = -1 };

inline int sign(HalfPlane s) { return static_cast<int>(s); }

inline HalfPlane half_plane(int s) {
  if (s == 1) return HalfPlane::upper;
  if (s == -1) return HalfPlane::lower;
  throw InvalidArgument("half-plane sign must be +1 or -1");
}

inline HalfPlane flip(HalfPlane s) { return s == HalfPlane::upper ? HalfPlane::lower : HalfPlane::upper; }

inline char sign_char(HalfPlane s) { return s == HalfPlane::upper ? '+' : '-'; }

namespace detail {

inline quad::Options line_options() {
  quad::Options opt;
  opt.rel_tol = 1e-13;
  opt.abs_tol = 1e-15;
  opt.max_intervals = 6000;
  return opt;
}

/// Integration path v(t) = t + i w(t) with w piecewise linear through the
/// knots and constant beyond them.
struct Path {
  std::vector<double> x{0.0};
  std::vector<double> w{0.0};

  static Path horizontal(double height) { return Path{{0.0}, {height}}; }

  double height(double t) const {
    if (t <= x.front()) return w.front();
    if (t >= x.back()) return w.back();
    const auto k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    const double s = (t - x[k - 1]) / (x[k] - x[k - 1]);
    return w[k - 1] + s * (w[k] - w[k - 1]);
  }
  double slope(double t) const {
    if (t <= x.front() || t >= x.back()) return 0.0;
    const auto k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    return (w[k] - w[k - 1]) / (x[k] - x[k - 1]);
  }
};

/// int along the path of h(v) / prod_k (v - z_k)^{p_k} dv. The caller
/// guarantees the path stays in the strip and is homotopic to the real axis
/// without crossing a pole.
template <class Powers>
cplx path_integral(const AnalyticFunction& h, const Powers& poles, const Path& path) {
  std::vector<double> breaks = {h.center() - 4.0 * h.scale(), h.center(),
                                h.center() + 4.0 * h.scale()};
  breaks.insert(breaks.end(), path.x.begin(), path.x.end());
  for (const auto& [z, p] : poles) {
    breaks.push_back(z.real());
    // Resolve the peak of width |Im z - w| around each pole.
    const double width = std::abs(z.imag() - path.height(z.real()));
    breaks.push_back(z.real() - 4.0 * width);
    breaks.push_back(z.real() + 4.0 * width);
  }
  auto integrand = [&](double t) {
    const cplx v(t, path.height(t));
    cplx den(1.0);
    for (const auto& [z, p] : poles) den *= ipow(v - z, p);
    return h(v) * cplx(1.0, path.slope(t)) / den;
  };
  const auto res = quad::integrate_line(integrand, breaks, h.scale(), line_options());
  return res.value;
}

template <class Powers>
cplx line_integral(const AnalyticFunction& h, const Powers& poles, double w) {
  return path_integral(h, poles, Path::horizontal(w));
}

/// Vertical shift used to move the integration line away from the poles.
inline double contour_shift(const AnalyticFunction& h) { return 0.5 * h.strip_radius(); }

}  // namespace detail

/// I_n(h; z) for Im z != 0. The integration line is moved to Im v = -tau sgn(Im z)
/// (tau = half the strip radius), which leaves the value unchanged and keeps
/// the integrand far from the pole.
inline cplx i_n(const AnalyticFunction& h, int n, cplx z) {
  if (n < 0) throw InvalidArgument("i_n needs n >= 0");
  if (z.imag() == 0.0) throw RealAxisInput("i_n needs Im z != 0; use the boundary routines");
  const double w = (z.imag() > 0.0 ? -1.0 : 1.0) * detail::contour_shift(h);
  const std::array<std::pair<cplx, int>, 1> poles{{{z, n + 1}}};
  return detail::line_integral(h, poles, w);
}

/// I_n(h; E + i0 sigma) by the same shifted contour. Independent of the
/// principal-value route below; used for cross-checks.
inline cplx in_boundary_contour(const AnalyticFunction& h, int n, HalfPlane sigma, double E) {
  if (n < 0) throw InvalidArgument("boundary value needs n >= 0");
  const double w = -sign(sigma) * detail::contour_shift(h);
  const std::array<std::pair<cplx, int>, 1> poles{{{cplx(E, 0.0), n + 1}}};
  return detail::line_integral(h, poles, w);
}

/// Principal value int_0^inf (h(E+u) - h(E-u)) / u du. The integrand takes its
/// limit 2 h'(E) near u = 0.
inline cplx pv_integral(const AnalyticFunction& h, double E) {
  const double s = h.scale();
  const double tiny = 1e-7 * s;
  cplx slope{};
  bool have_slope = false;
  auto integrand = [&](double u) -> cplx {
    if (u < tiny) {
      if (!have_slope) {
        slope = 2.0 * h.derivative(1, cplx(E, 0.0));
        have_slope = true;
      }
      return slope;
    }
    return (h.at_real(E + u) - h.at_real(E - u)) / u;
  };
  const auto opt = detail::line_options();
  const double split = std::max(s, 1e-3);
  const auto near = quad::integrate(integrand, 0.0, split, opt);
  const auto far = quad::integrate_right(integrand, split, s, opt);
  return near.value + far.value;
}

/// I_0^sigma(h; E) = PV + sigma i pi h(E).
inline cplx i0_boundary(const AnalyticFunction& h, HalfPlane sigma, double E) {
  return pv_integral(h, E) + cplx(0.0, sign(sigma) * std::numbers::pi) * h.at_real(E);
}

/// (1/n!) I_0^sigma(h^{(n)}; E).
inline cplx in_boundary(const AnalyticFunction& h, int n, HalfPlane sigma, double E) {
  if (n < 0) throw InvalidArgument("boundary value needs n >= 0");
  if (n == 0) return i0_boundary(h, sigma, E);
  return i0_boundary(h.derivative_function(n), sigma, E) / factorial(n);
}

/// Uniform bound on |I_0^sigma(g; E)|: ((8/pi + 2)/r^2 + 1/r + 1) ||g||_r.
inline double i0_bound(const AnalyticDensity& g) {
  const double r = g.strip_radius();
  return ((8.0 / std::numbers::pi + 2.0) / (r * r) + 1.0 / r + 1.0) * g.norm_r();
}

}  // namespace anderson
