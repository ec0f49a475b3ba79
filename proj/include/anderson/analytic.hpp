#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "anderson/errors.hpp"
#include "anderson/multi_index.hpp"

namespace anderson {

using cplx = std::complex<double>;

/// z^p for integer p by repeated squaring.
inline cplx ipow(cplx z, int p) {
  if (p < 0) return 1.0 / ipow(z, -p);
  cplx acc(1.0);
  while (p) {
    if (p & 1) acc *= z;
    z *= z;
    p >>= 1;
  }
  return acc;
}

/// n-th derivative at z from the Cauchy formula on the circle |w - z| = rho,
/// discretized by the trapezoidal rule. Node count starts at 64 and doubles
/// until successive values agree to 1e-12.
template <class F>
cplx circle_derivative(const F& f, int n, cplx z, double rho) {
  if (n < 0) throw InvalidArgument("derivative order must be >= 0");
  if (n == 0) return f(z);
  const double prefactor = factorial(n) / std::pow(rho, n);
  auto rule = [&](int nodes, double& max_abs) {
    cplx acc{};
    max_abs = 0.0;
    for (int k = 0; k < nodes; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / nodes;
      const cplx val = f(z + std::polar(rho, theta));
      max_abs = std::max(max_abs, std::abs(val));
      acc += val * std::polar(1.0, -n * theta);
    }
    return prefactor * acc / static_cast<double>(nodes);
  };
  double max_abs = 0.0;
  cplx prev = rule(64, max_abs);
  for (int nodes = 128; nodes <= 8192; nodes *= 2) {
    const cplx next = rule(nodes, max_abs);
    const double noise = 1e-14 * prefactor * max_abs;
    if (std::abs(next - prev) <= std::max(1e-12 * std::abs(next), noise)) return next;
    prev = next;
  }
  return prev;
}

/// A complex function holomorphic in the strip |Im z| < strip_radius, with an
/// upper bound on its strip norm sup_w int |f(v + i w)| dv and optional
/// closed-form derivatives. Immutable; copies share the callables.
class AnalyticFunction {
 public:
  using Eval = std::function<cplx(cplx)>;
  using Derivative = std::function<cplx(int, cplx)>;

  AnalyticFunction() = default;

  AnalyticFunction(Eval f, double strip_radius, double norm_bound, double scale = 1.0,
                   double center = 0.0, Derivative closed_form = {})
      : f_(std::move(f)),
        d_(std::move(closed_form)),
        strip_(strip_radius),
        norm_(norm_bound),
        scale_(scale),
        center_(center) {
    if (!(strip_ > 0.0)) throw InvalidArgument("strip radius must be positive");
    if (!(scale_ > 0.0)) throw InvalidArgument("scale must be positive");
  }

  bool valid() const { return static_cast<bool>(f_); }

  cplx operator()(cplx z) const {
    if (!(std::abs(z.imag()) < strip_))
      throw StripViolation("|Im z| = " + std::to_string(std::abs(z.imag())) +
                           " is not below strip radius " + std::to_string(strip_));
    return f_(z);
  }

  /// Value on the real axis (always inside the strip).
  cplx at_real(double v) const { return f_(cplx(v, 0.0)); }

  double strip_radius() const { return strip_; }
  /// Upper bound of the strip norm; +inf when unknown.
  double norm_bound() const { return norm_; }
  /// Characteristic width, used to place quadrature breakpoints.
  double scale() const { return scale_; }
  double center() const { return center_; }
  bool has_closed_form_derivatives() const { return static_cast<bool>(d_); }

  /// n-th derivative at z. Closed form when available, otherwise the circle
  /// rule with radius min(rho, half the distance to the strip edge).
  cplx derivative(int n, cplx z, double rho = std::numeric_limits<double>::infinity()) const {
    if (n < 0) throw InvalidArgument("derivative order must be >= 0");
    const double room = strip_ - std::abs(z.imag());
    if (!(room > 0.0)) throw StripViolation("derivative requested outside the strip");
    if (n == 0) return f_(z);
    if (d_) return d_(n, z);
    const double r = std::min(rho, 0.5 * room);
    return circle_derivative(f_, n, z, r);
  }

  /// Derivative forced through the circle rule; |Im z| + rho must stay in the strip.
  cplx circle(int n, cplx z, double rho) const {
    if (!(rho > 0.0) || !(std::abs(z.imag()) + rho < strip_))
      throw StripViolation("circle of radius " + std::to_string(rho) + " exits the strip");
    return circle_derivative(f_, n, z, rho);
  }

  /// The function z -> f^{(n)}(z), holomorphic in the same strip.
  AnalyticFunction derivative_function(int n) const {
    if (n == 0) return *this;
    AnalyticFunction out = *this;
    const AnalyticFunction base = *this;
    out.norm_ = std::numeric_limits<double>::infinity();
    if (d_) {
      auto d = d_;
      out.f_ = [d, n](cplx z) { return d(n, z); };
      out.d_ = [d, n](int k, cplx z) { return d(n + k, z); };
    } else {
      out.f_ = [base, n](cplx z) { return base.derivative(n, z); };
      out.d_ = {};
    }
    return out;
  }

  /// Pointwise product with another strip-analytic function. The strip is the
  /// intersection; the norm bound is ||f|| times sup|other|, supplied by the caller.
  AnalyticFunction times(const AnalyticFunction& other, double other_sup) const {
    const AnalyticFunction a = *this, b = other;
    Derivative d;
    if (d_ && other.d_) {
      // Leibniz rule with closed-form factors.
      d = [a, b](int n, cplx z) {
        cplx acc{};
        for (int k = 0; k <= n; ++k)
          acc += static_cast<double>(binomial(n, k)) * a.derivative(k, z) *
                 b.derivative(n - k, z);
        return acc;
      };
    }
    return AnalyticFunction([a, b](cplx z) { return a.f_(z) * b.f_(z); },
                            std::min(strip_, other.strip_), norm_ * other_sup, scale_,
                            center_, std::move(d));
  }

  AnalyticFunction scaled(cplx c) const {
    AnalyticFunction out = *this;
    auto f = f_;
    out.f_ = [f, c](cplx z) { return c * f(z); };
    if (d_) {
      auto d = d_;
      out.d_ = [d, c](int n, cplx z) { return c * d(n, z); };
    }
    out.norm_ = norm_ * std::abs(c);
    return out;
  }

 private:
  Eval f_;
  Derivative d_;
  double strip_ = 1.0;
  double norm_ = std::numeric_limits<double>::infinity();
  double scale_ = 1.0;
  double center_ = 0.0;
};

}  // namespace anderson
