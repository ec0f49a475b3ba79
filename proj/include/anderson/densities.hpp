#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "anderson/analytic.hpp"
#include "anderson/errors.hpp"
#include "anderson/quadrature.hpp"

namespace anderson {

enum class DensityKind { gaussian, cauchy, user };

namespace detail {

// Probabilists' Hermite polynomial He_n at complex argument.
inline cplx hermite_he(int n, cplx x) {
  cplx prev(1.0), cur = x;
  if (n == 0) return prev;
  for (int k = 1; k < n; ++k) {
    const cplx next = x * cur - static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("cannot parse '" + std::string(text) + "' as a number for " +
                      std::string(what));
  return v;
}

// key=value,key=value
inline std::map<std::string, double> parse_params(std::string_view body, std::string_view what) {
  std::map<std::string, double> out;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const auto item = body.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected key=value in " + std::string(what) + ", got '" +
                        std::string(item) + "'");
    out[std::string(item.substr(0, eq))] = parse_double(item.substr(eq + 1), what);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return out;
}

// sup over 0 <= w <= w_max of int |f(v + i w)| dv: grid search then golden refinement.
inline double numeric_strip_norm(const AnalyticFunction::Eval& f, double w_max, double scale,
                                 double center) {
  quad::Options opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-14;
  auto line = [&](double w) {
    auto integrand = [&](double v) { return cplx(std::abs(f(cplx(v, w))), 0.0); };
    return quad::integrate_line(integrand, {center - 4 * scale, center, center + 4 * scale},
                                scale, opt)
        .value.real();
  };
  constexpr int kGrid = 17;
  double best_w = 0.0, best = line(0.0);
  for (int i = 1; i < kGrid; ++i) {
    const double w = w_max * i / (kGrid - 1);
    const double v = line(w);
    if (v > best) best = v, best_w = w;
  }
  double lo = std::max(0.0, best_w - w_max / (kGrid - 1));
  double hi = std::min(w_max, best_w + w_max / (kGrid - 1));
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 40 && hi - lo > 1e-10 * std::max(1.0, w_max); ++it) {
    const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (line(a) > line(b)) hi = b; else lo = a;
  }
  return std::max(best, line(0.5 * (lo + hi)));
}

}  // namespace detail

/// Single-site probability density g, holomorphic in the strip |Im z| < r with
/// finite strip norm ||g||_r = sup_{|w|<r} int |g(v + i w)| dv (cached at
/// construction). Immutable after construction.
class AnalyticDensity {
 public:
  static AnalyticDensity gaussian(double sigma2 = 1.0, double r = 1.0) {
    if (!(sigma2 > 0.0)) throw InvalidArgument("gaussian variance must be positive");
    if (!(r > 0.0)) throw InvalidArgument("strip radius must be positive");
    const double s = std::sqrt(sigma2);
    const double norm_const = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma2);
    auto f = [s, norm_const](cplx z) {
      const cplx x = z / s;
      return norm_const * std::exp(-0.5 * x * x);
    };
    auto d = [s, f](int n, cplx z) {
      // g^{(n)}(z) = (-1/s)^n He_n(z/s) g(z)
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      return sign / std::pow(s, n) * detail::hermite_he(n, z / s) * f(z);
    };
    AnalyticDensity g;
    g.kind_ = DensityKind::gaussian;
    g.params_ = {{"sigma2", sigma2}, {"r", r}};
    g.r_ = r;
    g.second_moment_ = sigma2;
    g.norm_r_ = std::exp(r * r / (2.0 * sigma2));
    g.fn_ = AnalyticFunction(f, r, g.norm_r_, s, 0.0, d);
    return g;
  }

  static AnalyticDensity cauchy(double a = 1.0, double r = 0.5) {
    if (!(a > 0.0)) throw InvalidArgument("cauchy scale must be positive");
    if (!(r > 0.0) || !(r < a))
      throw StripViolation("cauchy density with scale a needs 0 < r < a (poles at +-ia)");
    const cplx ia(0.0, a);
    auto f = [a](cplx z) { return a / (std::numbers::pi * (z * z + a * a)); };
    auto d = [ia](int n, cplx z) {
      // g = (1/2 pi i) [ (z - ia)^{-1} - (z + ia)^{-1} ]
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      const cplx c = sign * factorial(n) / (2.0 * std::numbers::pi * cplx(0.0, 1.0));
      return c * (ipow(z - ia, -(n + 1)) - ipow(z + ia, -(n + 1)));
    };
    AnalyticDensity g;
    g.kind_ = DensityKind::cauchy;
    g.params_ = {{"a", a}, {"r", r}};
    g.r_ = r;
    g.second_moment_ = std::numeric_limits<double>::infinity();
    g.fn_ = AnalyticFunction(f, r, 1.0, a, 0.0, d);
    g.norm_r_ = detail::numeric_strip_norm(f, r, a, 0.0);
    g.fn_ = AnalyticFunction(f, r, g.norm_r_, a, 0.0, d);
    return g;
  }

  /// Density from a user-supplied analytic form. Without a supplied norm the
  /// strip norm is estimated numerically and inflated by 1%. Positivity is
  /// sampled on a 10^4-point grid and normalization checked to 1e-6.
  static AnalyticDensity user(AnalyticFunction::Eval f, double r,
                              std::optional<double> norm_r = std::nullopt, double scale = 1.0,
                              double center = 0.0) {
    if (!(r > 0.0)) throw InvalidArgument("strip radius must be positive");
    constexpr int kSamples = 10000;
    const double lo = center - 20.0 * scale, hi = center + 20.0 * scale;
    for (int i = 0; i < kSamples; ++i) {
      const double v = lo + (hi - lo) * i / (kSamples - 1);
      const cplx val = f(cplx(v, 0.0));
      if (!(val.real() >= -1e-14) || std::abs(val.imag()) > 1e-12 * (1.0 + std::abs(val)))
        throw InvalidArgument("user density is not real and non-negative at v = " +
                              std::to_string(v));
    }
    AnalyticDensity g;
    g.kind_ = DensityKind::user;
    g.params_ = {{"r", r}};
    g.r_ = r;
    g.norm_r_ = norm_r ? *norm_r : 1.01 * detail::numeric_strip_norm(f, r, scale, center);
    g.fn_ = AnalyticFunction(f, r, g.norm_r_, scale, center);
    quad::Options opt;
    opt.rel_tol = 1e-12;
    auto mass = quad::integrate_line([&](double v) { return f(cplx(v, 0.0)); },
                                     {center - 4 * scale, center, center + 4 * scale}, scale, opt);
    if (std::abs(mass.value - 1.0) > 1e-6)
      throw InvalidArgument("user density integrates to " + std::to_string(mass.value.real()));
    auto m2 = quad::integrate_line([&](double v) { return v * v * f(cplx(v, 0.0)); },
                                   {center - 4 * scale, center, center + 4 * scale}, scale, opt);
    g.second_moment_ = (m2.converged && std::isfinite(m2.value.real()))
                           ? m2.value.real()
                           : std::numeric_limits<double>::infinity();
    return g;
  }

  /// Parses `gaussian:sigma2=1.0,r=1.0` or `cauchy:a=1.0,r=0.5`.
  static AnalyticDensity parse(std::string_view spec) {
    const auto colon = spec.find(':');
    const auto name = spec.substr(0, colon);
    std::map<std::string, double> p;
    if (colon != std::string_view::npos) p = detail::parse_params(spec.substr(colon + 1), "density");
    auto take = [&](const std::string& key, double def) {
      auto it = p.find(key);
      if (it == p.end()) return def;
      const double v = it->second;
      p.erase(it);
      return v;
    };
    AnalyticDensity g;
    if (name == "gaussian") {
      const double s2 = take("sigma2", 1.0);
      g = gaussian(s2, take("r", 1.0));
    } else if (name == "cauchy") {
      const double a = take("a", 1.0);
      g = cauchy(a, take("r", 0.5));
    } else {
      throw ConfigError("unknown density '" + std::string(name) + "' (gaussian|cauchy)");
    }
    if (!p.empty()) throw ConfigError("unknown density parameter '" + p.begin()->first + "'");
    return g;
  }

  std::string spec() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case DensityKind::gaussian:
        os << "gaussian:sigma2=" << params_.at("sigma2") << ",r=" << r_;
        break;
      case DensityKind::cauchy:
        os << "cauchy:a=" << params_.at("a") << ",r=" << r_;
        break;
      case DensityKind::user:
        os << "user:r=" << r_;
        break;
    }
    return os.str();
  }

  DensityKind kind() const { return kind_; }
  double param(const std::string& key) const { return params_.at(key); }
  double strip_radius() const { return r_; }
  /// Cached ||g||_r.
  double norm_r() const { return norm_r_; }
  double second_moment() const { return second_moment_; }
  bool finite_second_moment() const { return std::isfinite(second_moment_); }
  const AnalyticFunction& function() const { return fn_; }
  operator const AnalyticFunction&() const { return fn_; }
  double scale() const { return fn_.scale(); }

  /// Analytic continuation g(z); StripViolation when |Im z| >= r.
  cplx eval(cplx z) const { return fn_(z); }

  /// g^{(n)}(z); closed form for built-ins, else the circle rule of radius rho.
  cplx deriv(int n, cplx z, double rho) const {
    if (n < 0) throw InvalidArgument("derivative order must be >= 0");
    if (!(rho > 0.0) || !(std::abs(z.imag()) + rho < r_))
      throw StripViolation("derivative circle of radius " + std::to_string(rho) +
                           " exits the strip");
    if (n == 0) return fn_(z);
    if (fn_.has_closed_form_derivatives()) return fn_.derivative(n, z);
    return fn_.circle(n, z, rho);
  }

  /// ||g||_{r'} for 0 < r' <= r.
  double norm(double r_prime) const {
    if (!(r_prime > 0.0) || r_prime > r_)
      throw StripViolation("norm radius must lie in (0, r]");
    if (r_prime == r_) return norm_r_;
    if (kind_ == DensityKind::gaussian)
      return std::exp(r_prime * r_prime / (2.0 * params_.at("sigma2")));
    const double est = detail::numeric_strip_norm(
        [f = fn_](cplx z) { return f(z); }, r_prime, fn_.scale(), fn_.center());
    return kind_ == DensityKind::user ? std::min(1.01 * est, norm_r_) : est;
  }

  /// n! ||g||_r / rho^n, the bound on ||g^{(n)}||_{r - rho}.
  double deriv_sup_bound(int n, double rho) const {
    if (n < 0) throw InvalidArgument("derivative order must be >= 0");
    if (!(rho > 0.0) || !(rho < r_)) throw StripViolation("need 0 < rho < r");
    return factorial(n) * norm_r_ / std::pow(rho, n);
  }

  /// One draw from g.
  template <class Engine>
  double sample(Engine& eng) const {
    switch (kind_) {
      case DensityKind::gaussian:
        return std::normal_distribution<double>(0.0, std::sqrt(params_.at("sigma2")))(eng);
      case DensityKind::cauchy:
        return std::cauchy_distribution<double>(0.0, params_.at("a"))(eng);
      case DensityKind::user:
        break;
    }
    return inverse_cdf(std::uniform_real_distribution<double>(0.0, 1.0)(eng));
  }

 private:
  double inverse_cdf(double u) const {
    std::call_once(*cdf_once_, [this] { build_cdf(); });
    const auto& xs = *cdf_x_;
    const auto& cs = *cdf_c_;
    auto it = std::lower_bound(cs.begin(), cs.end(), u);
    if (it == cs.begin()) return xs.front();
    if (it == cs.end()) return xs.back();
    const auto i = static_cast<std::size_t>(it - cs.begin());
    const double t = (u - cs[i - 1]) / std::max(cs[i] - cs[i - 1], 1e-300);
    return xs[i - 1] + t * (xs[i] - xs[i - 1]);
  }

  void build_cdf() const {
    constexpr int kPoints = 1 << 14;
    const double lo = fn_.center() - 30.0 * fn_.scale(), hi = fn_.center() + 30.0 * fn_.scale();
    std::vector<double> xs(kPoints), cs(kPoints);
    double acc = 0.0;
    double prev = std::max(0.0, fn_.at_real(lo).real());
    for (int i = 0; i < kPoints; ++i) {
      xs[i] = lo + (hi - lo) * i / (kPoints - 1);
      const double cur = std::max(0.0, fn_.at_real(xs[i]).real());
      if (i > 0) acc += 0.5 * (prev + cur) * (xs[i] - xs[i - 1]);
      cs[i] = acc;
      prev = cur;
    }
    for (double& c : cs) c /= acc;
    *cdf_x_ = std::move(xs);
    *cdf_c_ = std::move(cs);
  }

  DensityKind kind_ = DensityKind::gaussian;
  std::map<std::string, double> params_;
  double r_ = 1.0;
  double norm_r_ = 1.0;
  double second_moment_ = 1.0;
  AnalyticFunction fn_;
  std::shared_ptr<std::once_flag> cdf_once_ = std::make_shared<std::once_flag>();
  std::shared_ptr<std::vector<double>> cdf_x_ = std::make_shared<std::vector<double>>();
  std::shared_ptr<std::vector<double>> cdf_c_ = std::make_shared<std::vector<double>>();
};

}  // namespace anderson
