#pragma once

// Adaptive Gauss-Kronrod integration of complex-valued integrands on the real
// line, plus tensor Gauss-Legendre rules on cubes and simplices.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

#include "anderson/errors.hpp"

namespace anderson {

using cplx = std::complex<double>;

namespace quad {

struct Options {
  double abs_tol = 1e-15;
  double rel_tol = 1e-13;
  std::size_t max_intervals = 4000;
};

struct Result {
  cplx value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

// QUADPACK qk21 abscissae/weights; Gauss nodes sit at odd positions.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208977477270, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

enum class SegmentKind { plain, right_tail, left_tail };

struct Segment {
  SegmentKind kind = SegmentKind::plain;
  double origin = 0.0;  // tail anchor
  double scale = 1.0;   // tail stretch
  double a = 0.0;
  double b = 0.0;
  cplx value{};
  double error = 0.0;
};

struct ByError {
  bool operator()(const Segment& x, const Segment& y) const {
    return x.error < y.error;
  }
};

template <class F>
cplx eval_mapped(const F& f, const Segment& s, double t) {
  switch (s.kind) {
    case SegmentKind::plain:
      return f(t);
    case SegmentKind::right_tail: {
      // v = origin + scale * t / (1 - t), t in [0, 1)
      const double om = 1.0 - t;
      return f(s.origin + s.scale * t / om) * (s.scale / (om * om));
    }
    case SegmentKind::left_tail: {
      const double om = 1.0 - t;
      return f(s.origin - s.scale * t / om) * (s.scale / (om * om));
    }
  }
  return {};
}

template <class F>
void apply_gk21(const F& f, Segment& s) {
  const double center = 0.5 * (s.a + s.b);
  const double half = 0.5 * (s.b - s.a);
  const cplx fc = eval_mapped(f, s, center);
  cplx kronrod = fc * kWgk[10];
  cplx gauss{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const cplx f1 = eval_mapped(f, s, center - dx);
    const cplx f2 = eval_mapped(f, s, center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  s.value = kronrod * half;
  s.error = std::abs((kronrod - gauss) * half);
}

template <class F>
Result run_adaptive(const F& f, std::vector<Segment> initial, const Options& opt) {
  std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
  Result res;
  for (auto& s : initial) {
    apply_gk21(f, s);
    res.evaluations += 21;
    heap.push(s);
  }
  auto totals = [&heap]() {
    // priority_queue has no iteration; the container is protected, so copy.
    auto copy = heap;
    cplx v{};
    double e = 0.0;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    return std::pair{v, e};
  };
  cplx total{};
  double err = 0.0;
  std::tie(total, err) = totals();
  while (heap.size() < opt.max_intervals) {
    if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
      res.converged = true;
      break;
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);  // interval no longer splittable
      break;
    }
    Segment left = worst, right = worst;
    left.b = mid;
    right.a = mid;
    apply_gk21(f, left);
    apply_gk21(f, right);
    res.evaluations += 42;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    // Re-sum periodically so running totals do not drift.
    if (heap.size() % 64 == 0) std::tie(total, err) = totals();
  }
  std::tie(total, err) = totals();
  if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) res.converged = true;
  res.value = total;
  res.error = err;
  return res;
}

}  // namespace detail

/// Integral of f over [a, b] (finite).
template <class F>
Result integrate(const F& f, double a, double b, const Options& opt = {}) {
  detail::Segment s;
  s.a = a;
  s.b = b;
  return detail::run_adaptive(f, {s}, opt);
}

/// Integral of f over [a, +inf). `scale` is the decay length of f.
template <class F>
Result integrate_right(const F& f, double a, double scale, const Options& opt = {}) {
  detail::Segment s{detail::SegmentKind::right_tail, a, scale, 0.0, 1.0};
  return detail::run_adaptive(f, {s}, opt);
}

/// Integral of f over the real line. Sorted `breaks` split the line into
/// finite pieces; the two outer pieces are mapped tails of length `scale`.
template <class F>
Result integrate_line(const F& f, std::vector<double> breaks, double scale,
                      const Options& opt = {}) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.empty()) breaks.push_back(0.0);
  std::vector<detail::Segment> segs;
  segs.push_back({detail::SegmentKind::left_tail, breaks.front(), scale, 0.0, 1.0});
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    detail::Segment s;
    s.a = breaks[i];
    s.b = breaks[i + 1];
    segs.push_back(s);
  }
  segs.push_back({detail::SegmentKind::right_tail, breaks.back(), scale, 0.0, 1.0});
  return detail::run_adaptive(f, std::move(segs), opt);
}

/// Gauss-Legendre rule of the given order mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline const GaussRule& gauss_legendre_unit(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  if (order < 1) throw InvalidArgument("Gauss-Legendre order must be >= 1");
  // Boost returns the non-negative zeros of P_order.
  const auto zeros = boost::math::legendre_p_zeros<double>(order);
  GaussRule rule;
  auto push = [&](double x) {
    const double dp = boost::math::legendre_p_prime(order, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(0.5 * (1.0 + x));
    rule.weights.push_back(0.5 * w);
  };
  for (double x : zeros) {
    if (x == 0.0) {
      push(0.0);
    } else {
      push(x);
      push(-x);
    }
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

/// Tensor Gauss-Legendre integral over the standard simplex
/// {s in [0,1]^N : |s| = 1} with measure ds_1...ds_{N-1}.
/// The map s_k = t_k * prod_{j<k}(1 - t_j) sends [0,1]^{N-1} onto it.
template <class F>
cplx integrate_simplex_fixed(std::size_t n_points, const F& f, int order) {
  std::vector<double> s(n_points, 0.0);
  if (n_points == 1) {
    s[0] = 1.0;
    return f(std::span<const double>(s));
  }
  const GaussRule& rule = gauss_legendre_unit(order);
  const std::size_t dims = n_points - 1;
  std::vector<std::size_t> idx(dims, 0);
  cplx total{};
  while (true) {
    double remaining = 1.0;
    double jac = 1.0;
    double w = 1.0;
    for (std::size_t k = 0; k < dims; ++k) {
      const double t = rule.nodes[idx[k]];
      w *= rule.weights[idx[k]];
      s[k] = t * remaining;
      jac *= remaining;
      remaining *= (1.0 - t);
    }
    s[dims] = remaining;
    total += w * jac * f(std::span<const double>(s));
    std::size_t k = 0;
    while (k < dims && ++idx[k] == rule.nodes.size()) idx[k++] = 0;
    if (k == dims) break;
  }
  return total;
}

/// Simplex integral with the order doubled from `start_order` until two
/// successive values agree to `tol` (relative to max(1, |value|)).
template <class F>
cplx integrate_simplex(std::size_t n_points, const F& f, double tol = 1e-10,
                       int start_order = 32, int max_order = 256) {
  cplx prev = integrate_simplex_fixed(n_points, f, start_order);
  if (n_points == 1) return prev;
  for (int order = 2 * start_order; order <= max_order; order *= 2) {
    const cplx next = integrate_simplex_fixed(n_points, f, order);
    if (std::abs(next - prev) <= tol * std::max(1.0, std::abs(next))) return next;
    prev = next;
    // Tensor grids grow as order^(N-1); stop doubling in high dimension.
    if (n_points > 3 && order >= 64) return next;
  }
  return prev;
}

}  // namespace quad
}  // namespace anderson
