#pragma once

// N-point Cauchy integrals J_n(h; z) = int h(v) prod_k (v - z_k)^{-(n_k+1)} dv,
// their boundary values and the simplex representation of the regular part.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anderson/analytic.hpp"
#include "anderson/cauchy1.hpp"
#include "anderson/errors.hpp"
#include "anderson/multi_index.hpp"
#include "anderson/quadrature.hpp"

namespace anderson {

using SignVector = std::vector<HalfPlane>;

/// Real energies E_1..E_N with the minimal pairwise gap.
class EnergyVector {
 public:
  EnergyVector() = default;
  EnergyVector(std::initializer_list<double> e) : e_(e) {}
  explicit EnergyVector(std::vector<double> e) : e_(std::move(e)) {}

  std::size_t size() const { return e_.size(); }
  double operator[](std::size_t i) const { return e_[i]; }
  const std::vector<double>& entries() const { return e_; }

  /// min_{i != j} |E_i - E_j|; +inf for a single energy.
  double min_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < e_.size(); ++i)
      for (std::size_t j = i + 1; j < e_.size(); ++j) gap = std::min(gap, std::abs(e_[i] - e_[j]));
    return gap;
  }
  bool distinct() const { return min_gap() > 0.0; }

 private:
  std::vector<double> e_;
};

namespace detail {

inline void check_sizes(const MultiIndex& n, std::size_t points) {
  if (n.size() == 0) throw InvalidArgument("multi-index must have length >= 1");
  if (n.size() != points)
    throw InvalidArgument("multi-index length " + std::to_string(n.size()) +
                          " does not match " + std::to_string(points) + " points");
}

/// sum_i sum_{|m| = n_i} prod_{j != i} (-1)^{m_j} C(m_j + n_j, n_j) (x_i - x_j)^{-(n_j+m_j+1)}
///   * base(i, m_i)
/// Partial-fraction assembly shared by the off-axis and boundary routes.
template <class Base>
cplx partial_fraction_sum(const MultiIndex& n, std::span<const cplx> x, Base&& base) {
  const std::size_t N = x.size();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      if (x[i] == x[j])
        throw CoincidentPoints("points " + std::to_string(i) + " and " + std::to_string(j) +
                               " coincide");
  cplx total{};
  for (std::size_t i = 0; i < N; ++i) {
    for_each_composition(n[i], N, [&](const std::vector<int>& m) {
      cplx term(1.0);
      for (std::size_t j = 0; j < N; ++j) {
        if (j == i) continue;
        const double c = static_cast<double>(binomial(m[j] + n[j], n[j])) * ((m[j] % 2) ? -1.0 : 1.0);
        term *= c * ipow(x[i] - x[j], -(n[j] + m[j] + 1));
      }
      total += term * base(i, m[i]);
    });
  }
  return total;
}

inline std::vector<cplx> as_complex(const EnergyVector& E) {
  std::vector<cplx> x;
  x.reserve(E.size());
  for (double e : E.entries()) x.emplace_back(e, 0.0);
  return x;
}

/// s^n / n! for a point s of the simplex.
inline double simplex_weight(const MultiIndex& n, std::span<const double> s) {
  double w = 1.0;
  for (std::size_t k = 0; k < s.size(); ++k) w *= std::pow(s[k], n[k]);
  return w / n.factorial();
}

/// Memo of (1/m!) I(h^{(m)}; x_i) for the partial-fraction routes.
class BaseCache {
 public:
  explicit BaseCache(std::size_t points) : values_(points) {}
  template <class Compute>
  cplx get(std::size_t i, int m, Compute&& compute) {
    auto& row = values_[i];
    if (row.size() <= static_cast<std::size_t>(m)) row.resize(m + 1, {cplx{}, false});
    if (!row[m].second) row[m] = {compute(), true};
    return row[m].first;
  }

 private:
  std::vector<std::vector<std::pair<cplx, bool>>> values_;
};

// Twice the signed area of (a, b, c).
inline double cross(cplx a, cplx b, cplx c) {
  return (b.real() - a.real()) * (c.imag() - a.imag()) - (b.imag() - a.imag()) * (c.real() - a.real());
}

/// Convex hull of points in the plane (counter-clockwise, monotone chain).
inline std::vector<cplx> convex_hull(std::vector<cplx> p) {
  std::sort(p.begin(), p.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  std::vector<cplx> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

/// Whether v lies in the closed convex hull of pts, with tolerance tol.
inline bool in_convex_hull(const std::vector<cplx>& pts, cplx v, double tol = 1e-12) {
  const auto h = convex_hull(pts);
  if (h.size() == 1) return std::abs(v - h[0]) <= tol;
  if (h.size() == 2) {
    const cplx d = h[1] - h[0];
    const double t = std::real((v - h[0]) * std::conj(d)) / std::norm(d);
    return t >= -tol && t <= 1.0 + tol && std::abs(cross(h[0], h[1], v)) <= tol * std::abs(d);
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    const cplx a = h[i], b = h[(i + 1) % h.size()];
    if (cross(a, b, v) < -tol * std::abs(b - a)) return false;
  }
  return true;
}

}  // namespace detail

namespace detail {

/// Path passing below every upper pole and above every lower one: height
/// -tau sgn(Im z) at each pole, switching sides in the middle third between
/// neighbouring poles of opposite sign. Empty when two such poles share a
/// real part.
inline std::optional<Path> separating_path(std::vector<cplx> z, double tau) {
  std::sort(z.begin(), z.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  Path path;
  path.x = {z.front().real()};
  path.w = {z.front().imag() > 0.0 ? -tau : tau};
  for (std::size_t k = 1; k < z.size(); ++k) {
    const double wk = z[k].imag() > 0.0 ? -tau : tau;
    if (wk == path.w.back()) continue;
    const double a = z[k - 1].real(), b = z[k].real();
    if (!(b > a)) return std::nullopt;
    path.x.push_back(a + (b - a) / 3.0);
    path.w.push_back(path.w.back());
    path.x.push_back(b - (b - a) / 3.0);
    path.w.push_back(wk);
  }
  return path;
}

}  // namespace detail

/// J_n(h; z) by direct quadrature. The integration path is deformed away from
/// the poles: below all of them when they lie in the upper half plane, above
/// when lower, and a separating polyline when the half planes are mixed.
inline cplx j_n(const AnalyticFunction& h, const MultiIndex& n, const std::vector<cplx>& z) {
  detail::check_sizes(n, z.size());
  std::vector<std::pair<cplx, int>> poles;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (z[k].imag() == 0.0) throw RealAxisInput("j_n needs Im z_k != 0 for every k");
    poles.emplace_back(z[k], n[k] + 1);
  }
  const auto path = detail::separating_path(z, detail::contour_shift(h));
  return detail::path_integral(h, poles, path ? *path : detail::Path::horizontal(0.0));
}

/// J_n(h; z) assembled from one-point transforms through partial fractions.
inline cplx j_partial_fraction(const AnalyticFunction& h, const MultiIndex& n,
                               const std::vector<cplx>& z) {
  detail::check_sizes(n, z.size());
  for (const cplx& zk : z)
    if (zk.imag() == 0.0) throw RealAxisInput("j_partial_fraction needs off-axis points");
  detail::BaseCache cache(z.size());
  // (1/m!) I_0(h^{(m)}; z) equals I_m(h; z).
  return detail::partial_fraction_sum(n, z, [&](std::size_t i, int m) {
    return cache.get(i, m, [&] { return i_n(h, m, z[i]); });
  });
}

/// Boundary value J_n^sigma(h; E) from one-point boundary values and gap powers.
inline cplx j_sigma_direct(const AnalyticFunction& h, const MultiIndex& n, const SignVector& sigma,
                           const EnergyVector& E) {
  detail::check_sizes(n, E.size());
  if (sigma.size() != E.size()) throw InvalidArgument("sign vector length mismatch");
  if (E.size() > 1 && !E.distinct()) throw CoincidentPoints("energies must be distinct");
  const auto x = detail::as_complex(E);
  detail::BaseCache cache(E.size());
  return detail::partial_fraction_sum(n, x, [&](std::size_t i, int m) {
    return cache.get(i, m, [&] { return in_boundary(h, m, sigma[i], E[i]); });
  });
}

/// Simplex integral of (s^n/n!) f(sum_k s_k E_k), where f = h^{(N+|n|-1)}
/// is composed with `inner`.
template <class Inner>
cplx simplex_derivative_integral(const AnalyticFunction& h, const MultiIndex& n,
                                 const EnergyVector& E, Inner&& inner) {
  detail::check_sizes(n, E.size());
  const int K = static_cast<int>(E.size()) + n.total() - 1;
  const AnalyticFunction hk = h.derivative_function(K);
  auto integrand = [&](std::span<const double> s) {
    double x = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) x += s[k] * E[k];
    return detail::simplex_weight(n, s) * inner(hk, x);
  };
  return quad::integrate_simplex(E.size(), integrand, 1e-11, 16);
}

/// Regular part: simplex integral of (s^n/n!) PV(h^{(N+|n|-1)}; sum s_k E_k).
/// Defined at coincident energies.
inline cplx j_reg(const AnalyticFunction& h, const MultiIndex& n, const EnergyVector& E) {
  return simplex_derivative_integral(
      h, n, E, [](const AnalyticFunction& hk, double x) { return pv_integral(hk, x); });
}

/// R_n(h; E): simplex integral of (s^n/n!) h^{(N+|n|-1)}(sum s_k E_k), the
/// confluent divided difference of h. Defined at coincident energies.
inline cplx residue_part(const AnalyticFunction& h, const MultiIndex& n, const EnergyVector& E) {
  return simplex_derivative_integral(
      h, n, E, [](const AnalyticFunction& hk, double x) { return hk.at_real(x); });
}

/// i pi sum_k sigma_k sum_{|m|=n_k} [prod_{j != k} (-1)^{m_j} C(m_j+n_j, n_j)
///   (E_k - E_j)^{-(n_j+m_j+1)}] h^{(m_k)}(E_k) / m_k!
inline cplx singular_part(const AnalyticFunction& h, const MultiIndex& n, const SignVector& sigma,
                          const EnergyVector& E) {
  detail::check_sizes(n, E.size());
  if (sigma.size() != E.size()) throw InvalidArgument("sign vector length mismatch");
  if (E.size() > 1 && !E.distinct())
    throw CoincidentPoints("singular part needs distinct energies");
  const auto x = detail::as_complex(E);
  return detail::partial_fraction_sum(n, x, [&](std::size_t i, int m) {
    const cplx hm = h.derivative(m, cplx(E[i], 0.0));
    return cplx(0.0, sign(sigma[i]) * std::numbers::pi) * hm / factorial(m);
  });
}

/// Boundary value as regular part plus singular part.
inline cplx j_sigma_decomposed(const AnalyticFunction& h, const MultiIndex& n,
                               const SignVector& sigma, const EnergyVector& E) {
  const cplx sing = singular_part(h, n, sigma, E);
  return j_reg(h, n, E) + sing;
}

/// Boundary value when every sign equals s: J_reg + s i pi R_n. Valid at
/// coincident energies.
inline cplx j_sigma_equal(const AnalyticFunction& h, const MultiIndex& n, HalfPlane s,
                          const EnergyVector& E) {
  return j_reg(h, n, E) + cplx(0.0, sign(s) * std::numbers::pi) * residue_part(h, n, E);
}

struct IdentitySides {
  cplx lhs{};
  cplx rhs{};
};

/// Both sides of
///   prod_k (v - z_k)^{-(n_k+1)}
///     = ((N+|n|-1)!/n!) int_simplex s^n (v - sum_k s_k z_k)^{-(N+|n|)} ds
/// for v outside the convex hull of the z_k.
inline IdentitySides simplex_pole_product(const MultiIndex& n, const std::vector<cplx>& z, cplx v) {
  detail::check_sizes(n, z.size());
  if (detail::in_convex_hull(z, v))
    throw ConvexHullViolation("v lies in the convex hull of the poles");
  IdentitySides out;
  out.lhs = 1.0;
  for (std::size_t k = 0; k < z.size(); ++k) out.lhs *= ipow(v - z[k], -(n[k] + 1));
  const int K = static_cast<int>(z.size()) + n.total() - 1;
  const double kfact = factorial(K);
  auto integrand = [&](std::span<const double> s) {
    cplx w{};
    for (std::size_t k = 0; k < s.size(); ++k) w += s[k] * z[k];
    return kfact * detail::simplex_weight(n, s) * ipow(v - w, -(K + 1));
  };
  out.rhs = quad::integrate_simplex(z.size(), integrand, 1e-13);
  return out;
}

}  // namespace anderson
