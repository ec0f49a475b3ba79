#pragma once

// Truncated random-walk series for the averaged products
//   < 0 | (H - z_1)^{-1} A_1 (H - z_2)^{-1} A_2 ... A_N | 0 >
// of H = lambda Delta + V, their boundary values and tail bounds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anderson/cauchy1.hpp"
#include "anderson/cauchyN.hpp"
#include "anderson/covariant.hpp"
#include "anderson/densities.hpp"
#include "anderson/errors.hpp"
#include "anderson/parallel.hpp"
#include "anderson/walks.hpp"

namespace anderson {

enum class BoundaryRoute { decomposed, direct };

struct ExpansionConfig {
  AnalyticDensity density = AnalyticDensity::gaussian();
  int d = 1;
  double lambda = 0.0;
  /// One polynomial per resolvent; empty means identities (N taken from the energies).
  std::vector<CovariantPolynomial> observables;
  int order = 8;
  /// Minimal energy gap Delta of the domain; 0 means the gap of the energies.
  double gap = 0.0;
  /// Bound parameter delta in (0, Delta/2); 0 means Delta/4.
  double delta = 0.0;
  /// Throw RadiusViolation instead of reporting an infinite tail bound.
  bool certified = false;
  BoundaryRoute route = BoundaryRoute::decomposed;
  int threads = 1;
  std::uint64_t walk_budget = kDefaultWalkBudget;
};

struct SeriesValue {
  cplx value{};
  int order = 0;
  double tail_bound = std::numeric_limits<double>::infinity();
  /// |partial sum through order k| for k = 0..order.
  std::vector<double> ratio_data;
  std::vector<cplx> partial_sums;
  /// tail_bounds[k] bounds |full series - partial sum through k|.
  std::vector<double> tail_bounds;
  double lambda = 0.0;
  std::vector<cplx> energies;
  std::vector<int> sigmas;
};

inline nlohmann::json to_json(const SeriesValue& s) {
  nlohmann::json e = nlohmann::json::array();
  for (const cplx& z : s.energies) e.push_back({z.real(), z.imag()});
  const double tb = s.tail_bound;
  return {{"value_re", s.value.real()},
          {"value_im", s.value.imag()},
          {"order", s.order},
          {"tail_bound", std::isfinite(tb) ? nlohmann::json(tb) : nlohmann::json("inf")},
          {"lambda", s.lambda},
          {"energies", e},
          {"sigmas", s.sigmas}};
}

/// C = 8/pi + 2 + r + r^2.
inline double strip_constant(double r) { return 8.0 / std::numbers::pi + 2.0 + r + r * r; }

/// a_0 = 4 d N C_1 e ||g||_r with C_1 = 4C/r.
inline double radius_a0(int d, int N, const AnalyticDensity& g) {
  const double r = g.strip_radius();
  const double c1 = 4.0 * strip_constant(r) / r;
  return 4.0 * d * N * c1 * std::numbers::e * g.norm_r();
}

/// lambda_{r,eps} = eps^3 / (2 d e^3 r C ||g||_r).
inline double lambda_r_eps(int d, const AnalyticDensity& g, double eps) {
  const double r = g.strip_radius();
  return eps * eps * eps / (2.0 * d * std::pow(std::numbers::e, 3) * r * strip_constant(r) * g.norm_r());
}

/// prod_{j=1}^{2n} sin((t/2)(E_j - E_{j-1})) / (E_j - E_{j-1}), E_0 = E_{2n}.
inline double moment_kernel(double t, const std::vector<double>& E) {
  if (t < 0.0) throw InvalidArgument("moment kernel needs t >= 0");
  if (E.empty() || E.size() % 2) throw InvalidArgument("moment kernel needs an even number of energies");
  double p = 1.0;
  for (std::size_t j = 0; j < E.size(); ++j) {
    const double gap = E[j] - E[(j + E.size() - 1) % E.size()];
    p *= gap == 0.0 ? 0.5 * t : std::sin(0.5 * t * gap) / gap;
  }
  return p;
}

namespace detail {

/// sum_{n > n0} C(n+N-1, N-1) rho^n; +inf when rho >= 1.
inline double binomial_geometric_tail(int N, double rho, int n0) {
  if (!(rho < 1.0)) return std::numeric_limits<double>::infinity();
  if (rho == 0.0) return 0.0;
  // term_n = C(n+N-1, N-1) rho^n, built in logs to avoid overflow
  auto log_term = [&](int n) {
    return std::lgamma(n + N) - std::lgamma(N) - std::lgamma(n + 1) + n * std::log(rho);
  };
  double acc = 0.0;
  for (int n = n0 + 1;; ++n) {
    const double t = std::exp(log_term(n));
    acc += t;
    // ratio of consecutive terms, decreasing in n
    const double q = rho * (n + N) / (n + 1.0);
    if (q < 1.0 && t * q / (1.0 - q) <= 1e-16 * acc) return acc + t * q / (1.0 - q);
    if (t == 0.0 || n > n0 + 100000) return acc;
  }
}

/// Visit vector of one site plus the coefficient ids attached there (by walk index).
struct SiteKey {
  std::vector<int> visits;
  std::vector<std::pair<int, std::string>> attached;
  auto operator<=>(const SiteKey&) const = default;
};

using FamilyKey = std::vector<SiteKey>;

/// For each order 0..n_max: sum over families and monomial choices of the
/// weight, grouped by the multiset of site keys.
struct Aggregate {
  std::vector<std::map<FamilyKey, cplx>> by_order;
  std::map<SiteKey, std::size_t> sites;  // distinct site keys, index into values
};

inline Aggregate aggregate(const ExpansionConfig& cfg, std::size_t N) {
  const auto& obs = cfg.observables;
  Aggregate out;
  out.by_order.resize(cfg.order + 1);
  std::vector<std::size_t> pick(N, 0);
  // every choice of one monomial per polynomial
  for (;;) {
    cplx w(1.0);
    std::vector<CovariantMonomial> mono;
    std::vector<Site> offsets;
    for (std::size_t i = 0; i < N; ++i) {
      w *= obs[i].terms[pick[i]].first;
      mono.push_back(obs[i].terms[pick[i]].second);
      offsets.push_back(mono.back().u0);
    }
    for (int n = 0; n <= cfg.order; ++n) {
      auto& bucket = out.by_order[n];
      enumerate_npaths(
          cfg.d, offsets, n,
          [&](const NPathFamily& fam) {
            std::map<Site, SiteKey> keys;
            for (std::size_t i = 0; i < N; ++i)
              for (const Site& s : fam.walks[i].sites) {
                auto& k = keys[s];
                if (k.visits.empty()) k.visits.assign(N, 0);
                ++k.visits[i];
              }
            for (std::size_t i = 0; i < N; ++i)
              for (const auto& [off, id] : mono[i].coefficients) {
                auto& k = keys[fam.walks[i].end() + off];
                if (k.visits.empty()) k.visits.assign(N, 0);
                k.attached.emplace_back(static_cast<int>(i), id);
              }
            FamilyKey fk;
            fk.reserve(keys.size());
            for (auto& [s, k] : keys) {
              std::sort(k.attached.begin(), k.attached.end());
              fk.push_back(std::move(k));
            }
            std::sort(fk.begin(), fk.end());
            bucket[fk] += w;
          },
          cfg.walk_budget);
    }
    std::size_t i = 0;
    while (i < N && ++pick[i] == obs[i].terms.size()) pick[i++] = 0;
    if (i == N) break;
  }
  for (const auto& bucket : out.by_order)
    for (const auto& [fk, w] : bucket)
      for (const SiteKey& k : fk) out.sites.emplace(k, 0);
  std::size_t idx = 0;
  for (auto& [k, v] : out.sites) v = idx++;
  return out;
}

/// Evaluates every distinct site factor, then sums the orders in key order.
template <class Factor>
SeriesValue sum_series(const ExpansionConfig& cfg, std::size_t N, Factor&& factor) {
  const Aggregate agg = aggregate(cfg, N);
  std::vector<const SiteKey*> keys(agg.sites.size());
  for (const auto& [k, i] : agg.sites) keys[i] = &k;
  std::vector<cplx> values(keys.size());
  parallel_for(keys.size(), cfg.threads, [&](std::size_t i) { values[i] = factor(*keys[i]); });

  SeriesValue out;
  out.order = cfg.order;
  out.lambda = cfg.lambda;
  cplx acc{};
  for (int n = 0; n <= cfg.order; ++n) {
    cplx term{};
    for (const auto& [fk, w] : agg.by_order[n]) {
      cplx p = w;
      for (const SiteKey& k : fk) p *= values[agg.sites.at(k)];
      term += p;
    }
    acc += std::pow(-cfg.lambda, n) * term;
    out.partial_sums.push_back(acc);
    out.ratio_data.push_back(std::abs(acc));
  }
  out.value = acc;
  return out;
}

/// Coefficient ids attached at a site, and the site density g times them.
inline AnalyticFunction key_density(const AnalyticDensity& g, const SiteKey& k) {
  std::vector<std::string> ids;
  for (const auto& [i, id] : k.attached) ids.push_back(id);
  return site_density(g, ids);
}

/// int h(v) dv over the real line.
inline cplx plain_integral(const AnalyticFunction& h) {
  const std::vector<double> breaks = {h.center() - 4.0 * h.scale(), h.center(), h.center() + 4.0 * h.scale()};
  return quad::integrate_line([&](double v) { return h.at_real(v); }, breaks, h.scale(), line_options()).value;
}

inline void check_observables(ExpansionConfig& cfg, std::size_t N) {
  if (N == 0) throw InvalidArgument("at least one energy is required");
  if (cfg.observables.empty()) cfg.observables.assign(N, identity_observable());
  if (cfg.observables.size() != N)
    throw InvalidArgument("need one observable per energy, got " + std::to_string(cfg.observables.size()) +
                          " for " + std::to_string(N));
  for (const auto& p : cfg.observables)
    if (p.terms.empty()) throw InvalidArgument("observable with no terms");
  if (cfg.order < 0) throw InvalidArgument("order must be >= 0");
  check_dim(cfg.d);
  if (!std::isfinite(cfg.lambda)) throw InvalidArgument("lambda must be finite");
  if (!cfg.density.finite_second_moment())
    throw InvalidArgument("the expansion needs a density with finite second moment");
}

inline double observable_prefactor(const ExpansionConfig& cfg) {
  double p = 1.0;
  for (const auto& o : cfg.observables) p *= o.weight_bound(cfg.density.strip_radius());
  return p;
}

}  // namespace detail

/// Off-axis series. Tail bound P eta^{-N} sum_{n > n_max} C(n+N-1, N-1)
/// (2d|lambda|/eta)^n with eta = min |Im z_k| and P the observable weight bound.
inline SeriesValue green_series(ExpansionConfig cfg, const std::vector<cplx>& z) {
  const std::size_t N = z.size();
  detail::check_observables(cfg, N);
  double eta = std::numeric_limits<double>::infinity();
  for (const cplx& zk : z) {
    if (zk.imag() == 0.0) throw RealAxisInput("green_series needs Im z_k != 0");
    eta = std::min(eta, std::abs(zk.imag()));
  }
  const AnalyticDensity& g = cfg.density;
  auto factor = [&](const detail::SiteKey& k) -> cplx {
    const AnalyticFunction h = detail::key_density(g, k);
    // merge equal points: (v - z)^{-a} (v - z)^{-b} = (v - z)^{-(a+b)}
    std::vector<cplx> pts;
    std::vector<int> pow;
    for (std::size_t i = 0; i < N; ++i) {
      if (!k.visits[i]) continue;
      const auto it = std::find(pts.begin(), pts.end(), z[i]);
      if (it == pts.end()) {
        pts.push_back(z[i]);
        pow.push_back(k.visits[i]);
      } else {
        pow[it - pts.begin()] += k.visits[i];
      }
    }
    if (pts.empty()) return detail::plain_integral(h);
    if (pts.size() == 1) return i_n(h, pow[0] - 1, pts[0]);
    std::vector<int> n;
    for (int p : pow) n.push_back(p - 1);
    return j_partial_fraction(h, MultiIndex(n), pts);
  };
  SeriesValue out = detail::sum_series(cfg, N, factor);
  const double P = detail::observable_prefactor(cfg);
  const double rho = 2.0 * cfg.d * std::abs(cfg.lambda) / eta;
  for (int n = 0; n <= cfg.order; ++n)
    out.tail_bounds.push_back(P * std::pow(eta, -static_cast<double>(N)) *
                              detail::binomial_geometric_tail(static_cast<int>(N), rho, n));
  out.tail_bound = out.tail_bounds.back();
  out.energies = z;
  return out;
}

/// Tail bound of the one-point boundary series: K rho^{n+1} / (1 - rho) with
/// K = e^2 C ||g||_r / r and rho = 2 d |lambda| e^3 C ||g||_r / r^2.
inline double dos_tail_bound(const ExpansionConfig& cfg, int n) {
  const AnalyticDensity& g = cfg.density;
  const double r = g.strip_radius(), C = strip_constant(r), e = std::numbers::e;
  const double K = e * e * C * g.norm_r() / r;
  const double rho = 2.0 * cfg.d * std::abs(cfg.lambda) * e * e * e * C * g.norm_r() / (r * r);
  if (!(rho < 1.0)) return std::numeric_limits<double>::infinity();
  return K * std::pow(rho, n + 1) / (1.0 - rho);
}

/// Boundary series of <0|(H - E - i0 sigma)^{-1}|0>.
inline SeriesValue dos_series(ExpansionConfig cfg, HalfPlane sigma, double E) {
  detail::check_observables(cfg, 1);
  const bool identity = cfg.observables[0].terms.size() == 1 &&
                        cfg.observables[0].terms[0].second == CovariantMonomial{} &&
                        cfg.observables[0].terms[0].first == cplx(1.0);
  if (!identity) throw InvalidArgument("dos_series is defined for the identity observable");
  if (cfg.certified && !(std::abs(cfg.lambda) < lambda_r_eps(cfg.d, cfg.density, cfg.density.strip_radius())))
    throw RadiusViolation("|lambda| = " + std::to_string(std::abs(cfg.lambda)) +
                          " is outside the certified radius");
  const AnalyticDensity& g = cfg.density;
  auto factor = [&](const detail::SiteKey& k) { return in_boundary(g, k.visits[0] - 1, sigma, E); };
  SeriesValue out = detail::sum_series(cfg, 1, factor);
  for (int n = 0; n <= cfg.order; ++n) out.tail_bounds.push_back(dos_tail_bound(cfg, n));
  out.tail_bound = out.tail_bounds.back();
  out.energies = {cplx(E, 0.0)};
  out.sigmas = {sign(sigma)};
  return out;
}

/// (1/pi) Im of the upper boundary value.
inline double dos_value(const SeriesValue& upper) { return upper.value.imag() / std::numbers::pi; }

/// Delta and delta for a boundary evaluation at E.
struct GapParameters {
  double Delta = 0.0;
  double delta = 0.0;
};

inline GapParameters gap_parameters(const ExpansionConfig& cfg, const EnergyVector& E) {
  const double actual = E.min_gap();
  GapParameters p;
  p.Delta = cfg.gap > 0.0 ? cfg.gap : actual;
  if (E.size() > 1 && p.Delta > actual)
    throw InvalidArgument("configured gap exceeds the smallest gap of the energies");
  p.delta = cfg.delta > 0.0 ? cfg.delta : 0.25 * p.Delta;
  return p;
}

/// Tail bound of the N-point boundary series after order n:
/// P sum_{k > n} C(k+N-1, N-1) rho^k with rho = 2 d N C_1 e |lambda| ||g||_r / (Delta - delta).
/// Infinite unless |lambda| a_0 < Delta and 0 < delta < Delta/2.
inline double npoint_tail_bound(const ExpansionConfig& cfg, std::size_t N, const GapParameters& p, int n) {
  const AnalyticDensity& g = cfg.density;
  const double a0 = radius_a0(cfg.d, static_cast<int>(N), g);
  const bool ok = std::abs(cfg.lambda) * a0 < p.Delta && p.delta > 0.0 && p.delta < 0.5 * p.Delta;
  if (!ok) return std::numeric_limits<double>::infinity();
  const double r = g.strip_radius();
  const double c1 = 4.0 * strip_constant(r) / r;
  const double rho = 2.0 * cfg.d * N * c1 * std::numbers::e * std::abs(cfg.lambda) * g.norm_r() / (p.Delta - p.delta);
  return detail::observable_prefactor(cfg) * detail::binomial_geometric_tail(static_cast<int>(N), rho, n);
}

/// Boundary series at real energies E_k approached from the half planes sigma_k.
inline SeriesValue npoint_boundary_series(ExpansionConfig cfg, const SignVector& sigma, const EnergyVector& E) {
  const std::size_t N = E.size();
  detail::check_observables(cfg, N);
  if (sigma.size() != N) throw InvalidArgument("sign vector length mismatch");
  if (N > 1 && !E.distinct()) throw CoincidentPoints("boundary series needs distinct energies");
  const GapParameters gp = gap_parameters(cfg, E);
  if (cfg.certified && N > 1) {
    const double a0 = radius_a0(cfg.d, static_cast<int>(N), cfg.density);
    if (!(std::abs(cfg.lambda) * a0 < gp.Delta))
      throw RadiusViolation("|lambda| a0 = " + std::to_string(std::abs(cfg.lambda) * a0) +
                            " is not below the gap " + std::to_string(gp.Delta));
    if (!(gp.delta > 0.0 && gp.delta < 0.5 * gp.Delta))
      throw RadiusViolation("delta must lie in (0, Delta/2)");
  }
  if (cfg.certified && N == 1 &&
      !(std::abs(cfg.lambda) < lambda_r_eps(cfg.d, cfg.density, cfg.density.strip_radius())))
    throw RadiusViolation("|lambda| is outside the certified one-point radius");
  const AnalyticDensity& g = cfg.density;
  auto factor = [&](const detail::SiteKey& k) -> cplx {
    const AnalyticFunction h = detail::key_density(g, k);
    std::vector<int> n;
    std::vector<double> e;
    SignVector s;
    for (std::size_t i = 0; i < N; ++i) {
      if (!k.visits[i]) continue;
      n.push_back(k.visits[i] - 1);
      e.push_back(E[i]);
      s.push_back(sigma[i]);
    }
    if (n.empty()) return detail::plain_integral(h);
    if (n.size() == 1) return in_boundary(h, n[0], s[0], e[0]);
    const EnergyVector Es(e);
    return cfg.route == BoundaryRoute::decomposed ? j_sigma_decomposed(h, MultiIndex(n), s, Es)
                                                  : j_sigma_direct(h, MultiIndex(n), s, Es);
  };
  SeriesValue out = detail::sum_series(cfg, N, factor);
  for (int n = 0; n <= cfg.order; ++n)
    out.tail_bounds.push_back(N == 1 ? dos_tail_bound(cfg, n) : npoint_tail_bound(cfg, N, gp, n));
  out.tail_bound = out.tail_bounds.back();
  for (std::size_t i = 0; i < N; ++i) {
    out.energies.emplace_back(E[i], 0.0);
    out.sigmas.push_back(sign(sigma[i]));
  }
  return out;
}

}  // namespace anderson
