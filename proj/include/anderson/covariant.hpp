#pragma once

// Finite-range covariant observables: monomials <x|A|y> = delta_{y-x,u0}
// prod_off a_off(V(x + off)) and finite sums of them.

#include <charconv>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "anderson/analytic.hpp"
#include "anderson/densities.hpp"
#include "anderson/errors.hpp"
#include "anderson/walks.hpp"

namespace anderson {

/// A coefficient function from the registry together with sup_{|Im z| < r} |a|.
struct Coefficient {
  std::string id;
  AnalyticFunction fn;
  double sup = 1.0;
};

/// Registry lookup. Known ids:
///   rational1   1/(1+v^2), needs r < 1, sup 1/(1-r^2)
///   gauss1      exp(-v^2/2), sup exp(r^2/2)
///   <number>    the constant
inline Coefficient coefficient(const std::string& id, double r) {
  const double inf = std::numeric_limits<double>::infinity();
  if (!(r > 0.0)) throw InvalidArgument("coefficient strip radius must be positive");
  if (id == "rational1") {
    if (!(r < 1.0)) throw StripViolation("rational1 has poles at +-i; needs r < 1");
    const cplx I(0.0, 1.0);
    auto f = [](cplx z) { return 1.0 / (1.0 + z * z); };
    auto d = [I](int n, cplx z) {
      const double sgn = n % 2 ? -1.0 : 1.0;
      return sgn * factorial(n) * (ipow(z - I, -(n + 1)) - ipow(z + I, -(n + 1))) / (2.0 * I);
    };
    return {id, AnalyticFunction(f, 1.0, inf, 1.0, 0.0, d), 1.0 / (1.0 - r * r)};
  }
  if (id == "gauss1") {
    auto f = [](cplx z) { return std::exp(-0.5 * z * z); };
    auto d = [](int n, cplx z) {
      const double sgn = n % 2 ? -1.0 : 1.0;
      return sgn * detail::hermite_he(n, z) * std::exp(-0.5 * z * z);
    };
    return {id, AnalyticFunction(f, inf, inf, 1.0, 0.0, d), std::exp(0.5 * r * r)};
  }
  double c = 0.0;
  const auto* end = id.data() + id.size();
  const auto [ptr, ec] = std::from_chars(id.data(), end, c);
  if (ec != std::errc() || ptr != end || !std::isfinite(c))
    throw ConfigError("unknown coefficient function '" + id + "' (rational1, gauss1 or a number)");
  auto f = [c](cplx) { return cplx(c, 0.0); };
  auto d = [c](int n, cplx) { return n == 0 ? cplx(c, 0.0) : cplx{}; };
  return {id, AnalyticFunction(f, inf, inf, 1.0, 0.0, d), std::abs(c)};
}

/// Displacement u0 and coefficient ids attached at offsets from the row site.
struct CovariantMonomial {
  Site u0{};
  std::map<Site, std::string> coefficients;

  bool operator==(const CovariantMonomial&) const = default;
};

/// sum_t w_t A_t.
struct CovariantPolynomial {
  std::vector<std::pair<cplx, CovariantMonomial>> terms;

  /// sum_t |w_t| max(1, prod of coefficient sups): bounds the operator's
  /// contribution to every walk term.
  double weight_bound(double r) const {
    double total = 0.0;
    for (const auto& [w, m] : terms) {
      double s = 1.0;
      for (const auto& [off, id] : m.coefficients) s *= coefficient(id, r).sup;
      total += std::abs(w) * std::max(1.0, s);
    }
    return total;
  }
};

inline CovariantPolynomial identity_observable() { return {{{cplx(1.0), CovariantMonomial{}}}}; }

/// The velocity i[R_nu, H] of H = lambda Delta + V: hopping along +e_nu with
/// weight -i lambda and along -e_nu with +i lambda.
inline CovariantPolynomial velocity(int nu, double lambda) {
  if (nu < 0 || nu >= kMaxDim) throw InvalidArgument("velocity axis out of range");
  CovariantPolynomial p;
  p.terms.push_back({cplx(0.0, -lambda), CovariantMonomial{unit(nu, 1), {}}});
  p.terms.push_back({cplx(0.0, lambda), CovariantMonomial{unit(nu, -1), {}}});
  return p;
}

/// <x|A|y> for the potentials V; MissingPotential if a needed site is absent.
inline cplx matrix_element(const CovariantMonomial& A, const std::map<Site, double>& V, const Site& x,
                           const Site& y, double r = 0.5) {
  if (y - x != A.u0) return {};
  cplx value(1.0);
  for (const auto& [off, id] : A.coefficients) {
    const auto it = V.find(x + off);
    if (it == V.end()) throw MissingPotential("no potential at site offset by coefficient support");
    value *= coefficient(id, r).fn.at_real(it->second);
  }
  return value;
}

inline cplx matrix_element(const CovariantPolynomial& P, const std::map<Site, double>& V, const Site& x,
                           const Site& y, double r = 0.5) {
  cplx acc{};
  for (const auto& [w, m] : P.terms) acc += w * matrix_element(m, V, x, y, r);
  return acc;
}

/// The coefficient ids that monomial i attaches to site u for the family:
/// a_{i, u - end(gamma_i)}.
inline std::vector<std::pair<std::size_t, std::string>> attachments(
    const NPathFamily& family, const std::vector<CovariantMonomial>& monomials, const Site& u) {
  std::vector<std::pair<std::size_t, std::string>> out;
  for (std::size_t i = 0; i < monomials.size(); ++i) {
    const auto it = monomials[i].coefficients.find(u - family.walks[i].end());
    if (it != monomials[i].coefficients.end()) out.emplace_back(i, it->second);
  }
  return out;
}

/// g times the coefficient functions in ids. The norm bound is ||g||_r times
/// the product of sup-norms.
inline AnalyticFunction site_density(const AnalyticDensity& g, const std::vector<std::string>& ids) {
  AnalyticFunction h = g.function();
  for (const auto& id : ids) {
    const Coefficient c = coefficient(id, g.strip_radius());
    h = h.times(c.fn, c.sup);
  }
  return h;
}

/// g_{Gamma,u}(v) = g(v) prod_i a_{i, u - end(gamma_i)}(v).
inline AnalyticFunction assemble_site_density(const AnalyticDensity& g, const NPathFamily& family,
                                              const std::vector<CovariantMonomial>& monomials,
                                              const Site& u) {
  if (monomials.size() != family.size())
    throw InvalidArgument("one monomial per walk is required");
  std::vector<std::string> ids;
  for (const auto& [i, id] : attachments(family, monomials, u)) ids.push_back(id);
  return site_density(g, ids);
}

namespace detail {

inline Site parse_site(std::string_view text, int d) {
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    throw ConfigError("site must look like (a,b,...), got '" + std::string(text) + "'");
  text = text.substr(1, text.size() - 2);
  Site s{};
  int k = 0;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    if (k >= d) throw ConfigError("site has more than d = " + std::to_string(d) + " coordinates");
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw ConfigError("bad site coordinate '" + std::string(item) + "'");
    s[k++] = v;
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
  }
  if (k != d) throw ConfigError("site needs exactly d = " + std::to_string(d) + " coordinates");
  return s;
}

// Split at commas outside parentheses.
inline std::vector<std::string_view> split_top(std::string_view text) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    if (text[i] == ',' && depth == 0) {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < text.size()) out.push_back(text.substr(start));
  return out;
}

}  // namespace detail

/// identity | velocity:nu=K | monomial:u0=(..),coef@(..)=ID,...
inline CovariantPolynomial parse_observable(std::string_view spec, int d, double lambda) {
  check_dim(d);
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (kind == "identity") {
    if (!body.empty()) throw ConfigError("identity takes no parameters");
    return identity_observable();
  }
  if (kind == "velocity") {
    const auto params = detail::parse_params(body, "velocity");
    if (params.size() != 1 || !params.count("nu")) throw ConfigError("velocity needs exactly nu=<axis>");
    const double nu = params.at("nu");
    if (nu != std::floor(nu) || nu < 0 || nu >= d) throw ConfigError("velocity axis must be in [0, d)");
    return velocity(static_cast<int>(nu), lambda);
  }
  if (kind == "monomial") {
    CovariantMonomial m;
    bool have_u0 = false;
    for (const auto item : detail::split_top(body)) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ConfigError("monomial field without '=': " + std::string(item));
      const auto key = item.substr(0, eq), value = item.substr(eq + 1);
      if (key == "u0") {
        m.u0 = detail::parse_site(value, d);
        have_u0 = true;
      } else if (key.starts_with("coef@")) {
        const std::string id(value);
        coefficient(id, 0.5);  // validates the id
        m.coefficients[detail::parse_site(key.substr(5), d)] = id;
      } else {
        throw ConfigError("unknown monomial field '" + std::string(key) + "'");
      }
    }
    if (!have_u0) throw ConfigError("monomial needs u0=(..)");
    return {{{cplx(1.0), m}}};
  }
  throw ConfigError("unknown observable '" + std::string(kind) + "' (identity, velocity, monomial)");
}

}  // namespace anderson
