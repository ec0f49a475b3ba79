#pragma once

// Brute-force references on finite boxes: Hamiltonians, Monte Carlo
// disorder averages of resolvent matrix elements, smoothed DOS, eigenvalue
// counting, and an independent adaptive quadrature.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "anderson/covariant.hpp"
#include "anderson/densities.hpp"
#include "anderson/errors.hpp"
#include "anderson/parallel.hpp"
#include "anderson/rng.hpp"
#include "anderson/walks.hpp"

namespace anderson {

enum class Boundary { open, periodic };

/// The box [-L, L]^d; sites are numbered lexicographically with the first
/// coordinate slowest.
class FiniteBox {
 public:
  FiniteBox(int d, int L, Boundary b = Boundary::open) : d_(d), L_(L), b_(b) {
    check_dim(d);
    if (L < 0) throw InvalidArgument("box half-width must be >= 0");
    std::size_t n = 1;
    for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(2 * L + 1);
    size_ = n;
  }

  int d() const { return d_; }
  int L() const { return L_; }
  Boundary boundary() const { return b_; }
  std::size_t size() const { return size_; }

  /// Index of a site, wrapping for periodic boxes; empty outside an open box.
  std::optional<std::size_t> index(Site s) const {
    const int w = 2 * L_ + 1;
    std::size_t idx = 0;
    for (int k = 0; k < d_; ++k) {
      int c = s[k] + L_;
      if (b_ == Boundary::periodic) c = ((c % w) + w) % w;
      if (c < 0 || c >= w) return std::nullopt;
      idx = idx * w + static_cast<std::size_t>(c);
    }
    return idx;
  }

  Site site(std::size_t idx) const {
    const int w = 2 * L_ + 1;
    Site s{};
    for (int k = d_ - 1; k >= 0; --k) {
      s[k] = static_cast<int>(idx % w) - L_;
      idx /= w;
    }
    return s;
  }

  std::size_t origin() const { return *index(Site{}); }

 private:
  int d_, L_;
  Boundary b_;
  std::size_t size_ = 1;
};

/// i.i.d. potentials V(x) ~ g for every site of a box, from one engine.
struct DisorderSample {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::vector<double> potentials;

  static DisorderSample draw(const FiniteBox& box, const AnalyticDensity& g, std::uint64_t seed,
                             std::uint64_t index = 0) {
    DisorderSample s{seed, index, {}};
    auto eng = sample_engine(seed, index);
    s.potentials.resize(box.size());
    for (double& v : s.potentials) v = g.sample(eng);
    return s;
  }
};

using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<cplx>;

/// H = lambda * adjacency + diag(V).
inline SparseReal build_hamiltonian(const FiniteBox& box, double lambda, const DisorderSample& sample) {
  if (sample.potentials.size() != box.size()) throw InvalidArgument("sample does not match the box");
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < box.size(); ++i) {
    t.emplace_back(i, i, sample.potentials[i]);
    if (lambda == 0.0) continue;
    const Site x = box.site(i);
    for (int nu = 0; nu < box.d(); ++nu) {
      const auto j = box.index(x + unit(nu));
      // each bond once; a period-1 box would bond a site to itself
      if (j && *j != i) {
        t.emplace_back(i, *j, lambda);
        t.emplace_back(*j, i, lambda);
      }
    }
  }
  SparseReal H(box.size(), box.size());
  H.setFromTriplets(t.begin(), t.end());
  return H;
}

/// Sparse matrix of sum_t w_t A_t on the box. Terms whose target or
/// coefficient support leaves an open box are dropped.
inline SparseComplex observable_matrix(const FiniteBox& box, const CovariantPolynomial& A,
                                       const DisorderSample& sample, double r) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (const auto& [w, m] : A.terms)
    for (std::size_t i = 0; i < box.size(); ++i) {
      const Site x = box.site(i);
      const auto j = box.index(x + m.u0);
      if (!j) continue;
      cplx value = w;
      bool inside = true;
      for (const auto& [off, id] : m.coefficients) {
        const auto k = box.index(x + off);
        if (!k) {
          inside = false;
          break;
        }
        value *= coefficient(id, r).fn.at_real(sample.potentials[*k]);
      }
      if (inside) t.emplace_back(i, *j, value);
    }
  SparseComplex M(box.size(), box.size());
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

inline constexpr std::size_t kDirectSolveLimit = 40000;

/// Solves (H - z) x = b by sparse LU up to kDirectSolveLimit sites, BiCGSTAB above.
class ShiftedSolver {
 public:
  ShiftedSolver(const SparseReal& H, cplx z) {
    A_ = H.cast<cplx>();
    for (int i = 0; i < A_.rows(); ++i) A_.coeffRef(i, i) -= z;
    A_.makeCompressed();
    if (static_cast<std::size_t>(A_.rows()) <= kDirectSolveLimit) {
      lu_.compute(A_);
      if (lu_.info() != Eigen::Success) throw SolverFailure("sparse LU factorization failed");
    } else {
      it_.setTolerance(1e-10);
      it_.compute(A_);
      iterative_ = true;
    }
  }

  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) {
    Eigen::VectorXcd x;
    if (iterative_) {
      x = it_.solve(b);
      if (it_.info() != Eigen::Success) throw SolverFailure("BiCGSTAB did not converge");
    } else {
      x = lu_.solve(b);
      if (lu_.info() != Eigen::Success) throw SolverFailure("sparse LU solve failed");
    }
    return x;
  }

 private:
  SparseComplex A_;
  Eigen::SparseLU<SparseComplex> lu_;
  Eigen::BiCGSTAB<SparseComplex, Eigen::IncompleteLUT<cplx>> it_;
  bool iterative_ = false;
};

struct McResult {
  cplx mean{};
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

inline nlohmann::json to_json(const McResult& r, const nlohmann::json& config = nlohmann::json::object()) {
  return {{"config", config},       {"mean_re", r.mean.real()}, {"mean_im", r.mean.imag()},
          {"stderr", r.stderr_},    {"samples", r.samples},     {"seed", r.seed}};
}

/// Mean and standard error of per-sample values, summed in sample order.
inline McResult summarize(const std::vector<cplx>& x, std::uint64_t seed) {
  McResult r;
  r.samples = x.size();
  r.seed = seed;
  if (x.empty()) return r;
  for (const cplx& v : x) r.mean += v;
  r.mean /= static_cast<double>(x.size());
  if (x.size() > 1) {
    double ss = 0.0;
    for (const cplx& v : x) ss += std::norm(v - r.mean);
    r.stderr_ = std::sqrt(ss / (static_cast<double>(x.size()) * (x.size() - 1)));
  }
  return r;
}

struct McOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  /// Required distance from the origin to an open boundary.
  int margin = 0;
};

namespace detail {

inline void check_margin(const FiniteBox& box, int margin) {
  if (box.boundary() == Boundary::open && box.L() < margin)
    throw InvalidArgument("origin is closer than the required margin " + std::to_string(margin) +
                          " to the boundary");
}

}  // namespace detail

/// MC estimate of E < 0 | (H - z_1)^{-1} A_1 ... (H - z_N)^{-1} A_N | 0 >.
inline McResult mc_npoint(const FiniteBox& box, double lambda, const AnalyticDensity& g,
                          const std::vector<CovariantPolynomial>& observables, const std::vector<cplx>& z,
                          const McOptions& opt) {
  if (z.empty() || observables.size() != z.size())
    throw InvalidArgument("need one observable per resolvent");
  for (const cplx& zk : z)
    if (zk.imag() == 0.0) throw RealAxisInput("Monte Carlo resolvents need Im z != 0");
  detail::check_margin(box, opt.margin);
  std::vector<cplx> values(opt.samples);
  parallel_for(opt.samples, opt.threads, [&](std::size_t k) {
    const auto sample = DisorderSample::draw(box, g, opt.seed, k);
    const SparseReal H = build_hamiltonian(box, lambda, sample);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(box.size());
    v[box.origin()] = 1.0;
    for (std::size_t i = z.size(); i-- > 0;) {
      v = observable_matrix(box, observables[i], sample, g.strip_radius()) * v;
      ShiftedSolver solver(H, z[i]);
      v = solver.solve(v);
    }
    values[k] = v[box.origin()];
  });
  return summarize(values, opt.seed);
}

/// MC estimate of E <0|(H - z)^{-1}|0>.
inline McResult mc_green(const FiniteBox& box, double lambda, const AnalyticDensity& g, cplx z,
                         const McOptions& opt) {
  return mc_npoint(box, lambda, g, {identity_observable()}, {z}, opt);
}

struct GridPoint {
  double E = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// (1/pi) E Im <0|(H - E - i eps)^{-1}|0> on a grid, one eigendecomposition per sample.
inline std::vector<GridPoint> smoothed_dos(const FiniteBox& box, double lambda, const AnalyticDensity& g,
                                           double eps, const std::vector<double>& grid, const McOptions& opt) {
  if (!(eps > 0.0)) throw InvalidArgument("smoothing width must be positive");
  std::vector<std::vector<double>> per(opt.samples);
  parallel_for(opt.samples, opt.threads, [&](std::size_t k) {
    const auto sample = DisorderSample::draw(box, g, opt.seed, k);
    const Eigen::MatrixXd H(build_hamiltonian(box, lambda, sample));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw SolverFailure("eigendecomposition failed");
    const auto o = static_cast<Eigen::Index>(box.origin());
    auto& row = per[k];
    row.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double acc = 0.0;
      for (Eigen::Index m = 0; m < es.eigenvalues().size(); ++m) {
        const double w = es.eigenvectors()(o, m) * es.eigenvectors()(o, m);
        const double x = es.eigenvalues()[m] - grid[j];
        acc += w * eps / (x * x + eps * eps);
      }
      row[j] = acc / std::numbers::pi;
    }
  });
  std::vector<GridPoint> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::vector<cplx> col(opt.samples);
    for (std::size_t k = 0; k < opt.samples; ++k) col[k] = per[k][j];
    const auto r = summarize(col, opt.seed);
    out[j] = {grid[j], r.mean.real(), r.stderr_};
  }
  return out;
}

/// #{eigenvalues of H <= E} / |box|.
inline double ids_count(const FiniteBox& box, double lambda, const DisorderSample& sample, double E) {
  const Eigen::MatrixXd H(build_hamiltonian(box, lambda, sample));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverFailure("eigendecomposition failed");
  std::size_t count = 0;
  for (Eigen::Index m = 0; m < es.eigenvalues().size(); ++m) count += es.eigenvalues()[m] <= E;
  return static_cast<double>(count) / static_cast<double>(box.size());
}

/// int_a^b f by adaptive Gauss-Kronrod (61 points), real and imaginary parts
/// separately. Throws ToleranceNotMet when the error estimate exceeds tol.
template <class F>
cplx quad_reference(F f, double a, double b, double tol = 1e-12, unsigned max_depth = 15) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err_re = 0.0, err_im = 0.0;
  const double re = GK::integrate([&](double x) { return std::real(f(x)); }, a, b, max_depth, tol, &err_re);
  const double im = GK::integrate([&](double x) { return std::imag(f(x)); }, a, b, max_depth, tol, &err_im);
  const double scale = std::max(1.0, std::abs(cplx(re, im)));
  if (!(err_re <= tol * scale && err_im <= tol * scale))
    throw ToleranceNotMet("quadrature error estimate " + std::to_string(std::max(err_re, err_im)) +
                          " above target " + std::to_string(tol));
  return {re, im};
}

}  // namespace anderson
